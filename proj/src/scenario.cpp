#include "cwave/scenario.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cwave/diagnostics.hpp"
#include "cwave/errors.hpp"

namespace cwave {
namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) { throw ScenarioError(key + ": " + why); }

double num(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x)) bad(key, "not a finite number '" + v + "'");
    return x;
}

long integer(const std::string& key, const std::string& v) {
    double x = num(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e15) bad(key, "not an integer '" + v + "'");
    return static_cast<long>(x);
}

bool boolean(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "not a boolean '" + v + "'");
}

}  // namespace

std::vector<double> parse_number_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(num(key, trim(item)));
    return out;
}

namespace {

std::string g17(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

std::string glist(const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + g17(v[k]);
    return s;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

Scenario parse_scenario(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) bad("line " + std::to_string(lineno), "expected key = value");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty()) bad("line " + std::to_string(lineno), "empty key");
        if (kv.count(k)) bad(k, "duplicate key");
        kv[k] = v;
    }

    Scenario s;
    for (const char* req : {"grid.L", "grid.n", "initial.kind", "time.dt", "time.tmax", "epsilons"})
        if (!kv.count(req)) bad(req, "missing required key");
    std::set<std::string> used;
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        if (it == kv.end()) return nullptr;
        used.insert(k);
        return &it->second;
    };
    s.L = num("grid.L", *get("grid.L"));
    long n = integer("grid.n", *get("grid.n"));
    if (n < 16) bad("grid.n", "must be at least 16");
    s.n = static_cast<std::size_t>(n);
    s.kind = *get("initial.kind");
    if (s.kind == "corner" && !kv.count("corner.nu")) bad("corner.nu", "missing required key for a corner");
    const std::pair<const char*, double*> reals[] = {
        {"corner.nu", &s.corner_nu}, {"corner.x0", &s.corner_x0}, {"corner.R", &s.corner_R},
        {"cusp.c", &s.cusp_c},       {"cusp.x0", &s.cusp_x0},     {"cusp.R", &s.cusp_R},
        {"bump.a", &s.bump_a},       {"bump.w", &s.bump_w},       {"bump.x0", &s.bump_x0},
        {"velocity.mu", &s.velocity.mu}, {"time.dt", &s.dt},      {"time.tmax", &s.tmax},
        {"monitors.ceiling", &s.monitor_ceiling}, {"step.holo_ceiling", &s.holo_ceiling}};
    for (auto& [k, p] : reals)
        if (auto v = get(k)) *p = num(k, *v);
    if (auto v = get("velocity.kind")) {
        if (*v == "zero") s.velocity.kind = VelocityKind::zero;
        else if (*v == "pole") s.velocity.kind = VelocityKind::pole;
        else bad("velocity.kind", "expected zero or pole, got '" + *v + "'");
    }
    if (auto v = get("velocity.k")) s.velocity.k = static_cast<int>(integer("velocity.k", *v));
    if (auto v = get("time.output_every")) s.output_every = static_cast<int>(integer("time.output_every", *v));
    s.epsilons = parse_number_list("epsilons", *get("epsilons"));
    if (auto v = get("output.dir")) s.output_dir = *v;
    if (auto v = get("allow_inadmissible")) s.allow_inadmissible = boolean("allow_inadmissible", *v);
    if (auto v = get("markers.extra")) s.extra_markers = parse_number_list("markers.extra", *v);
    for (auto& [k, v] : kv)
        if (!used.count(k)) bad(k, "unknown key");
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("scenario: cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str());
}

void Scenario::validate() const {
    if (!(L > 0.0)) bad("grid.L", "must be positive");
    if (n < 16) bad("grid.n", "must be at least 16");
    if (kind != "flat" && kind != "bump" && kind != "corner" && kind != "cusp")
        bad("initial.kind", "expected flat, bump, corner or cusp, got '" + kind + "'");
    if (velocity.k < 2) bad("velocity.k", "pole order must be at least 2");
    if (!(dt > 0.0)) bad("time.dt", "must be positive");
    if (!(tmax >= 0.0)) bad("time.tmax", "must be non-negative");
    if (output_every < 1) bad("time.output_every", "must be at least 1");
    if (!(monitor_ceiling > 1.0)) bad("monitors.ceiling", "must exceed 1");
    if (!(holo_ceiling > 0.0)) bad("step.holo_ceiling", "must be positive");
    const double h = 2.0 * L / static_cast<double>(n);
    if (dt > 0.5 * h) bad("time.dt", "exceeds 0.5 * grid spacing (" + g17(0.5 * h) + ")");
    if (epsilons.empty()) bad("epsilons", "empty list");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        double e = epsilons[k];
        if (!(e > 0.0) || e > 1.0) bad("epsilons", "each value must lie in (0, 1]");
        if (k && !(e < epsilons[k - 1])) bad("epsilons", "must be strictly decreasing");
        if (e < 8.0 * h) bad("epsilons", g17(e) + " is below 8 * grid spacing (" + g17(8.0 * h) + ")");
    }
    for (double a : extra_markers)
        if (!(std::abs(a) < L - 4.0 * h)) bad("markers.extra", "label outside the grid interior");
}

double Scenario::crest() const { return kind == "cusp" ? cusp_x0 : corner_x0; }

ConformalMap Scenario::build_map() const {
    if (kind == "bump") return build_bump_map(bump_a, bump_w, bump_x0);
    if (kind == "corner") return build_corner_map(corner_nu, corner_x0, corner_R, allow_inadmissible);
    if (kind == "cusp") return build_cusp_map(cusp_x0, cusp_R, cusp_c);
    return build_flat_map();
}

std::vector<double> cusp_window_alphas(double x0, double eps, double outer) {
    std::vector<double> a;
    for (int k = 0;; ++k) {
        double d = eps * std::pow(2.0, 0.5 * k);
        if (d > outer * (1.0 + 1e-12)) break;
        a.push_back(x0 - d);
        a.push_back(x0 + d);
    }
    return a;
}

std::vector<double> Scenario::marker_alphas(double eps) const {
    std::vector<double> a = extra_markers;
    if (has_crest()) {
        for (double x : crest_probe_alphas(crest(), eps)) a.push_back(x);
        if (kind == "cusp")
            for (double x : cusp_window_alphas(crest(), eps)) a.push_back(x);
    }
    return a;   // sorted and deduplicated by mollify_initial
}

RunConfig Scenario::run_config() const {
    RunConfig rc;
    rc.dt = dt;
    rc.tmax = tmax;
    rc.output_every = output_every;
    rc.monitor_ceiling = monitor_ceiling;
    rc.step.holo_ceiling = holo_ceiling;
    return rc;
}

std::string Scenario::to_text() const {
    std::ostringstream o;
    o << "grid.L = " << g17(L) << "\n"
      << "grid.n = " << n << "\n"
      << "initial.kind = " << kind << "\n"
      << "corner.nu = " << g17(corner_nu) << "\n"
      << "corner.x0 = " << g17(corner_x0) << "\n"
      << "corner.R = " << g17(corner_R) << "\n"
      << "cusp.c = " << g17(cusp_c) << "\n"
      << "cusp.x0 = " << g17(cusp_x0) << "\n"
      << "cusp.R = " << g17(cusp_R) << "\n"
      << "bump.a = " << g17(bump_a) << "\n"
      << "bump.w = " << g17(bump_w) << "\n"
      << "bump.x0 = " << g17(bump_x0) << "\n"
      << "velocity.kind = " << (velocity.kind == VelocityKind::pole ? "pole" : "zero") << "\n"
      << "velocity.mu = " << g17(velocity.mu) << "\n"
      << "velocity.k = " << velocity.k << "\n"
      << "time.dt = " << g17(dt) << "\n"
      << "time.tmax = " << g17(tmax) << "\n"
      << "time.output_every = " << output_every << "\n"
      << "epsilons = " << glist(epsilons) << "\n"
      << "output.dir = " << output_dir << "\n"
      << "monitors.ceiling = " << g17(monitor_ceiling) << "\n"
      << "step.holo_ceiling = " << g17(holo_ceiling) << "\n"
      << "allow_inadmissible = " << (allow_inadmissible ? "true" : "false") << "\n";
    if (!extra_markers.empty()) o << "markers.extra = " << glist(extra_markers) << "\n";
    return o.str();
}

std::string Scenario::hash() const {
    char b[20];
    Scenario c = *this;
    c.output_dir.clear();   // relocating a run keeps its hash
    std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(fnv1a64(c.to_text())));
    return b;
}

}  // namespace cwave
