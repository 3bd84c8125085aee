#include "cwave/snapshot.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cwave/errors.hpp"

namespace cwave {
namespace {

void put(std::string& o, const char* fmt, double x) {
    char b[48];
    std::snprintf(b, sizeof b, fmt, x);
    o += b;
}

double to_d(const std::string& tok, const char* what) {
    errno = 0;
    char* end = nullptr;
    double x = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0') throw ScenarioError(std::string("snapshot: bad number for ") + what + " '" + tok + "'");
    return x;
}

}  // namespace

Snapshot snapshot_of(const Frame& f, const std::string& hash) {
    const WaveState& s = f.state;
    const Grid& g = s.grid();
    Snapshot o;
    o.t = s.t;
    o.eps = s.eps;
    o.L = g.L;
    o.n = g.n;
    o.scenario_hash = hash;
    o.dt_used = f.diag.dt_used;
    o.rate_sup = f.rate_sup;
    o.holo_residual = s.holo_residual;
    o.euler_residual = f.diag.euler_residual;
    o.alpha = g.nodes();
    o.Z_dev = s.Z_dev().samples();
    o.Zt_bar = s.Zt_bar.samples();
    o.markers = s.markers;
    return o;
}

std::string format_snapshot(const Snapshot& s) {
    std::string o;
    o.reserve(s.n * 100 + 512);
    o += "# cwave snapshot\n";
    auto kv = [&](const char* k, double v) {
        o += k;
        o += " = ";
        put(o, "%.17g", v);
        o += "\n";
    };
    kv("t", s.t);
    kv("eps", s.eps);
    kv("L", s.L);
    o += "n = " + std::to_string(s.n) + "\n";
    o += "scenario_hash = " + s.scenario_hash + "\n";
    kv("dt_used", s.dt_used);
    kv("rate_sup", s.rate_sup);
    kv("holo_residual", s.holo_residual);
    kv("euler_residual", s.euler_residual);
    o += "# alpha re_Z_minus_alpha im_Z_minus_alpha re_Ztbar im_Ztbar\n";
    for (std::size_t j = 0; j < s.n; ++j) {
        put(o, "%.17g", s.alpha[j]);
        put(o, " %.17g", s.Z_dev[j].real());
        put(o, " %.17g", s.Z_dev[j].imag());
        put(o, " %.17g", s.Zt_bar[j].real());
        put(o, " %.17g", s.Zt_bar[j].imag());
        o += "\n";
    }
    o += "markers = " + std::to_string(s.markers.size()) + "\n";
    o += "# alpha0 h phase logmod\n";
    for (const Marker& m : s.markers) {
        put(o, "%.17g", m.alpha0);
        put(o, " %.17g", m.h);
        put(o, " %.17g", m.phase);
        put(o, " %.17g", m.logmod);
        o += "\n";
    }
    return o;
}

Snapshot parse_snapshot(const std::string& text) {
    Snapshot s;
    std::istringstream is(text);
    std::string line;
    auto next = [&]() -> bool {
        while (std::getline(is, line))
            if (!line.empty() && line[0] != '#') return true;
        return false;
    };
    auto header = [&](const char* key) -> std::string {
        if (!next()) throw ScenarioError(std::string("snapshot: missing header ") + key);
        auto eq = line.find(" = ");
        if (eq == std::string::npos || line.substr(0, eq) != key)
            throw ScenarioError(std::string("snapshot: expected header ") + key + ", got '" + line + "'");
        return line.substr(eq + 3);
    };
    s.t = to_d(header("t"), "t");
    s.eps = to_d(header("eps"), "eps");
    s.L = to_d(header("L"), "L");
    s.n = static_cast<std::size_t>(to_d(header("n"), "n"));
    s.scenario_hash = header("scenario_hash");
    s.dt_used = to_d(header("dt_used"), "dt_used");
    s.rate_sup = to_d(header("rate_sup"), "rate_sup");
    s.holo_residual = to_d(header("holo_residual"), "holo_residual");
    s.euler_residual = to_d(header("euler_residual"), "euler_residual");
    s.alpha.resize(s.n);
    s.Z_dev.resize(s.n);
    s.Zt_bar.resize(s.n);
    auto fields = [&](double* out, int k, const char* what) {
        std::istringstream ls(line);
        std::string tok;
        for (int i = 0; i < k; ++i) {
            if (!(ls >> tok)) throw ScenarioError(std::string("snapshot: short ") + what + " row");
            out[i] = to_d(tok, what);
        }
        if (ls >> tok) throw ScenarioError(std::string("snapshot: extra column in ") + what + " row");
    };
    for (std::size_t j = 0; j < s.n; ++j) {
        if (!next()) throw ScenarioError("snapshot: row count below n");
        double r[5];
        fields(r, 5, "field");
        s.alpha[j] = r[0];
        s.Z_dev[j] = {r[1], r[2]};
        s.Zt_bar[j] = {r[3], r[4]};
    }
    std::size_t m = static_cast<std::size_t>(to_d(header("markers"), "markers"));
    for (std::size_t k = 0; k < m; ++k) {
        if (!next()) throw ScenarioError("snapshot: marker block truncated");
        double r[4];
        fields(r, 4, "marker");
        s.markers.push_back(Marker{r[0], r[1], r[2], r[3]});
    }
    if (next()) throw ScenarioError("snapshot: trailing data");
    return s;
}

void write_snapshot(const std::string& path, const Snapshot& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ScenarioError("snapshot: cannot write '" + path + "'");
    f << format_snapshot(s);
    if (!f) throw ScenarioError("snapshot: write failed for '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ScenarioError("snapshot: cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_snapshot(ss.str());
}

Frame frame_from(const Snapshot& s, const std::shared_ptr<const InitialTrace>& base, double zap_floor) {
    const Grid& g = base->grid;
    if (g.n != s.n || g.L != s.L) throw ScenarioError("snapshot: grid does not match the scenario");
    WaveState st;
    st.t = s.t;
    st.eps = s.eps;
    st.base = base;
    cvec D(g.n);
    for (std::size_t j = 0; j < g.n; ++j) D[j] = g.node(j) + s.Z_dev[j] - base->Z[j];
    st.D = BoundaryField(g, std::move(D));
    st.Zt_bar = BoundaryField(g, s.Zt_bar);
    st.markers = s.markers;
    st.holo_residual = s.holo_residual;
    Frame f;
    f.state = std::move(st);
    rhs(f.state, &f.diag, zap_floor);
    f.diag.dt_used = s.dt_used;
    f.diag.euler_residual = s.euler_residual;
    f.rate_sup = s.rate_sup;
    f.monitors = compute_monitors(f.state, f.diag);
    return f;
}

bool operator==(const Snapshot& a, const Snapshot& b) {
    auto same = [](double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; };
    auto samec = [&](const cvec& x, const cvec& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (!same(x[j].real(), y[j].real()) || !same(x[j].imag(), y[j].imag())) return false;
        return true;
    };
    if (!same(a.t, b.t) || !same(a.eps, b.eps) || !same(a.L, b.L) || a.n != b.n || a.scenario_hash != b.scenario_hash ||
        !same(a.dt_used, b.dt_used) || !same(a.rate_sup, b.rate_sup) || !same(a.holo_residual, b.holo_residual) ||
        !same(a.euler_residual, b.euler_residual) || a.alpha.size() != b.alpha.size() || a.markers.size() != b.markers.size())
        return false;
    for (std::size_t j = 0; j < a.alpha.size(); ++j)
        if (!same(a.alpha[j], b.alpha[j])) return false;
    for (std::size_t k = 0; k < a.markers.size(); ++k) {
        const Marker &x = a.markers[k], &y = b.markers[k];
        if (!same(x.alpha0, y.alpha0) || !same(x.h, y.h) || !same(x.phase, y.phase) || !same(x.logmod, y.logmod)) return false;
    }
    return samec(a.Z_dev, b.Z_dev) && samec(a.Zt_bar, b.Zt_bar);
}

}  // namespace cwave
