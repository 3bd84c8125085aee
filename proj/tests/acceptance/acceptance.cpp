// Acceptance checks. One line per criterion: "criterion <id>: PASS|FAIL <summary> | <measurements>".
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "cwave/diagnostics.hpp"
#include "cwave/field.hpp"
#include "cwave/scenario.hpp"
#include "oracles.hpp"

using namespace cwave;
using cd = std::complex<double>;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <class... A>
std::string fmt(const char* f, A... a) {
    std::string s(std::snprintf(nullptr, 0, f, a...), '\0');
    std::snprintf(s.data(), s.size() + 1, f, a...);
    return s;
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt("%.4e", v[k]);
    return s + "]";
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] < v[k - 1])) return false;
    return true;
}

double min_ratio(const std::vector<double>& v) {
    double r = INFINITY;
    for (std::size_t k = 1; k < v.size(); ++k) r = std::min(r, v[k - 1] / v[k]);
    return r;
}

std::vector<double> abs_diffs(const std::vector<double>& v) {
    std::vector<double> d;
    for (std::size_t k = 1; k < v.size(); ++k) d.push_back(std::abs(v[k] - v[k - 1]));
    return d;
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) mx += x[k] / x.size(), my += y[k] / y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < x.size(); ++k) sxy += (x[k] - mx) * (y[k] - my), sxx += (x[k] - mx) * (x[k] - mx);
    return sxy / sxx;
}

BoundaryField sampled(const Grid& g, const oracle::CFun& f) {
    return BoundaryField(g, oracle::sample(f, g.nodes()));
}

double window_diff(const cvec& a, const cvec& b, const Grid& g, double half) {
    double m = 0.0;
    for (std::size_t j = 0; j < g.n; ++j)
        if (std::abs(g.node(j)) <= half) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

// Ladder runs

struct LadderRun {
    double eps;
    Trajectory tr;
};

Scenario scenario(const std::string& name) {
    return load_scenario(std::string(CWAVE_SCENARIO_DIR) + "/" + name + ".txt");
}

const std::vector<LadderRun>& ladder(const std::string& name) {
    static std::map<std::string, std::vector<LadderRun>> cache;
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    Scenario sc = scenario(name);
    sc.validate();
    ConformalMap m = sc.build_map();
    Grid g = sc.grid();
    std::vector<LadderRun> v;
    for (double eps : sc.epsilons) {
        WaveState s0 = mollify_initial(m, sc.velocity, eps, g, sc.marker_alphas(eps));
        v.push_back({eps, run(s0, sc.run_config())});
    }
    return cache[name] = std::move(v);
}

bool all_completed(const std::vector<LadderRun>& runs, std::string& why) {
    for (const auto& r : runs)
        if (!r.tr.completed) {
            why = fmt("run eps=%g stopped: %s", r.eps, r.tr.stop_reason.c_str());
            return false;
        }
    return true;
}

double crest_factor_final(const RigidityReport& r) {
    for (const auto& p : r.probes)
        if (p.offset == 0.0) return std::abs(p.predicted.back() - 1.0);
    return NAN;
}

// 1: Hilbert transform against closed form, involution on five fields.
Outcome c1() {
    auto t0 = std::chrono::steady_clock::now();
    Grid g(80.0, 4096);
    BoundaryField h = hilbert(sampled(g, [](double x) { return cd(1.0 / (1.0 + x * x), 0.0); }));
    double rel = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        double x = g.node(j);
        if (std::abs(x) > g.L / 2 || x == 0.0) continue;
        cd ex = cd(0, -1) * x / (1.0 + x * x);
        rel = std::max(rel, std::abs(h[j] - ex) / std::abs(ex));
    }
    std::vector<oracle::CFun> fields = {
        [](double x) { return cd(1.0 / (1.0 + x * x), x / std::pow(1.0 + x * x, 2)); },
        oracle::random_field(1), oracle::random_field(2), oracle::random_field(3), oracle::random_field(4)};
    double inv = 0.0;
    for (const auto& f : fields) {
        BoundaryField a = sampled(g, f), hh = hilbert(hilbert(a));
        inv = std::max(inv, window_diff(hh.samples(), a.samples(), g, g.L));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {rel <= 1e-6 && inv <= 1e-8 && secs < 5.0,
            fmt("closed-form rel %.3e (<= 1e-6), involution residual %.3e (<= 1e-8), %.2f s (< 5)", rel, inv, secs)};
}

// 2: Poisson extension of the Lorentzian.
Outcome c2() {
    Grid g(80.0, 4096);
    BoundaryField f = sampled(g, [](double x) { return cd(1.0 / (1.0 + x * x), 0.0); });
    double worst = 0.0;
    std::string per;
    for (double y : {-0.5, -1.0, -2.0}) {
        BoundaryField u = poisson_extend(f, y);
        double c = 1.0 + std::abs(y), e = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            double x = g.node(j);
            if (std::abs(x) > g.L / 2) continue;
            double ex = c / (x * x + c * c);
            e = std::max(e, std::abs(u[j] - ex) / ex);
        }
        worst = std::max(worst, e);
        per += fmt(" y=%g: %.3e", y, e);
    }
    return {worst <= 1e-6, "max rel" + per + " (<= 1e-6)"};
}

// 3: flat rest state is an equilibrium.
Outcome c3() {
    Grid g(16.0, 512);
    WaveState s = mollify_initial(build_flat_map(), VelocityProfile{}, 0.1, g);
    // Mollified rest interface is α' − iε.
    const cvec Z0 = s.Z();
    for (int k = 0; k < 1000; ++k) s = step_rk4(s, 1e-3);
    cvec Z = s.Z();
    double dz = 0.0, dv = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        dz = std::max(dz, std::abs(Z[j] - Z0[j]));
        dv = std::max(dv, std::abs(s.Zt_bar[j]));
    }
    return {dz + dv <= 1e-8, fmt("|Z - Z(0)|_inf + |Zt|_inf = %.3e (<= 1e-8) at t = %g", dz + dv, s.t)};
}

// 4: temporal order from dt halving.
Outcome c4() {
    Grid g(16.0, 512);
    WaveState s0 = mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{VelocityKind::pole, 0.05, 2}, 0.05, g);
    std::vector<WaveState> out;
    for (double dt : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
        WaveState s = s0;
        int steps = static_cast<int>(std::lround(1.0 / dt));
        for (int k = 0; k < steps; ++k) s = step_rk4(s, dt);
        out.push_back(s);
    }
    auto err = [&](const WaveState& a, const WaveState& b) {
        return std::max(window_diff(a.Zt_bar.samples(), b.Zt_bar.samples(), g, g.L),
                        window_diff(a.Z(), b.Z(), g, g.L));
    };
    double e1 = err(out[0], out[1]), e2 = err(out[1], out[2]), r = e1 / e2;
    return {std::abs(r - 16.0) <= 3.0, fmt("errors %.3e, %.3e; ratio %.2f (16 +- 3)", e1, e2, r)};
}

// 5: corner exponents and cusp model.
Outcome c5() {
    bool ok = true;
    std::string d;
    for (double nu : {0.25, 0.3, 0.45}) {
        double p = fit_corner_exponent(build_corner_map(nu, 0.0), 0.0, 1e-4, 1e-1);
        double rel = std::abs(p - (1.0 - nu)) / (1.0 - nu);
        ok = ok && rel <= 0.02;
        d += fmt("nu=%.2f fit %.4f rel %.2e; ", nu, p, rel);
    }
    CuspFit cf = fit_cusp_model(build_cusp_map(0.0), 0.0, 1e-5, 1e-2);
    ok = ok && cf.max_log_residual <= 0.05;
    d += fmt("cusp log residual %.3e (<= 0.05)", cf.max_log_residual);
    return {ok, d};
}

// Energy terms of the mollified initial data on an ε-ladder.
std::vector<EnergyTerms> energy_ladder(double nu, const std::vector<double>& eps) {
    Grid g(16.0, 32768);
    ConformalMap m = build_corner_map(nu, 0.0, 1.0, true);
    std::vector<EnergyTerms> t;
    for (double e : eps) t.push_back(energy_boundary(mollify_initial(m, VelocityProfile{VelocityKind::pole, 0.05, 2}, e, g)).terms);
    return t;
}

const std::vector<double> kEnergyLadder = {0.1, 0.05, 0.025, 0.0125};

// 6a: admissible corner, every term settles.
Outcome c6a() {
    auto T = energy_ladder(0.45, kEnergyLadder);
    bool ok = true;
    std::string d;
    for (int k = 0; k < 7; ++k) {
        std::vector<double> v;
        for (const auto& t : T) v.push_back(t[k]);
        std::vector<double> dv = abs_diffs(v);
        std::vector<double> ld, le;
        for (std::size_t j = 0; j < dv.size(); ++j) ld.push_back(std::log(dv[j])), le.push_back(std::log(kEnergyLadder[j]));
        double p = slope(le, ld);
        bool term_ok = strictly_decreasing(dv) && p > 0.0;
        ok = ok && term_ok;
        d += fmt("%s diffs %s p=%.3f; ", energy_term_names()[k], list(dv).c_str(), p);
    }
    return {ok, d + "eps " + list(kEnergyLadder)};
}

// 6b: inadmissible corner, the curvature term must at least double per level.
Outcome c6b() {
    auto T = energy_ladder(0.55, kEnergyLadder);
    std::vector<double> v;
    for (const auto& t : T) v.push_back(t[5]);
    std::vector<double> r;
    for (std::size_t k = 1; k < v.size(); ++k) r.push_back(v[k] / v[k - 1]);
    double worst = *std::min_element(r.begin(), r.end());
    return {worst >= 2.0, fmt("|d(1/Zap)|^2 %s, growth per level %s, min %.3f (>= 2)", list(v).c_str(),
                              list(r).c_str(), worst)};
}

// 7: zero velocity rigidity.
Outcome c7() {
    const auto& runs = ladder("corner_rest");
    std::string why;
    if (!all_completed(runs, why)) return {false, why};
    std::vector<double> inner, outer;
    double crest = 0.0;
    for (const auto& r : runs) {
        RigidityReport rg = angle_rigidity(r.tr, 0.0);
        inner.push_back(rg.inner_angle_drift);
        outer.push_back(rg.angle_drift);
        crest = std::max(crest, rg.crest_factor_error);
    }
    return {strictly_decreasing(inner) && crest <= 1e-12,
            fmt("inner-probe drift %s (strictly decreasing), crest |pred - 1| %.3e (<= 1e-12); outer-probe drift %s",
                list(inner).c_str(), crest, list(outer).c_str())};
}

// 8: nonzero velocity rigidity.
Outcome c8() {
    const auto& runs = ladder("corner_pole");
    std::string why;
    if (!all_completed(runs, why)) return {false, why};
    double mismatch = 0.0;
    std::vector<double> cf, tang, med;
    for (const auto& r : runs) {
        RigidityReport rg = angle_rigidity(r.tr, 0.0);
        mismatch = std::max(mismatch, rg.max_mismatch);
        cf.push_back(crest_factor_final(rg));
        TangentVanishing tv = tangent_vanishing(r.tr.frames.back(), 0.0, 16 * r.tr.frames.back().state.grid().spacing);
        tang.push_back(std::abs(tv.crest_limit));
        med.push_back(tv.away_median);
    }
    double c = min_ratio(cf);
    return {mismatch <= 1e-3 && strictly_decreasing(cf) && c >= kContraction,
            fmt("probe mismatch %.3e (<= 1e-3); crest |pred - 1| %s, min contraction %.3f (>= %.1f); "
                "crest tangent limit %s, away median %s",
                mismatch, list(cf).c_str(), c, kContraction, list(tang).c_str(), list(med).c_str())};
}

// 9: tip acceleration.
Outcome c9() {
    const auto& runs = ladder("corner_pole");
    std::string why;
    if (!all_completed(runs, why)) return {false, why};
    std::vector<cplx> tips;
    std::vector<double> abs_tip;
    bool bound = true;
    double margin = 0.0;
    for (const auto& r : runs) {
        RigidityReport rg = angle_rigidity(r.tr, 0.0);
        tips.push_back(rg.tip.back());
        abs_tip.push_back(rg.tip_final);
        bound = bound && rg.tip_bound_ok;
        margin = std::max(margin, rg.tip_bound_margin);
    }
    LimitEstimate e = extrapolate_ladder(tips);
    double lim = std::abs(e.value);
    return {lim <= 0.05 && bound,
            fmt("|Ztt - i| per eps %s, extrapolated %.4e (<= 0.05, %s); pointwise bound %s, max ratio %.6f",
                list(abs_tip).c_str(), lim, e.converged ? "converged" : "not converged", bound ? "holds" : "violated",
                margin)};
}

// 10: singular-set transport and no new singularities.
Outcome c10() {
    bool ok = true;
    std::string d;
    for (const char* name : {"corner_pole", "bump"}) {
        const auto& runs = ladder(name);
        std::string why;
        if (!all_completed(runs, why)) return {false, why};
        for (const auto& r : runs) {
            SingularSetReport s = singular_set_track(r.tr);
            bool smooth = std::string(name) == "bump";
            ok = ok && s.band_ok && (!smooth || s.no_new_singularity);
            d += fmt("%s eps=%g: band margin %.3e (<= 0), c1 %.4f c2 %.4f", name, r.eps, s.worst_band_margin, s.c1, s.c2);
            if (smooth) d += fmt(", min node ratio %.4f (>= 0.1)", s.min_node_ratio);
            d += "; ";
        }
    }
    return {ok, d};
}

// 11: pressure identities.
Outcome c11() {
    double lap = 0.0, bd = 0.0, gr = 0.0;
    std::vector<double> cg;
    for (const char* name : {"bump", "corner_pole"}) {
        const auto& runs = ladder(name);
        std::string why;
        if (!all_completed(runs, why)) return {false, why};
        bool crest = std::string(name) != "bump";
        for (const auto& r : runs) {
            const Frame& f = r.tr.frames.back();
            PressureReport p = pressure_identities(f, crest ? std::vector<double>{0.0} : std::vector<double>{},
                                                   16 * f.state.grid().spacing);
            lap = std::max(lap, p.laplacian_residual);
            bd = std::max(bd, p.boundary_residual);
            gr = std::max(gr, p.g_residual);
            if (crest) cg.push_back(p.crest_gradient);
        }
    }
    return {lap <= 1e-5 && bd <= 1e-3 && gr <= 1e-3,
            fmt("laplacian %.3e (<= 1e-5), boundary %.3e (<= 1e-3), g %.3e (<= 1e-3); crest gradient per eps %s", lap,
                bd, gr, list(cg).c_str())};
}

// 12: cusp separation bound and chord-arc under refinement.
Outcome c12() {
    const auto& runs = ladder("cusp");
    std::string why;
    if (!all_completed(runs, why)) return {false, why};
    double lower = INFINITY;
    for (const auto& r : runs) {
        CuspEvolution cu = cusp_evolution_check(r.tr, 0.0, r.eps, 0.1);
        for (std::size_t k = 0; k < cu.t.size(); ++k)
            if (cu.t[k] <= 0.1 + 1e-12) lower = std::min(lower, cu.min_ratio[k]);
    }
    ConformalMap cusp = build_cusp_map(0.0), corner = build_corner_map(0.3, 0.0);
    std::vector<double> dc, dk, lx, ly;
    for (std::size_t n : {1024, 2048, 4096, 8192, 16384}) {
        Grid g(16.0, n);
        dc.push_back(chord_arc_constant(g, cusp.row(g, 0.0)->Z));
        dk.push_back(chord_arc_constant(g, corner.row(g, 0.0)->Z));
        lx.push_back(std::log(std::log(1.0 / g.spacing)));
        ly.push_back(std::log(dc.back()));
    }
    // δ ∝ (log 1/h)^{−p} for the cusp; the corner differences contract geometrically.
    double p = -slope(lx, ly), resid = 0.0;
    double b = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) b += (ly[k] + p * lx[k]) / lx.size();
    for (std::size_t k = 0; k < lx.size(); ++k) resid = std::max(resid, std::abs(ly[k] - (b - p * lx[k])));
    std::vector<double> ddk = abs_diffs(dk);
    double ck = min_ratio(ddk);
    bool ok = lower >= 0.5 && strictly_decreasing(dc) && p > 0.0 && resid <= 0.05 && ck >= kContraction;
    return {ok, fmt("min separation ratio %.4f (>= 0.5); cusp chord-arc %s, log-power p %.3f resid %.3e; "
                    "corner chord-arc %s, difference contraction %.3f (>= %.1f)",
                    lower, list(dc).c_str(), p, resid, list(dk).c_str(), ck, kContraction)};
}

const std::vector<std::pair<std::string, std::pair<const char*, std::function<Outcome()>>>> kCriteria = {
    {"1", {"Hilbert transform oracles", c1}},
    {"2", {"Poisson extension oracle", c2}},
    {"3", {"flat rest equilibrium", c3}},
    {"4", {"fourth-order time stepping", c4}},
    {"5", {"corner exponents and cusp model", c5}},
    {"6a", {"energy converges for nu = 0.45", c6a}},
    {"6b", {"curvature term doubles per level for nu = 0.55", c6b}},
    {"7", {"angle rigidity, zero velocity", c7}},
    {"8", {"angle rigidity, pole velocity", c8}},
    {"9", {"tip acceleration", c9}},
    {"10", {"singular set transport", c10}},
    {"11", {"pressure identities", c11}},
    {"12", {"cusp evolution and chord-arc", c12}},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cwave acceptance"};
    std::string which;
    app.add_option("--criterion", which, "criterion id (all when omitted)");
    CLI11_PARSE(app, argc, argv);

    bool any = false, all_pass = true;
    for (const auto& [id, entry] : kCriteria) {
        if (!which.empty() && which != id) continue;
        any = true;
        Outcome o;
        try {
            o = entry.second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        all_pass = all_pass && o.pass;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " " << entry.first << " | "
                  << o.detail << std::endl;
    }
    if (!any) {
        std::cerr << "unknown criterion " << which << "\n";
        return 2;
    }
    return all_pass ? 0 : 1;
}
