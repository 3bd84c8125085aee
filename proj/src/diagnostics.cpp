#include "cwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cwave/errors.hpp"
#include "cwave/kernels.hpp"
#include "cwave/line_ops.hpp"

namespace cwave {
namespace {

using Op = LineOps::Op;
const cplx I1(0.0, 1.0);

double sup(const cvec& f) {
    double m = 0.0;
    for (const auto& v : f) m = std::max(m, std::abs(v));
    return m;
}

double l2sq(const Grid& g, const cvec& f) {
    double a = 0.0;
    for (const auto& v : f) a += std::norm(v);
    return a * g.spacing;
}

double hhalf_sq(const LineOps& ops, const cvec& f) {
    cvec d = ops.apply(f, Op::absd);
    return std::max(0.0, ops.grid().spacing * kernels::dot_re(f.data(), d.data(), f.size()));
}

cvec mul(const cvec& a, const cvec& b) {
    cvec o(a.size());
    kernels::cmul(a.data(), b.data(), o.data(), a.size());
    return o;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

EnergyReport finish(EnergyTerms t) {
    EnergyReport r;
    r.terms = t;
    for (double x : t) r.total += x;
    return r;
}

std::size_t find_marker(const std::vector<Marker>& m, double alpha0) {
    std::size_t best = 0;
    double d = 1e300;
    for (std::size_t k = 0; k < m.size(); ++k)
        if (std::abs(m[k].alpha0 - alpha0) < d) {
            d = std::abs(m[k].alpha0 - alpha0);
            best = k;
        }
    if (m.empty() || d > 1e-12 * std::max(1.0, std::abs(alpha0)))
        throw IllPosedInput("no marker carries the requested label");
    return best;
}

// Polynomial extrapolation to y = 0 from samples at depths y[k]; returns the
// full-degree value and the one-degree-lower value built from the shallowest points.
std::pair<cplx, cplx> neville0(const double* y, const cplx* f, int m) {
    cplx p[8];
    for (int k = 0; k < m; ++k) p[k] = f[k];
    cplx lower = 0.0;
    for (int l = 1; l < m; ++l) {
        for (int k = 0; k + l < m; ++k) p[k] = (y[k + l] * p[k] - y[k] * p[k + 1]) / (y[k + l] - y[k]);
        if (l == m - 2) lower = p[1];
    }
    return {p[0], lower};
}

cplx unit(cplx z) { return z / std::abs(z); }

// 4th-order central first and second differences.
inline cplx d1(const cplx* f, std::ptrdiff_t s, double h) {
    return (f[-2 * s] - 8.0 * f[-s] + 8.0 * f[s] - f[2 * s]) / (12.0 * h);
}

// 𝔓 on one row together with the pieces reused by the identities.
struct PRow {
    double y = 0.0;
    cvec F, U, P;   // P stored as complex with zero imaginary part
};

PRow pressure_row(const LineOps& ops, const cvec& V, const cvec& u, double y) {
    PRow r;
    r.y = y;
    r.F = y == 0.0 ? V : ops.poisson(V, y);
    r.U = y == 0.0 ? u : ops.poisson(u, y);
    r.P.resize(V.size());
    for (std::size_t j = 0; j < V.size(); ++j) r.P[j] = -0.5 * std::norm(r.F[j]) - y + 0.5 * r.U[j].real();
    return r;
}

}  // namespace

const std::array<const char*, 7>& energy_term_names() {
    static const std::array<const char*, 7> n = {"Ztbar_ap_L2sq", "q1_H12sq", "q2_L2sq", "q3_H12sq",
                                                 "inv_Zap_inf_sq", "d_inv_Zap_L2sq", "q4_L2sq"};
    return n;
}

EnergyReport energy_traces(const Grid& g, const cvec& Zap, const cvec& V) {
    auto ops = LineOps::get(g);
    cvec dV = ops->apply(V, Op::deriv);
    cvec Q(g.n), Qm1(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        Q[j] = 1.0 / Zap[j];
        Qm1[j] = Q[j] - 1.0;
    }
    cvec dQ = ops->apply(Qm1, Op::deriv);
    cvec q2 = mul(Q, dV);
    cvec dq2 = ops->apply(q2, Op::deriv);
    cvec q3 = mul(Q, dq2);
    cvec q4 = mul(Q, q3);
    cvec q7 = mul(Q, ops->apply(mul(Q, dQ), Op::deriv));
    double qs = sup(Q);
    return finish({l2sq(g, dV), hhalf_sq(*ops, q2), l2sq(g, q3), hhalf_sq(*ops, q4), qs * qs, l2sq(g, dQ),
                   l2sq(g, q7)});
}

EnergyReport energy_boundary(const WaveState& s) { return energy_traces(s.grid(), s.Zap(), s.Zt_bar.samples()); }

std::vector<double> interior_depth_ladder(const Grid& g) {
    std::vector<double> d;
    const double lo = std::log(4.0 * g.spacing);
    for (int k = 0; k < 12; ++k) d.push_back(-std::exp(lo * k / 11.0));
    return d;
}

InteriorEnergy energy_interior(const ConformalMap& m, const VelocityProfile& v, const Grid& g, std::vector<double> depths) {
    if (depths.empty()) depths = interior_depth_ladder(g);
    std::sort(depths.begin(), depths.end());
    for (double y : depths)
        if (!(y < 0.0)) throw IllPosedInput("energy_interior: depths must be negative");
    auto ops = LineOps::get(g);
    InteriorEnergy out;
    out.depths = depths;
    double supF = 0.0, supQ = 0.0;
    for (double y : depths) {
        cvec q1(g.n), q2(g.n), q3(g.n), q4(g.n), q5(g.n), q6(g.n), q7(g.n), F(g.n), Qm1(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            cplx z(g.node(j), y);
            Jet4 P = cplx(1.0, 0.0) / m.dpsi_jet(z);
            Jet4 Fj = v.jet(z);
            Jet4 Fp = derivative(Fj);
            Jet4 PF = P * Fp;
            Jet4 dPF = derivative(PF);
            Jet4 dP = derivative(P);
            q1[j] = Fp.value();
            q2[j] = PF.value();
            q3[j] = (P * dPF).value();
            q4[j] = (P * P * dPF).value();
            q5[j] = P.value();
            q6[j] = dP.value();
            q7[j] = (P * derivative(P * dP)).value();
            F[j] = Fj.value();
            Qm1[j] = P.value() - 1.0;
        }
        double qs = sup(q5);
        EnergyReport r = finish({l2sq(g, q1), hhalf_sq(*ops, q2), l2sq(g, q3), hhalf_sq(*ops, q4), qs * qs,
                                 l2sq(g, q6), l2sq(g, q7)});
        for (std::size_t k = 0; k < 7; ++k) out.terms[k] = std::max(out.terms[k], r.terms[k]);
        out.totals.push_back(r.total);
        supF = std::max(supF, std::sqrt(l2sq(g, F)));
        supQ = std::max(supQ, std::sqrt(l2sq(g, Qm1)));
    }
    for (double t : out.terms) out.E1 += t;
    out.c0 = supF + supQ;
    std::size_t arg = std::max_element(out.totals.begin(), out.totals.end()) - out.totals.begin();
    out.argmax_depth = depths[arg];
    for (std::size_t k = 1; k < out.totals.size(); ++k)
        if (out.totals[k] < out.totals[k - 1] * (1.0 - 1e-12)) out.monotone = false;
    return out;
}

std::vector<double> crest_probe_alphas(double x0, double eps, const std::vector<double>& kappas) {
    std::vector<double> a{x0};
    for (double k : kappas) {
        a.push_back(x0 - k * eps);
        a.push_back(x0 + k * eps);
    }
    std::sort(a.begin(), a.end());
    return a;
}

SingularSetReport singular_set_track(const Trajectory& tr) {
    SingularSetReport out;
    if (tr.frames.empty()) return out;
    const WaveState& s0 = tr.frames.front().state;
    const Grid& g = s0.grid();
    const cvec& zap0 = s0.base->Zap;
    out.markers.resize(s0.markers.size());
    for (std::size_t i = 0; i < s0.markers.size(); ++i) out.markers[i].alpha0 = s0.markers[i].alpha0;
    out.c1 = out.c2 = 1.0;
    const double lim = g.L - 4.0 * g.spacing;
    for (const Frame& f : tr.frames) {
        cvec zap = f.state.Zap();
        out.rate_bound = std::max(out.rate_bound, f.rate_sup);
        for (std::size_t j = 0; j < g.n; ++j)
            out.min_node_ratio = std::min(out.min_node_ratio, std::abs(zap0[j]) / std::abs(zap[j]));
        for (std::size_t i = 0; i < f.state.markers.size(); ++i) {
            const Marker& mk = f.state.markers[i];
            MarkerSeries& ms = out.markers[i];
            double r = std::abs(interpolate(g, zap0, mk.alpha0)) / std::abs(interpolate(g, zap, mk.h));
            double band = std::exp(f.state.t * f.rate_sup);
            ms.t.push_back(f.state.t);
            ms.h.push_back(mk.h);
            ms.ratio.push_back(r);
            ms.ratio_pred.push_back(std::exp(-mk.logmod));
            ms.band.push_back(band);
            if (std::abs(mk.h) > lim) ms.extrapolated = true;
            out.c1 = std::min(out.c1, r);
            out.c2 = std::max(out.c2, r);
            double margin = std::abs(std::log(r)) - f.state.t * f.rate_sup;
            out.worst_band_margin = std::max(out.worst_band_margin, margin);
            if (margin > 1e-9) out.band_ok = false;
        }
    }
    if (out.markers.empty()) out.worst_band_margin = 0.0;
    out.no_new_singularity = out.min_node_ratio >= 0.1;
    return out;
}

RigidityReport angle_rigidity(const Trajectory& tr, double crest) {
    RigidityReport out;
    out.crest = crest;
    if (tr.frames.empty()) return out;
    const WaveState& s0 = tr.frames.front().state;
    const Grid& g = s0.grid();
    const double eps = s0.eps;
    const std::size_t ic = find_marker(s0.markers, crest);
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < s0.markers.size(); ++k)
        if (std::abs(s0.markers[k].alpha0 - crest) <= 4.0 * eps * (1.0 + 1e-9)) idx.push_back(k);
    std::size_t il = idx.front(), ir = idx.back();
    std::size_t jl = ic, jr = ic;   // nearest probes on either side of the crest
    for (std::size_t k : idx) {
        double d = s0.markers[k].alpha0 - crest;
        if (d < 0.0 && (jl == ic || d > s0.markers[jl].alpha0 - crest)) jl = k;
        if (d > 0.0 && (jr == ic || d < s0.markers[jr].alpha0 - crest)) jr = k;
    }
    for (std::size_t k : idx) {
        ProbeSeries p;
        p.alpha0 = s0.markers[k].alpha0;
        p.offset = p.alpha0 - crest;
        out.probes.push_back(p);
    }
    const cvec& zap0 = s0.base->Zap;
    double theta0 = 0.0, inner0 = 0.0;
    for (std::size_t q = 0; q < tr.frames.size(); ++q) {
        const Frame& f = tr.frames[q];
        const auto& mk = f.state.markers;
        cvec zap = f.state.Zap();
        out.t.push_back(f.state.t);
        double l = std::arg(interpolate(g, zap, mk[il].h)), r = std::arg(interpolate(g, zap, mk[ir].h));
        double th = M_PI + std::remainder(r - l, 2.0 * M_PI);
        out.left.push_back(l);
        out.right.push_back(r);
        out.interior_angle.push_back(th);
        double ti = M_PI + std::remainder(std::arg(interpolate(g, zap, mk[jr].h)) - std::arg(interpolate(g, zap, mk[jl].h)),
                                          2.0 * M_PI);
        out.inner_angle.push_back(ti);
        if (q == 0) theta0 = th, inner0 = ti;
        out.angle_drift = std::max(out.angle_drift, std::abs(th - theta0));
        out.inner_angle_drift = std::max(out.inner_angle_drift, std::abs(ti - inner0));
        for (std::size_t p = 0; p < idx.size(); ++p) {
            const Marker& m = mk[idx[p]];
            cplx meas = unit(interpolate(g, zap, m.h)) / unit(interpolate(g, zap0, m.alpha0));
            cplx pred = std::exp(I1 * m.phase);
            ProbeSeries& ps = out.probes[p];
            ps.measured.push_back(meas);
            ps.predicted.push_back(pred);
            ps.max_mismatch = std::max(ps.max_mismatch, std::abs(meas - pred));
            out.max_modulus_error = std::max(out.max_modulus_error, std::abs(std::abs(pred) - 1.0));
            if (idx[p] == ic) out.crest_factor_error = std::max(out.crest_factor_error, std::abs(pred - 1.0));
        }
        cplx tip = interpolate(g, f.diag.Ztt_bar.samples(), mk[ic].h) - I1;
        out.tip.push_back(tip);
        double a1 = f.diag.A1.sup_norm();
        for (std::size_t j = 0; j < g.n; ++j) {
            double lhs = std::abs(f.diag.Ztt_bar[j] - I1), rhs = a1 / std::abs(zap[j]);
            out.tip_bound_margin = std::max(out.tip_bound_margin, lhs / rhs);
        }
        out.ratio.push_back(std::abs(interpolate(g, zap0, mk[ic].alpha0)) / std::abs(interpolate(g, zap, mk[ic].h)));
    }
    out.tip_bound_ok = out.tip_bound_margin <= 1.0 + 1e-12;
    out.tip_final = std::abs(out.tip.back());
    for (const auto& p : out.probes)
        if (p.offset != 0.0) out.max_mismatch = std::max(out.max_mismatch, p.max_mismatch);
    // final-time |predicted − 1| from the outermost probes toward the crest, worst side per distance
    std::vector<std::pair<double, double>> lad;
    for (const auto& p : out.probes) lad.emplace_back(std::abs(p.offset), std::abs(p.predicted.back() - 1.0));
    std::sort(lad.begin(), lad.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; k < lad.size(); ++k) {
        if (!out.probe_ladder.empty() && k > 0 && lad[k].first == lad[k - 1].first)
            out.probe_ladder.back() = std::max(out.probe_ladder.back(), lad[k].second);
        else
            out.probe_ladder.push_back(lad[k].second);
    }
    for (std::size_t k = 1; k < out.probe_ladder.size(); ++k)
        if (out.probe_ladder[k] > out.probe_ladder[k - 1] * (1.0 + 1e-9) + 1e-14) out.probe_ladder_contracting = false;
    return out;
}

TangentVanishing tangent_vanishing(const Frame& f, double crest, double window) {
    const WaveState& s = f.state;
    const Grid& g = s.grid();
    auto ops = LineOps::get(g);
    cvec zap = s.Zap();
    cvec dV = ops->apply(s.Zt_bar.samples(), Op::deriv);
    cvec q(g.n), Qm1(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        q[j] = dV[j] / zap[j];
        Qm1[j] = 1.0 / zap[j] - 1.0;
    }
    const double hc = s.markers.empty() ? crest : s.markers[find_marker(s.markers, crest)].h;
    const auto depths = default_depth_ladder(g);
    TangentVanishing out;
    LimitEstimate lc = boundary_limit([&](const HalfPlanePoint& p) { return ops->point(q, p.x, p.y).value; }, hc, depths);
    out.crest_limit = lc.value;
    out.crest_converged = lc.converged;
    LimitEstimate lcc = boundary_limit(
        [&](const HalfPlanePoint& p) {
            cplx Q = 1.0 + ops->point(Qm1, p.x, p.y).value;
            return Q * std::conj(ops->point(dV, p.x, p.y).value);
        },
        hc, depths);
    out.crest_limit_conj = lcc.value;
    std::vector<double> away;
    const double qmax = std::max(sup(q), 1e-300);
    for (std::size_t j = 0; j < g.n; ++j) {
        double x = g.node(j);
        if (std::abs(x) > 0.5 * g.L || std::abs(x - hc) <= window) continue;
        away.push_back(std::abs(q[j]));
    }
    out.away_median = median(away);
    for (int k = 0; k < 16; ++k) {
        double x = -0.5 * g.L + (k + 0.5) * g.L / 16.0;
        std::size_t j = g.nearest(x);
        if (std::abs(g.node(j) - hc) <= window) continue;
        LimitEstimate e =
            boundary_limit([&](const HalfPlanePoint& p) { return ops->point(q, p.x, p.y).value; }, g.node(j), depths);
        out.away_max_rel = std::max(out.away_max_rel, std::abs(e.value - q[j]) / qmax);
    }
    for (double y : depths) {
        cvec row = ops->poisson(q, y);
        out.linf_bound = std::max(out.linf_bound, sup(row));
    }
    out.linf_bound = std::max(out.linf_bound, sup(q));
    return out;
}

PressureReport pressure_identities(const Frame& f, const std::vector<double>& crests, double window) {
    const WaveState& s = f.state;
    const Grid& g = s.grid();
    const double h = g.spacing;
    const std::size_t n = g.n;
    auto ops = LineOps::get(g);
    const cvec& V = s.Zt_bar.samples();
    cvec zap = s.Zap();
    cvec u(n), dV = ops->apply(V, Op::deriv), Qm1(n);
    for (std::size_t j = 0; j < n; ++j) {
        u[j] = std::norm(V[j]);
        Qm1[j] = 1.0 / zap[j] - 1.0;
    }
    // crest positions at time t follow the markers when present
    std::vector<double> hc;
    for (double c : crests) {
        double x = c;
        for (const auto& m : s.markers)
            if (std::abs(m.alpha0 - c) <= 1e-12 * std::max(1.0, std::abs(c))) x = m.h;
        hc.push_back(x);
    }
    auto in_window = [&](double x) {
        for (double c : hc)
            if (std::abs(x - c) <= window) return true;
        return false;
    };
    auto usable = [&](std::size_t j) { return j >= 2 && j + 2 < n && std::abs(g.node(j)) <= 0.5 * g.L; };

    std::map<int, PRow> rows;   // keyed by depth in units of h
    auto row = [&](int k) -> const PRow& {
        auto it = rows.find(k);
        if (it == rows.end()) it = rows.emplace(k, pressure_row(*ops, V, u, -k * h)).first;
        return it->second;
    };

    PressureReport out;
    out.window = window;
    // Laplacian at depth 8h against −2|F_{z'}|²
    out.laplacian_depth = -8.0 * h;
    {
        const PRow* r[5] = {&row(6), &row(7), &row(8), &row(9), &row(10)};
        cvec Fp = ops->poisson(dV, -8.0 * h);
        for (std::size_t j = 0; j < n; ++j) {
            if (!usable(j) || in_window(g.node(j))) continue;
            const cplx* p = r[2]->P.data() + j;
            double pxx = ((-p[-2] + 16.0 * p[-1] - 30.0 * p[0] + 16.0 * p[1] - p[2]) / (12.0 * h * h)).real();
            double pyy = ((-r[0]->P[j] + 16.0 * r[1]->P[j] - 30.0 * r[2]->P[j] + 16.0 * r[3]->P[j] - r[4]->P[j]) /
                          (12.0 * h * h)).real();
            out.laplacian_residual = std::max(out.laplacian_residual, std::abs(pxx + pyy + 2.0 * std::norm(Fp[j])));
        }
    }
    // (1/Ψ_{z'})(∂x − i∂y)𝔓 and G = (1/Ψ_{z'})∂_{z'}K*(|Z̄_t|²) on a depth ladder, extrapolated to y' = 0
    const int ks[4] = {16, 8, 4, 2};
    std::vector<cvec> gradP(4, cvec(n)), Gk(4, cvec(n));
    for (int a = 0; a < 4; ++a) {
        int k = ks[a];
        const PRow* r[5] = {&row(k - 2), &row(k - 1), &row(k), &row(k + 1), &row(k + 2)};
        cvec Q = ops->poisson(Qm1, -k * h);
        for (auto& v : Q) v += 1.0;
        for (std::size_t j = 2; j + 2 < n; ++j) {
            cplx px = d1(r[2]->P.data() + j, 1, h);
            // rows are ordered by increasing depth, so y decreases along r[]
            cplx py = -(r[0]->P[j] - 8.0 * r[1]->P[j] + 8.0 * r[3]->P[j] - r[4]->P[j]) / (12.0 * h);
            cplx ux = d1(r[2]->U.data() + j, 1, h);
            cplx uy = -(r[0]->U[j] - 8.0 * r[1]->U[j] + 8.0 * r[3]->U[j] - r[4]->U[j]) / (12.0 * h);
            gradP[a][j] = Q[j] * (px.real() - I1 * py.real());
            Gk[a][j] = Q[j] * 0.5 * (ux.real() - I1 * uy.real());
        }
        out.linf_bound = std::max(out.linf_bound, sup(mul(Q, ops->poisson(dV, -k * h))));
    }
    std::vector<std::size_t> crest_nodes;
    for (double c : hc) crest_nodes.push_back(g.nearest(c));
    double ys[4];
    for (int a = 0; a < 4; ++a) ys[a] = -ks[a] * h;
    for (std::size_t j = 0; j < n; ++j) {
        if (!usable(j)) continue;
        cplx sp[4] = {gradP[0][j], gradP[1][j], gradP[2][j], gradP[3][j]};
        cplx sg[4] = {Gk[0][j], Gk[1][j], Gk[2][j], Gk[3][j]};
        auto eP = neville0(ys, sp, 4);
        auto eG = neville0(ys, sg, 4);
        if (std::find(crest_nodes.begin(), crest_nodes.end(), j) != crest_nodes.end())
            out.crest_gradient = std::max(out.crest_gradient, std::abs(eP.first));
        cplx target = I1 * f.diag.A1[j].real() / zap[j];
        double rb = std::abs(eP.first - target);
        cplx Ztt = f.diag.Ztt_bar[j];
        double rg = std::abs(eG.first + (Ztt - I1) - std::conj(V[j]) * (dV[j] / zap[j]) + I1 / zap[j]);
        if (in_window(g.node(j))) {
            out.boundary_residual_crest = std::max(out.boundary_residual_crest, rb);
            continue;
        }
        if (std::abs(eP.first - eP.second) > 1e-3 || std::abs(eG.first - eG.second) > 1e-3) out.converged = false;
        out.boundary_residual = std::max(out.boundary_residual, rb);
        out.g_residual = std::max(out.g_residual, rg);
    }
    return out;
}

CuspEvolution cusp_evolution_check(const Trajectory& tr, double x0, double inner, double outer) {
    CuspEvolution out;
    if (tr.frames.empty()) return out;
    const WaveState& s0 = tr.frames.front().state;
    const Grid& g = s0.grid();
    std::vector<std::size_t> L, R;
    for (std::size_t k = 0; k < s0.markers.size(); ++k) {
        double d = s0.markers[k].alpha0 - x0;
        if (std::abs(d) < inner || std::abs(d) > outer) continue;
        (d < 0.0 ? L : R).push_back(k);
    }
    out.pairs = L.size() * R.size();
    std::vector<cplx> z0(s0.markers.size());
    for (std::size_t k = 0; k < z0.size(); ++k) z0[k] = interpolate(g, s0.base->Z, s0.markers[k].alpha0);
    for (const Frame& f : tr.frames) {
        cvec Z = f.state.Z();
        const auto& mk = f.state.markers;
        std::vector<cplx> z(mk.size());
        for (std::size_t k : L) z[k] = interpolate(g, Z, mk[k].h);
        for (std::size_t k : R) z[k] = interpolate(g, Z, mk[k].h);
        double lhs = 0.0, mr = 1e300;
        for (std::size_t a : L)
            for (std::size_t b : R) {
                double sq = std::sqrt(mk[b].alpha0 - mk[a].alpha0);
                double dt = std::abs(z[a] - z[b]), d0 = std::abs(z0[a] - z0[b]);
                lhs = std::max(lhs, std::abs(dt - d0) / sq);
                mr = std::min(mr, dt / sq);
            }
        out.t.push_back(f.state.t);
        out.max_lhs.push_back(lhs);
        out.min_ratio.push_back(out.pairs ? mr : 0.0);
        if (out.pairs && mr < 0.5) out.lower_bound_ok = false;
        if (f.state.t > 0.0) out.K = std::max(out.K, lhs / f.state.t);
        out.chord_arc.push_back(chord_arc_constant(g, Z));
    }
    return out;
}

std::vector<double> psi_window_integrals(const ConformalMap& m, const Grid& g, double x0, double delta,
                                         const std::vector<double>& depths) {
    std::vector<double> out;
    for (double y : depths) {
        auto r = m.row(g, y);
        double acc = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            double x = g.node(j);
            if (std::abs(x - x0) > delta) continue;
            double w = std::abs(std::abs(x - x0) - delta) < 0.5 * g.spacing ? 0.5 : 1.0;
            acc += w * std::norm(r->Zap[j]);
        }
        out.push_back(acc * g.spacing);
    }
    return out;
}

}  // namespace cwave
