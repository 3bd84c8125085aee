#include "cwave/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cwave/errors.hpp"
#include "cwave/line_ops.hpp"

namespace cwave {
namespace {

using Op = LineOps::Op;

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundaryField decaying(const Grid& g, cvec v) { return BoundaryField(g, std::move(v), DecayClass::decaying, kInf); }

double sup(const cvec& f) {
    double m = 0.0;
    for (const auto& v : f) m = std::max(m, std::abs(v));
    return m;
}

double l2(const Grid& g, const cvec& f) {
    double a = 0.0;
    for (const auto& v : f) a += std::norm(v);
    return std::sqrt(a * g.spacing);
}

bool finite(const cvec& f) {
    for (const auto& v : f)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

// ℍf = −i·H_std f.
cvec hilbert_of(const LineOps& ops, const cvec& f) {
    cvec h = ops.apply(f, Op::hilbert_std);
    for (auto& v : h) v *= cplx(0.0, -1.0);
    return h;
}

cvec a1_from(const LineOps& ops, const cvec& Zt, const cvec& absd_Zt) {
    cvec m2(Zt.size());
    for (std::size_t j = 0; j < Zt.size(); ++j) m2[j] = std::norm(Zt[j]);
    cvec dm2 = ops.apply(m2, Op::absd);
    cvec a(Zt.size());
    for (std::size_t j = 0; j < Zt.size(); ++j)
        a[j] = 1.0 + (std::conj(Zt[j]) * absd_Zt[j]).real() - 0.5 * dm2[j].real();
    return a;
}

void check_floor(const cvec& Zap, double floor) {
    for (const auto& v : Zap)
        if (!(std::abs(v) >= floor))
            throw StepRejected("|Z_ap| below floor: mollification too small for the grid");
}

cvec b_from(const LineOps& ops, const cvec& Zt, const cvec& Zap) {
    cvec q(Zt.size());
    for (std::size_t j = 0; j < q.size(); ++j) q[j] = Zt[j] / Zap[j];
    cvec hq = hilbert_of(ops, q);
    cvec b(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) b[j] = (q[j] - hq[j]).real();
    return b;
}

struct Eval {
    cvec Zap, Zt, A1, b, Ztt, dV_ap, w;   // w = Z_{t,α'}/Z_ap − b_{α'}
};

Eval evaluate(const InitialTrace& base, const cvec& D, const cvec& V, bool need_w, double floor) {
    const Grid& g = base.grid;
    auto ops = LineOps::get(g);
    Eval e;
    e.Zap = ops->apply(D, Op::deriv);
    for (std::size_t j = 0; j < g.n; ++j) e.Zap[j] += base.Zap[j];
    check_floor(e.Zap, floor);
    auto dv = ops->apply(V, {Op::deriv, Op::absd});
    e.dV_ap = std::move(dv[0]);
    e.Zt.resize(g.n);
    cvec absd_Zt(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        e.Zt[j] = std::conj(V[j]);
        absd_Zt[j] = std::conj(dv[1][j]);
    }
    e.A1 = a1_from(*ops, e.Zt, absd_Zt);
    e.b = b_from(*ops, e.Zt, e.Zap);
    e.Ztt.resize(g.n);
    for (std::size_t j = 0; j < g.n; ++j) e.Ztt[j] = cplx(0.0, 1.0) - cplx(0.0, 1.0) * e.A1[j] / e.Zap[j];
    if (need_w) {
        cvec bap = ops->apply(e.b, Op::deriv);
        e.w.resize(g.n);
        for (std::size_t j = 0; j < g.n; ++j) e.w[j] = std::conj(e.dV_ap[j]) / e.Zap[j] - bap[j].real();
    }
    return e;
}

struct Stage {
    cvec D, V;
    std::vector<Marker> m;
};

Rates rates_of(const InitialTrace& base, const Stage& s, double floor, Eval* keep) {
    Eval e = evaluate(base, s.D, s.V, !s.m.empty(), floor);
    const Grid& g = base.grid;
    Rates r;
    r.dD.resize(g.n);
    r.dV.resize(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        double b = e.b[j].real();
        r.dD[j] = e.Zt[j] - b * e.Zap[j];
        r.dV[j] = e.Ztt[j] - b * e.dV_ap[j];
    }
    for (const auto& w : e.w) r.w_sup = std::max(r.w_sup, std::abs(w));
    r.dm.resize(s.m.size());
    for (std::size_t k = 0; k < s.m.size(); ++k) {
        double h = s.m[k].h;
        cplx w = interpolate(g, e.w, h);
        r.dm[k] = Marker{0.0, interpolate(g, e.b, h).real(), w.imag(), w.real()};
    }
    if (keep) *keep = std::move(e);
    return r;
}

Stage combine(const Stage& s, double c, const Rates& r) {
    Stage o = s;
    for (std::size_t j = 0; j < o.D.size(); ++j) {
        o.D[j] += c * r.dD[j];
        o.V[j] += c * r.dV[j];
    }
    for (std::size_t k = 0; k < o.m.size(); ++k) {
        o.m[k].h += c * r.dm[k].h;
        o.m[k].phase += c * r.dm[k].phase;
        o.m[k].logmod += c * r.dm[k].logmod;
    }
    return o;
}

void check_markers(const Grid& g, const std::vector<Marker>& m) {
    const double lim = g.L - 4.0 * g.spacing;
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (!std::isfinite(m[k].h) || std::abs(m[k].h) > lim) {
            std::ostringstream os;
            os << "marker " << k << " (alpha0 = " << m[k].alpha0 << ") left the truncated domain";
            throw MarkerExit(os.str());
        }
        if (k > 0 && !(m[k].h > m[k - 1].h)) throw StepRejected("marker ordering lost");
    }
}

StepDiagnostics diag_from(const Grid& g, Eval& e) {
    StepDiagnostics d;
    d.A1 = BoundaryField(g, std::move(e.A1), DecayClass::constant_plus_decaying);
    d.b = decaying(g, std::move(e.b));
    d.Ztt_bar = decaying(g, std::move(e.Ztt));
    return d;
}

WaveState step_impl(const WaveState& s, double dt, const StepConfig& cfg, Rates* k1_out, StepDiagnostics* d_out) {
    const InitialTrace& base = *s.base;
    const Grid& g = base.grid;
    Stage y{s.D.samples(), s.Zt_bar.samples(), s.markers};
    Eval e0;
    Rates k1 = rates_of(base, y, cfg.zap_floor, d_out ? &e0 : nullptr);
    Rates k2 = rates_of(base, combine(y, 0.5 * dt, k1), cfg.zap_floor, nullptr);
    Rates k3 = rates_of(base, combine(y, 0.5 * dt, k2), cfg.zap_floor, nullptr);
    Rates k4 = rates_of(base, combine(y, dt, k3), cfg.zap_floor, nullptr);
    Stage o = y;
    const double c1 = dt / 6.0, c2 = dt / 3.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        o.D[j] += c1 * (k1.dD[j] + k4.dD[j]) + c2 * (k2.dD[j] + k3.dD[j]);
        o.V[j] += c1 * (k1.dV[j] + k4.dV[j]) + c2 * (k2.dV[j] + k3.dV[j]);
    }
    for (std::size_t k = 0; k < o.m.size(); ++k) {
        o.m[k].h += c1 * (k1.dm[k].h + k4.dm[k].h) + c2 * (k2.dm[k].h + k3.dm[k].h);
        o.m[k].phase += c1 * (k1.dm[k].phase + k4.dm[k].phase) + c2 * (k2.dm[k].phase + k3.dm[k].phase);
        o.m[k].logmod += c1 * (k1.dm[k].logmod + k4.dm[k].logmod) + c2 * (k2.dm[k].logmod + k3.dm[k].logmod);
    }
    if (!finite(o.D) || !finite(o.V)) throw StepRejected("non-finite state after step");
    check_markers(g, o.m);

    auto ops = LineOps::get(g);
    WaveState out;
    out.t = s.t + dt;
    out.eps = s.eps;
    out.base = s.base;
    out.markers = std::move(o.m);
    // P acts on the increment: the discrete projector is idempotent only to
    // ~1e-11, so projecting whole fields would add a step-count-dependent error.
    if (cfg.project) {
        cvec dv(g.n), dd(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            dv[j] = o.V[j] - y.V[j];
            dd[j] = o.D[j] - y.D[j];
        }
        cvec hv = hilbert_of(*ops, dv), hd = hilbert_of(*ops, dd);
        for (std::size_t j = 0; j < g.n; ++j) {
            o.V[j] = y.V[j] + 0.5 * (dv[j] + hv[j]);
            o.D[j] = y.D[j] + 0.5 * (dd[j] + hd[j]);
        }
    }
    {
        cvec hv = hilbert_of(*ops, o.V);
        double res = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) res = std::max(res, std::abs(0.5 * (o.V[j] - hv[j])));
        out.holo_residual = res;
        if (cfg.project && res > cfg.holo_ceiling) {
            std::ostringstream os;
            os << "holomorphic residual " << res << " exceeds ceiling " << cfg.holo_ceiling;
            throw StepRejected(os.str());
        }
    }
    out.D = decaying(g, std::move(o.D));
    out.Zt_bar = decaying(g, std::move(o.V));
    if (k1_out) *k1_out = std::move(k1);
    if (d_out) *d_out = diag_from(g, e0);
    return out;
}

StepDiagnostics diagnose(const WaveState& s, double floor) {
    Eval e = evaluate(*s.base, s.D.samples(), s.Zt_bar.samples(), false, floor);
    return diag_from(s.grid(), e);
}

}  // namespace

cvec WaveState::Z() const {
    cvec z = base->Z;
    for (std::size_t j = 0; j < z.size(); ++j) z[j] += D[j];
    return z;
}

BoundaryField WaveState::Z_dev() const {
    cvec z = Z();
    for (std::size_t j = 0; j < z.size(); ++j) z[j] -= grid().node(j);
    return BoundaryField(grid(), std::move(z), DecayClass::constant_plus_decaying);
}

cvec WaveState::Zap() const {
    auto ops = LineOps::get(grid());
    cvec z = ops->apply(D.samples(), Op::deriv);
    for (std::size_t j = 0; j < z.size(); ++j) z[j] += base->Zap[j];
    return z;
}

BoundaryField compute_A1(const BoundaryField& Zt) {
    if (Zt.decay_class() != DecayClass::decaying) throw IllPosedInput("compute_A1: Z_t must be decaying");
    auto ops = LineOps::get(Zt.grid());
    cvec d = ops->apply(Zt.samples(), Op::absd);
    return BoundaryField(Zt.grid(), a1_from(*ops, Zt.samples(), d), DecayClass::constant_plus_decaying);
}

BoundaryField compute_b(const BoundaryField& Zt, const BoundaryField& Z_ap, double floor) {
    if (Zt.decay_class() != DecayClass::decaying) throw IllPosedInput("compute_b: Z_t must be decaying");
    check_floor(Z_ap.samples(), floor);
    auto ops = LineOps::get(Zt.grid());
    return decaying(Zt.grid(), b_from(*ops, Zt.samples(), Z_ap.samples()));
}

BoundaryField compute_Ztt_bar(const BoundaryField& Z_ap, const BoundaryField& A1, double floor) {
    check_floor(Z_ap.samples(), floor);
    cvec z(Z_ap.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = cplx(0.0, 1.0) - cplx(0.0, 1.0) * A1[j].real() / Z_ap[j];
    return decaying(Z_ap.grid(), std::move(z));
}

WaveState mollify_initial(const ConformalMap& map, const VelocityProfile& vel, double eps, const Grid& g,
                          const std::vector<double>& marker_alphas, double holo_ceiling) {
    if (!(eps > 0.0 && eps <= 1.0)) throw IllPosedInput("mollification level must lie in (0, 1]");
    auto row = map.row(g, -eps);
    auto base = std::make_shared<InitialTrace>();
    base->grid = g;
    base->eps = eps;
    base->Z = row->Z;
    base->Zap = row->Zap;
    if (!finite(base->Z) || !finite(base->Zap)) throw GeometryRejected("map evaluation failed below the boundary");
    cvec v(g.n);
    for (std::size_t j = 0; j < g.n; ++j) v[j] = vel.F(cplx(g.node(j), -eps));
    WaveState s;
    s.t = 0.0;
    s.eps = eps;
    s.D = decaying(g, cvec(g.n, 0.0));
    s.Zt_bar = BoundaryField(g, std::move(v));
    s.holo_residual = holomorphic_residual(s.Zt_bar);
    if (s.holo_residual > holo_ceiling) throw IllPosedInput("initial velocity is not a holomorphic trace");
    s.base = std::move(base);
    std::vector<double> a = marker_alphas;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    for (double x : a) s.markers.push_back(Marker{x, x, 0.0, 0.0});
    check_markers(g, s.markers);
    return s;
}

Rates rhs(const WaveState& s, StepDiagnostics* diag, double floor) {
    Stage y{s.D.samples(), s.Zt_bar.samples(), s.markers};
    Eval e;
    Rates r = rates_of(*s.base, y, floor, &e);
    if (diag) *diag = diag_from(s.grid(), e);
    return r;
}

WaveState step_rk4(const WaveState& s, double dt, const StepConfig& cfg) {
    return step_impl(s, dt, cfg, nullptr, nullptr);
}

std::vector<Marker> advance_markers(const std::vector<Marker>& m, const BoundaryField& b, double dt) {
    std::vector<Marker> out = m;
    for (auto& k : out) k.h += dt * interpolate(b.grid(), b.samples(), k.h).real();
    check_markers(b.grid(), out);
    return out;
}

const std::array<const char*, 7>& monitor_names() {
    static const std::array<const char*, 7> n = {"Ztbar_ap_L2", "d_inv_Zap_L2", "A1_inf",  "b_ap_inf",
                                                 "Zt_inf",      "inv_Zap_inf",  "d_Zt_ap_over_Zap2_L2"};
    return n;
}

Monitors compute_monitors(const WaveState& s, const StepDiagnostics& d) {
    const Grid& g = s.grid();
    auto ops = LineOps::get(g);
    cvec Zap = s.Zap();
    cvec dV = ops->apply(s.Zt_bar.samples(), Op::deriv);
    cvec inv(g.n), q(g.n);
    double inv_sup = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        cplx r = 1.0 / Zap[j];
        inv[j] = r - 1.0;
        inv_sup = std::max(inv_sup, std::abs(r));
        q[j] = std::conj(dV[j]) * r * r;
    }
    Monitors m{};
    m[0] = l2(g, dV);
    m[1] = l2(g, ops->apply(inv, Op::deriv));
    m[2] = d.A1.sup_norm();
    m[3] = sup(ops->apply(d.b.samples(), Op::deriv));
    m[4] = s.Zt_bar.sup_norm();
    m[5] = inv_sup;
    m[6] = l2(g, ops->apply(q, Op::deriv));
    return m;
}

Trajectory run(const WaveState& init, const RunConfig& cfg, const std::function<void(const Frame&)>& on_frame) {
    if (!(cfg.dt > 0.0)) throw IllPosedInput("time step must be positive");
    if (!(cfg.tmax >= 0.0)) throw IllPosedInput("tmax must be non-negative");
    if (cfg.output_every < 1) throw IllPosedInput("output cadence must be >= 1");
    Trajectory tr;
    const long nsteps = cfg.tmax > 0.0 ? static_cast<long>(std::ceil(cfg.tmax / cfg.dt - 1e-9)) : 0;
    const double dt0 = nsteps > 0 ? cfg.tmax / static_cast<double>(nsteps) : cfg.dt;
    const long unit = 1L << cfg.max_halvings;   // ticks per base step
    const long total = nsteps * unit, cadence = static_cast<long>(cfg.output_every) * unit;
    tr.dt_initial = tr.dt_final = dt0;

    auto emit = [&](Frame f) {
        if (on_frame) on_frame(f);
        tr.frames.push_back(std::move(f));
    };
    Frame f0{init, diagnose(init, cfg.step.zap_floor), {}};
    f0.monitors = compute_monitors(f0.state, f0.diag);
    for (std::size_t k = 0; k < 7; ++k) tr.baseline[k] = std::max(f0.monitors[k], 1.0);
    emit(f0);

    WaveState cur = init;
    double rate_sup = 0.0;
    long tick = 0;
    int level = 0;
    while (tick < total) {
        const double dt = std::ldexp(dt0, -level);
        Rates k1;
        WaveState nxt;
        try {
            nxt = step_impl(cur, dt, cfg.step, &k1, nullptr);
        } catch (const StepRejected& e) {
            ++tr.rejections;
            std::ostringstream os;
            os << "t = " << cur.t << ": step rejected (" << e.what() << ")";
            if (level >= cfg.max_halvings) {
                os << "; halving limit reached";
                tr.log.push_back(os.str());
                tr.stop_reason = std::string("rejection cascade: ") + e.what();
                break;
            }
            ++level;
            os << "; dt halved to " << std::ldexp(dt0, -level);
            tr.log.push_back(os.str());
            tr.dt_final = std::ldexp(dt0, -level);
            continue;
        } catch (const MarkerExit& e) {
            tr.stop_reason = e.what();
            tr.log.push_back(std::string("t = ") + std::to_string(cur.t) + ": " + e.what());
            break;
        }
        tick += unit >> level;
        rate_sup = std::max(rate_sup, k1.w_sup);
        nxt.t = static_cast<double>(tick) / static_cast<double>(unit) * dt0;
        bool out = (tick % cadence == 0) || tick == total;
        if (out) {
            Frame f{nxt, diagnose(nxt, cfg.step.zap_floor), {}};
            double r = 0.0;
            const cvec& a = cur.Zt_bar.samples();
            const cvec& b = nxt.Zt_bar.samples();
            for (std::size_t j = 0; j < a.size(); ++j) r = std::max(r, std::abs((b[j] - a[j]) / dt - k1.dV[j]));
            f.diag.dt_used = dt;
            f.diag.euler_residual = r;
            f.rate_sup = rate_sup;
            f.monitors = compute_monitors(f.state, f.diag);
            bool blow = false;
            for (std::size_t k = 0; k < 7; ++k)
                if (!(f.monitors[k] <= cfg.monitor_ceiling * tr.baseline[k])) {
                    blow = true;
                    std::ostringstream os;
                    os << "monitor " << monitor_names()[k] << " = " << f.monitors[k] << " exceeds "
                       << cfg.monitor_ceiling << " x baseline " << tr.baseline[k];
                    tr.stop_reason = os.str();
                }
            emit(std::move(f));
            if (blow) {
                tr.blowup = true;
                tr.log.push_back("t = " + std::to_string(nxt.t) + ": " + tr.stop_reason);
                break;
            }
        }
        cur = std::move(nxt);
    }
    tr.completed = tick >= total && !tr.blowup;
    return tr;
}

}  // namespace cwave
