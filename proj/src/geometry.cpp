#include "cwave/geometry.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include "cwave/errors.hpp"
#include "cwave/kernels.hpp"

namespace cwave {

namespace {

const cplx I1(0.0, 1.0);

using boost::math::quadrature::gauss_kronrod;

template <class F>
cplx gk_line(const F& f, cplx a, cplx b) {
    const cplx d = b - a;
    auto g = [&](double t) { return f(a + t * d) * d; };
    return gauss_kronrod<double, 15>::integrate(g, 0.0, 1.0, 12, 1e-15);
}

template <class F>
cplx ts_line(const F& f, cplx a, cplx b) {
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    const cplx d = b - a;
    // tc is the distance to the nearer endpoint, exact near a singular end.
    auto g = [&](double t, double tc) { return f(t < 0.5 ? a + t * d : b - tc * d) * d; };
    auto re = [&](double t, double tc) { return g(t, tc).real(); };
    auto im = [&](double t, double tc) { return g(t, tc).imag(); };
    return {ts.integrate(re, 0.0, 1.0, 1e-14), ts.integrate(im, 0.0, 1.0, 1e-14)};
}

Jet4 mobius(const Jet4& z, double x0, double R) {
    Jet4 u = z - cplx(x0, 0.0);
    return u / (u - cplx(0.0, R));
}

Jet4 factor_jet(const MapFactor& f, const Jet4& z) {
    Jet4 m = mobius(z, f.x0, f.R);
    if (f.kind == MapKind::corner) return pow(m, f.nu - 1.0);
    Jet4 l = cplx(f.c, 0.0) - log(m);
    return cplx(f.c * f.c, 0.0) / (m * l * l);
}

cplx mobius(cplx z, double x0, double R) { return (z - x0) / (z - x0 - cplx(0.0, R)); }

// Ψ = G + ∫H for a single factor; both stay finite at the singular point.
cplx byparts_G(const MapFactor& f, cplx z) {
    cplx m = mobius(z, f.x0, f.R);
    if (m == 0.0) return 0.0;
    cplx q = (m - 1.0) * (m - 1.0);
    if (f.kind == MapKind::corner) return cplx(0.0, -f.R / f.nu) * std::pow(m, f.nu) / q;
    return cplx(0.0, -f.R * f.c * f.c) / ((f.c - std::log(m)) * q);
}

cplx byparts_H(const MapFactor& f, cplx z) {
    cplx m = mobius(z, f.x0, f.R);
    if (m == 0.0) return 0.0;
    if (f.kind == MapKind::corner) return (2.0 / f.nu) * std::pow(m, f.nu) / (m - 1.0);
    return 2.0 * f.c * f.c / ((f.c - std::log(m)) * (m - 1.0));
}

}  // namespace

const char* map_kind_name(MapKind k) {
    switch (k) {
        case MapKind::flat: return "flat";
        case MapKind::bump: return "bump";
        case MapKind::corner: return "corner";
        case MapKind::cusp: return "cusp";
    }
    return "?";
}

struct ConformalMap::Cache {
    std::mutex mu;
    std::map<std::tuple<double, std::size_t, double>, std::shared_ptr<const Row>> rows;
};

Jet4 ConformalMap::dpsi_jet(cplx z) const {
    Jet4 zj = Jet4::variable(z);
    switch (kind_) {
        case MapKind::flat: return Jet4::constant(1.0);
        case MapKind::bump: {
            Jet4 u = zj - cplx(bx0_, w_);
            return cplx(1.0, 0.0) - cplx(a_ * w_, 0.0) / (u * u);
        }
        default: {
            Jet4 r = Jet4::constant(1.0);
            for (const auto& f : factors_) r = r * factor_jet(f, zj);
            return r;
        }
    }
}

cplx ConformalMap::dpsi(cplx z) const {
    switch (kind_) {
        case MapKind::flat: return 1.0;
        case MapKind::bump: {
            cplx u = z - cplx(bx0_, w_);
            return 1.0 - a_ * w_ / (u * u);
        }
        default: {
            cplx r = 1.0;
            for (const auto& f : factors_) {
                cplx m = mobius(z, f.x0, f.R);
                if (f.kind == MapKind::corner) r *= std::pow(m, f.nu - 1.0);
                else {
                    cplx l = f.c - std::log(m);
                    r *= f.c * f.c / (m * l * l);
                }
            }
            return r;
        }
    }
}

cplx ConformalMap::psi_segment(cplx a, cplx b) const {
    auto dp = [this](cplx z) { return dpsi(z); };
    bool near = false;
    for (const auto& f : factors_) {
        double ra = std::abs(a - f.x0), rb = std::abs(b - f.x0);
        if (std::min(ra, rb) < 0.25 * f.R) near = true;
    }
    if (!near) return gk_line(dp, a, b);
    if (factors_.size() == 1) {
        const MapFactor& f = factors_.front();
        auto h = [&f](cplx z) { return byparts_H(f, z); };
        return byparts_G(f, b) - byparts_G(f, a) + ts_line(h, a, b);
    }
    return ts_line(dp, a, b);
}

cplx ConformalMap::psi_real_cell(double a, double b) const {
    // Split at singular points inside the cell so they sit at endpoints.
    std::vector<double> cuts{a};
    for (const auto& f : factors_)
        if (f.x0 > a && f.x0 < b) cuts.push_back(f.x0);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cplx s = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) s += psi_segment(cuts[k], cuts[k + 1]);
    return s;
}

cplx ConformalMap::psi(cplx z) const {
    if (z.imag() > 0.0) throw IllPosedInput("psi: point above the boundary");
    if (kind_ == MapKind::flat) return z;
    if (kind_ == MapKind::bump) return z + a_ * w_ / (z - cplx(bx0_, w_));
    cplx corner(z.real(), base_.imag());
    return base_ + psi_segment(base_, corner) + psi_segment(corner, z);
}

std::shared_ptr<const ConformalMap::Row> ConformalMap::row(const Grid& g, double y) const {
    if (y > 0.0) throw IllPosedInput("row: depth must satisfy y <= 0");
    auto key = std::make_tuple(g.L, g.n, y);
    if (cache_) {
        std::lock_guard<std::mutex> lk(cache_->mu);
        auto it = cache_->rows.find(key);
        if (it != cache_->rows.end()) return it->second;
    }
    auto r = std::make_shared<Row>();
    r->y = y;
    r->Z.resize(g.n);
    r->Zap.resize(g.n);
    for (std::size_t j = 0; j < g.n; ++j) r->Zap[j] = dpsi(cplx(g.node(j), y));
    if (kind_ == MapKind::flat || kind_ == MapKind::bump) {
        for (std::size_t j = 0; j < g.n; ++j) r->Z[j] = psi(cplx(g.node(j), y));
    } else {
        cplx acc = psi(cplx(g.node(0), y));
        r->Z[0] = acc;
        for (std::size_t j = 0; j + 1 < g.n; ++j) {
            double a = g.node(j), b = g.node(j + 1);
            acc += (y == 0.0) ? psi_real_cell(a, b) : psi_segment(cplx(a, y), cplx(b, y));
            r->Z[j + 1] = acc;
        }
    }
    std::shared_ptr<const Row> out = r;
    if (cache_) {
        std::lock_guard<std::mutex> lk(cache_->mu);
        cache_->rows.emplace(key, out);
    }
    return out;
}

std::vector<SingularPoint> ConformalMap::singular_points() const {
    std::vector<SingularPoint> s;
    for (const auto& f : factors_) {
        if (f.kind == MapKind::corner && f.nu == 1.0) continue;
        s.push_back({f.x0, f.kind, f.kind == MapKind::corner ? f.nu : 0.0, -1});
    }
    return s;
}

ConformalMap build_flat_map() {
    ConformalMap m;
    m.kind_ = MapKind::flat;
    m.cache_ = std::make_shared<ConformalMap::Cache>();
    return m;
}

ConformalMap build_bump_map(double a, double w, double x0) {
    if (!(w > 0.0)) throw GeometryRejected("bump width must be positive");
    if (!(a >= 0.0) || !(a < w)) throw GeometryRejected("bump amplitude too large: Re Psi' <= 0 somewhere");
    if (a == 0.0) return build_flat_map();
    ConformalMap m;
    m.kind_ = MapKind::bump;
    m.a_ = a;
    m.w_ = w;
    m.bx0_ = x0;
    m.base_ = cplx(x0, -w);
    m.cache_ = std::make_shared<ConformalMap::Cache>();
    return m;
}

ConformalMap build_product_map(std::vector<MapFactor> factors, bool allow_inadmissible) {
    if (factors.empty()) return build_flat_map();
    double Rmax = 0.0;
    for (const auto& f : factors) {
        if (!(f.R > 0.0)) throw GeometryRejected("Mobius scale R must be positive");
        if (f.kind == MapKind::corner) {
            if (f.nu == 1.0) continue;
            if (!(f.nu > 0.0) || !(f.nu < 1.0)) throw GeometryRejected("corner exponent must lie in (0, 1)");
            if (!(f.nu < 0.5) && !allow_inadmissible) throw GeometryRejected("energy-inadmissible corner");
        } else if (f.kind == MapKind::cusp) {
            if (!(f.c >= 2.0)) throw GeometryRejected("cusp offset c must be >= 2");
        } else {
            throw GeometryRejected("product factors must be corner or cusp");
        }
        Rmax = std::max(Rmax, f.R);
    }
    std::sort(factors.begin(), factors.end(), [](const MapFactor& a, const MapFactor& b) { return a.x0 < b.x0; });
    for (std::size_t k = 1; k < factors.size(); ++k)
        if (factors[k].x0 - factors[k - 1].x0 < 4.0 * Rmax)
            throw GeometryRejected("singular points closer than 4R");
    ConformalMap m;
    bool all_flat = std::all_of(factors.begin(), factors.end(),
                                [](const MapFactor& f) { return f.kind == MapKind::corner && f.nu == 1.0; });
    if (all_flat) return build_flat_map();
    m.kind_ = factors.size() == 1 ? factors.front().kind : MapKind::corner;
    for (const auto& f : factors)
        if (f.kind == MapKind::cusp) m.kind_ = MapKind::cusp;
    m.factors_ = std::move(factors);
    m.base_ = m.factors_.size() == 1 ? cplx(m.factors_.front().x0, -Rmax) : cplx(0.0, -Rmax);
    m.cache_ = std::make_shared<ConformalMap::Cache>();
    return m;
}

ConformalMap build_corner_map(double nu, double x0, double R, bool allow_inadmissible) {
    if (!(nu > 0.0) || nu > 1.0) throw GeometryRejected("corner exponent must lie in (0, 1]");
    if (!(nu < 0.5) && nu < 1.0 && !allow_inadmissible) throw GeometryRejected("energy-inadmissible corner");
    MapFactor f;
    f.kind = MapKind::corner;
    f.nu = nu;
    f.x0 = x0;
    f.R = R;
    return build_product_map({f}, true);
}

ConformalMap build_cusp_map(double x0, double R, double c) {
    MapFactor f;
    f.kind = MapKind::cusp;
    f.x0 = x0;
    f.R = R;
    f.c = c;
    return build_product_map({f}, false);
}

namespace {

std::vector<double> log_depths(double ymin, double ymax, int samples) {
    std::vector<double> y(samples);
    double a = std::log(ymin), b = std::log(ymax);
    for (int k = 0; k < samples; ++k) y[k] = std::exp(a + (b - a) * k / (samples - 1));
    return y;
}

}  // namespace

double fit_corner_exponent(const ConformalMap& m, double x0, double ymin, double ymax, int samples) {
    auto ys = log_depths(ymin, ymax, samples);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double y : ys) {
        double lx = std::log(y);
        double ly = std::log(1.0 / std::abs(m.dpsi(cplx(x0, -y))));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(ys.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

CuspFit fit_cusp_model(const ConformalMap& m, double x0, double ymin, double ymax, int samples) {
    auto ys = log_depths(ymin, ymax, samples);
    std::vector<double> target(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) target[k] = std::log(1.0 / std::abs(m.dpsi(cplx(x0, -ys[k]))));
    auto evaluate = [&](double ly0, double& logA) {
        std::vector<double> base(ys.size());
        double mean = 0.0;
        for (std::size_t k = 0; k < ys.size(); ++k) {
            double l = std::log(ys[k]) - ly0;
            base[k] = std::log(ys[k]) + 2.0 * std::log(std::abs(l));
            mean += target[k] - base[k];
        }
        mean /= static_cast<double>(ys.size());
        double worst = 0.0;
        for (std::size_t k = 0; k < ys.size(); ++k)
            worst = std::max(worst, std::abs(target[k] - base[k] - mean));
        logA = mean;
        return worst;
    };
    // Golden-section search on log y₀ over y₀ ∈ (e·ymax, 1e6·ymax).
    double lo = std::log(ymax) + 1.0, hi = std::log(ymax) + std::log(1e6);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double dummy;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = evaluate(c, dummy), fd = evaluate(d, dummy);
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = evaluate(c, dummy);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = evaluate(d, dummy);
        }
    }
    CuspFit out;
    double logA;
    double ly0 = 0.5 * (lo + hi);
    out.max_log_residual = evaluate(ly0, logA);
    out.amplitude = std::exp(logA);
    out.y0 = std::exp(ly0);
    return out;
}

TangentFit corner_tangents(const ConformalMap& m, const Grid& g, double x0) {
    auto row = m.row(g, 0.0);
    std::size_t c = g.nearest(x0);
    auto side = [&](int dir) {
        std::vector<double> d, a;
        double prev = 0.0;
        for (int k = 4; k < 20; ++k) {
            long j = static_cast<long>(c) + dir * k;
            if (j < 0 || j >= static_cast<long>(g.n)) break;
            double ang = std::arg(row->Zap[static_cast<std::size_t>(j)]);
            if (!d.empty()) ang = prev + std::remainder(ang - prev, 2.0 * M_PI);
            prev = ang;
            d.push_back(std::abs(g.node(static_cast<std::size_t>(j)) - x0));
            a.push_back(ang);
        }
        double n = static_cast<double>(d.size());
        double sx = std::accumulate(d.begin(), d.end(), 0.0), sy = std::accumulate(a.begin(), a.end(), 0.0);
        double sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            sxx += d[k] * d[k];
            sxy += d[k] * a[k];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        return (sy - slope * sx) / n;
    };
    TangentFit t;
    t.left = side(-1);
    t.right = side(+1);
    t.interior_angle = M_PI + std::remainder(t.right - t.left, 2.0 * M_PI);
    return t;
}

namespace {

double orient(cplx a, cplx b, cplx c) { return (b - a).real() * (c - a).imag() - (b - a).imag() * (c - a).real(); }

bool on_segment(cplx a, cplx b, cplx p) {
    return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
    double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
    double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

}  // namespace

JordanResult validate_jordan(const Grid& g, const cvec& Z) {
    JordanResult res;
    const std::size_t ns = Z.size() < 2 ? 0 : Z.size() - 1;
    for (const auto& z : Z)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw IllPosedInput("validate_jordan: non-finite sample");
    // Sweep over segments ordered by their left x-extent.
    std::vector<std::size_t> order(ns);
    std::iota(order.begin(), order.end(), 0);
    auto xmin = [&](std::size_t s) { return std::min(Z[s].real(), Z[s + 1].real()); };
    auto xmax = [&](std::size_t s) { return std::max(Z[s].real(), Z[s + 1].real()); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xmin(a) < xmin(b); });
    std::vector<std::size_t> active;
    bool found = false;
    std::size_t bi = 0, bj = 0;
    for (std::size_t s : order) {
        double x0 = xmin(s);
        active.erase(std::remove_if(active.begin(), active.end(), [&](std::size_t a) { return xmax(a) < x0; }),
                     active.end());
        double ylo = std::min(Z[s].imag(), Z[s + 1].imag()), yhi = std::max(Z[s].imag(), Z[s + 1].imag());
        for (std::size_t a : active) {
            std::size_t lo = std::min(a, s), hi = std::max(a, s);
            if (hi == lo + 1) continue;   // neighbours share a vertex
            double alo = std::min(Z[a].imag(), Z[a + 1].imag()), ahi = std::max(Z[a].imag(), Z[a + 1].imag());
            if (ahi < ylo || alo > yhi) continue;
            if (segments_cross(Z[s], Z[s + 1], Z[a], Z[a + 1])) {
                if (!found || std::make_pair(lo, hi) < std::make_pair(bi, bj)) {
                    bi = lo;
                    bj = hi;
                }
                found = true;
            }
        }
        active.push_back(s);
    }
    if (found) {
        res.simple = false;
        res.i = bi;
        res.j = bj;
        res.alpha_i = g.node(bi);
        res.alpha_j = g.node(bj);
    }
    return res;
}

JordanResult validate_jordan(const BoundaryField& Z) { return validate_jordan(Z.grid(), Z.samples()); }

double chord_arc_constant(const Grid& g, const cvec& Z) {
    (void)g;
    const std::size_t n = Z.size();
    std::vector<double> zr(n), zi(n), s(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        zr[j] = Z[j].real();
        zi[j] = Z[j].imag();
        if (j > 0) s[j] = s[j - 1] + std::abs(Z[j] - Z[j - 1]);
    }
    const double floor = 1e-14 * std::max(1.0, s.back());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i)
        best = std::min(best, kernels::chord_arc_row(zr.data(), zi.data(), s.data(), i, n, floor));
    return std::isfinite(best) ? std::min(1.0, std::sqrt(best)) : 1.0;
}

double chord_arc_constant(const BoundaryField& Z) { return chord_arc_constant(Z.grid(), Z.samples()); }

SeparationResult cusp_separation_check(const Grid& g, const cvec& Z, double x0, double inner, double outer,
                                       double K) {
    SeparationResult r;
    r.min_ratio = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> left, right;
    for (std::size_t j = 0; j < g.n; ++j) {
        double d = g.node(j) - x0;
        if (-d >= inner && -d <= outer) left.push_back(j);
        if (d >= inner && d <= outer) right.push_back(j);
    }
    for (std::size_t a : left)
        for (std::size_t b : right) {
            double sep = std::sqrt(g.node(b) - g.node(a));
            double chord = std::abs(Z[b] - Z[a]);
            r.worst_K = std::max(r.worst_K, sep / chord);
            r.min_ratio = std::min(r.min_ratio, chord / sep);
            ++r.pairs;
        }
    r.ok = r.pairs > 0 && r.worst_K <= K;
    return r;
}

Jet4 VelocityProfile::jet(cplx z) const {
    if (kind == VelocityKind::zero || mu == 0.0) return Jet4::constant(0.0);
    Jet4 u = Jet4::variable(z) - I1;
    return cplx(mu, 0.0) * ipow(I1 / u, k);
}

cplx VelocityProfile::F(cplx z) const {
    if (kind == VelocityKind::zero || mu == 0.0) return 0.0;
    return mu * std::pow(I1 / (z - I1), k);
}

VelocityField build_velocity(const VelocityProfile& v, const Grid& g) {
    if (v.kind == VelocityKind::pole && v.k < 2) throw GeometryRejected("velocity pole order must be >= 2");
    cvec s(g.n);
    for (std::size_t j = 0; j < g.n; ++j) s[j] = v.F(cplx(g.node(j), 0.0));
    VelocityField out;
    out.trace = BoundaryField(g, std::move(s));
    out.holo_residual = holomorphic_residual(out.trace);
    out.depths.push_back(0.0);
    for (int k = 0; k < 11; ++k) out.depths.push_back(-std::ldexp(1.0, -k));
    std::sort(out.depths.begin(), out.depths.end());
    for (double y : out.depths) {
        double acc = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            Jet4 f = v.jet(cplx(g.node(j), y));
            for (int d = 0; d <= 3; ++d) acc += std::norm(f.d(d));
        }
        out.h3_norms.push_back(std::sqrt(acc * g.spacing));
    }
    out.h3_sup = *std::max_element(out.h3_norms.begin(), out.h3_norms.end());
    return out;
}

}  // namespace cwave
