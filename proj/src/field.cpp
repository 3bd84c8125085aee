#include <limits>
#include "cwave/field.hpp"

#include <algorithm>
#include <cmath>

#include "cwave/errors.hpp"
#include "cwave/kernels.hpp"
#include "cwave/line_ops.hpp"

namespace cwave {
namespace {

void require_decaying(const BoundaryField& f, const char* what) {
    if (f.decay_class() != DecayClass::decaying)
        throw IllPosedInput(std::string(what) + ": input field is not decaying");
}

// Linear images of a decaying field decay; no tail check on the result.
BoundaryField classified(const Grid& g, cvec v) {
    return BoundaryField(g, std::move(v), DecayClass::decaying, std::numeric_limits<double>::infinity());
}

}  // namespace

BoundaryField hilbert(const BoundaryField& f) {
    require_decaying(f, "hilbert");
    auto ops = LineOps::get(f.grid());
    cvec h = ops->apply(f.samples(), LineOps::Op::hilbert_std);
    const cplx mi(0.0, -1.0);
    for (auto& v : h) v *= mi;
    return classified(f.grid(), std::move(h));
}

BoundaryField holomorphic_projection(const BoundaryField& f) {
    BoundaryField h = hilbert(f);
    cvec p(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) p[j] = 0.5 * (f[j] + h[j]);
    return classified(f.grid(), std::move(p));
}

double holomorphic_residual(const BoundaryField& f) {
    BoundaryField h = hilbert(f);
    double r = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) r = std::max(r, std::abs(0.5 * (f[j] - h[j])));
    return r;
}

BoundaryField poisson_extend(const BoundaryField& f, double y) {
    if (y > 0.0) throw IllPosedInput("poisson_extend: depth must satisfy y <= 0");
    if (y == 0.0) return f;
    auto ops = LineOps::get(f.grid());
    if (f.decay_class() == DecayClass::decaying) {
        require_decaying(f, "poisson_extend");
        return classified(f.grid(), ops->poisson(f.samples(), y));
    }
    const cvec& s = f.samples();
    cplx c = 0.5 * (s.front() + s.back());
    cvec r(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) r[j] = s[j] - c;
    if (!tail_ok(r) && std::abs(s.front() - s.back()) > kTailFraction * f.sup_norm())
        throw IllPosedInput("poisson_extend: end values differ; not constant plus decaying");
    cvec u = ops->poisson(r, y);
    for (auto& v : u) v += c;
    return classified(f.grid(), std::move(u));
}

cplx holo_derivative(const BoundaryField& f, const HalfPlanePoint& p) {
    if (!(p.y < 0.0)) throw IllPosedInput("holo_derivative: point must lie in the open half-plane");
    require_decaying(f, "holo_derivative");
    double res = holomorphic_residual(f);
    double scale = std::max(1.0, f.sup_norm());
    if (res > 1e-6 * scale) throw IllPosedInput("holo_derivative: field is not a holomorphic trace");
    auto ops = LineOps::get(f.grid());
    return ops->point(f.samples(), p.x, p.y).dx;
}

BoundaryField derivative(const BoundaryField& f) {
    require_decaying(f, "derivative");
    auto ops = LineOps::get(f.grid());
    return classified(f.grid(), ops->apply(f.samples(), LineOps::Op::deriv));
}

BoundaryField abs_derivative(const BoundaryField& f) {
    require_decaying(f, "abs_derivative");
    auto ops = LineOps::get(f.grid());
    return classified(f.grid(), ops->apply(f.samples(), LineOps::Op::absd));
}

double sobolev_half_seminorm_sq(const BoundaryField& f) {
    require_decaying(f, "sobolev_half_seminorm");
    auto ops = LineOps::get(f.grid());
    cvec d = ops->apply(f.samples(), LineOps::Op::absd);
    return std::max(0.0, f.grid().spacing * kernels::dot_re(f.samples().data(), d.data(), f.size()));
}

double sobolev_half_seminorm(const BoundaryField& f) { return std::sqrt(sobolev_half_seminorm_sq(f)); }

std::vector<double> default_depth_ladder(const Grid& g) {
    std::vector<double> d;
    for (int k = 0; k <= 6; ++k) d.push_back(-std::ldexp(8.0 * g.spacing, -k));
    return d;
}

LimitEstimate extrapolate_ladder(const std::vector<cplx>& v) {
    if (v.size() < 3) throw IllPosedInput("boundary_limit: at least three depths are required");
    LimitEstimate out;
    out.samples = v;
    double scale = 0.0;
    for (const auto& s : v) scale = std::max(scale, std::abs(s));
    const double floor = 1e-13 * std::max(1.0, scale);
    std::vector<cplx> d;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) d.push_back(v[k + 1] - v[k]);
    bool ok = true;
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        double a = std::abs(d[k]), b = std::abs(d[k + 1]);
        if (b <= floor) continue;
        if (a < kContraction * b) ok = false;
    }
    out.converged = ok;
    out.value = v.back();
    out.error = std::abs(d.back());
    if (!ok) return out;
    // Iterated Aitken Δ²: each pass removes the leading geometric mode.
    std::vector<cplx> cur = v;
    cplx prev_best = v.back();
    while (cur.size() >= 3) {
        std::vector<cplx> nxt;
        for (std::size_t k = 0; k + 2 < cur.size(); ++k) {
            cplx d0 = cur[k + 1] - cur[k], d1 = cur[k + 2] - cur[k + 1];
            cplx den = d1 - d0;
            if (std::abs(d1) <= floor || std::abs(den) <= floor) nxt.push_back(cur[k + 2]);
            else nxt.push_back(cur[k + 2] - d1 * d1 / den);
        }
        prev_best = cur.back();
        cur = std::move(nxt);
    }
    out.value = cur.back();
    out.error = std::max(std::abs(cur.back() - prev_best), 1e-16 * std::max(1.0, scale));
    return out;
}

LimitEstimate boundary_limit(const std::function<cplx(const HalfPlanePoint&)>& f, double alpha0,
                             const std::vector<double>& depths) {
    if (depths.size() < 3) throw IllPosedInput("boundary_limit: at least three depths are required");
    for (std::size_t k = 0; k < depths.size(); ++k) {
        if (!(depths[k] < 0.0)) throw IllPosedInput("boundary_limit: depths must be negative");
        if (k > 0 && !(std::abs(depths[k]) < std::abs(depths[k - 1])))
            throw IllPosedInput("boundary_limit: depths must approach the boundary");
    }
    std::vector<cplx> v;
    v.reserve(depths.size());
    for (double y : depths) v.push_back(f(HalfPlanePoint(alpha0, y)));
    return extrapolate_ladder(v);
}

}  // namespace cwave
