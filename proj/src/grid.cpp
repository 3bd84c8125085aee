#include "cwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cwave/errors.hpp"

namespace cwave {

Grid::Grid(double half_width, std::size_t nodes) : L(half_width), n(nodes) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw IllPosedInput("grid half-width must be positive and finite");
    if (nodes < 8 || (nodes & (nodes - 1)) != 0)
        throw IllPosedInput("grid node count must be a power of two >= 8, got " +
                            std::to_string(nodes));
    spacing = 2.0 * L / static_cast<double>(n);
}

rvec Grid::nodes() const {
    rvec x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = node(j);
    return x;
}

std::size_t Grid::nearest(double x) const {
    double r = std::round((x + L) / spacing);
    if (r < 0.0) return 0;
    if (r > static_cast<double>(n - 1)) return n - 1;
    return static_cast<std::size_t>(r);
}

HalfPlanePoint::HalfPlanePoint(double xx, double yy) : x(xx), y(yy) {
    if (yy > 0.0) throw IllPosedInput("half-plane point must satisfy y <= 0");
}

bool tail_ok(const cvec& f, double tail_fraction) {
    if (f.empty()) return true;
    double mx = 0.0;
    for (const auto& v : f) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) return true;
    double tol = tail_fraction * mx;
    return std::abs(f.front()) <= tol && std::abs(f.back()) <= tol;
}

BoundaryField::BoundaryField(const Grid& g, cvec samples, DecayClass cls, double tail_fraction)
    : grid_(g), s_(std::move(samples)), cls_(cls) {
    if (s_.size() != grid_.n)
        throw IllPosedInput("field length " + std::to_string(s_.size()) +
                            " does not match grid size " + std::to_string(grid_.n));
    if (cls_ == DecayClass::decaying && !tail_ok(s_, tail_fraction))
        throw IllPosedInput("field is not decaying: end samples exceed the tail tolerance");
}

cplx interpolate(const Grid& g, const cvec& f, double x) {
    static constexpr double w[8] = {1, -7, 21, -35, 35, -21, 7, -1};
    double u = (x + g.L) / g.spacing;
    long j0 = static_cast<long>(std::floor(u)) - 3;
    j0 = std::clamp(j0, 0L, static_cast<long>(g.n) - 8);
    cplx num = 0.0;
    double den = 0.0;
    for (int k = 0; k < 8; ++k) {
        double d = u - static_cast<double>(j0 + k);
        if (d == 0.0) return f[static_cast<std::size_t>(j0 + k)];
        double c = w[k] / d;
        num += c * f[static_cast<std::size_t>(j0 + k)];
        den += c;
    }
    return num / den;
}

double BoundaryField::sup_norm() const {
    double mx = 0.0;
    for (const auto& v : s_) mx = std::max(mx, std::abs(v));
    return mx;
}

double BoundaryField::tail_ratio() const {
    double mx = sup_norm();
    if (mx == 0.0) return 0.0;
    return std::max(std::abs(s_.front()), std::abs(s_.back())) / mx;
}

}  // namespace cwave
