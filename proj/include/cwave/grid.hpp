#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cwave {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

// Uniform nodes α'_j = −L + j·spacing, j = 0..n−1, on the truncated line.
struct Grid {
    double L = 0.0;
    std::size_t n = 0;
    double spacing = 0.0;

    Grid() = default;
    Grid(double half_width, std::size_t nodes);

    double node(std::size_t j) const { return -L + static_cast<double>(j) * spacing; }
    rvec nodes() const;
    std::size_t center() const { return n / 2; }
    // Index of the node nearest to x (clamped to the grid).
    std::size_t nearest(double x) const;

    bool operator==(const Grid& o) const { return L == o.L && n == o.n; }
};

enum class DecayClass { decaying, constant_plus_decaying };

struct HalfPlanePoint {
    double x = 0.0;
    double y = 0.0;
    HalfPlanePoint() = default;
    HalfPlanePoint(double xx, double yy);
    cplx z() const { return {x, y}; }
};

// Default relative tail tolerance for decaying fields.
inline constexpr double kTailFraction = 0.1;

class BoundaryField {
public:
    BoundaryField() = default;
    BoundaryField(const Grid& g, cvec samples, DecayClass cls = DecayClass::decaying,
                  double tail_fraction = kTailFraction);

    const Grid& grid() const { return grid_; }
    const cvec& samples() const { return s_; }
    cvec& samples() { return s_; }
    DecayClass decay_class() const { return cls_; }
    std::size_t size() const { return s_.size(); }
    const cplx& operator[](std::size_t j) const { return s_[j]; }

    // Largest end-node magnitude relative to the field maximum.
    double tail_ratio() const;
    double sup_norm() const;

private:
    Grid grid_;
    cvec s_;
    DecayClass cls_ = DecayClass::decaying;
};

// 8-point barycentric Lagrange interpolation of grid samples at x; the
// stencil is shifted inward near the ends.
cplx interpolate(const Grid& g, const cvec& f, double x);

// True when both end samples are below tail_fraction·max(|f|).
bool tail_ok(const cvec& f, double tail_fraction = kTailFraction);

}  // namespace cwave
