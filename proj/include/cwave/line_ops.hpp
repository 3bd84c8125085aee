#pragma once

#include <array>
#include <memory>
#include <vector>

#include "cwave/grid.hpp"
#include "cwave/kernels.hpp"

namespace cwave {

// Nonlocal operators on the truncated line.
//
// A field f is split as f = tail + core. The tail is a least-squares fit on
// the outer band |x| ≥ (1 − band)·L in the rational basis
//     g⁺_k = (x − i s)^{−k},  g⁻_k = (x + i s)^{−k},  k = 1..K,
// whose images under every operator here are known in closed form
// (g⁺ extends holomorphically into the lower half-plane, g⁻ into the upper).
// The core is treated as vanishing outside [−L, L] and is convolved with the
// band-limited discrete kernel of each Fourier multiplier by a zero-padded
// FFT of length 2n, so no periodic images enter.
class LineOps {
public:
    static constexpr int K = 7;
    static constexpr double kScaleFraction = 0.2;
    static constexpr double kBand = 0.5;

    enum class Op { hilbert_std, deriv, absd };

    struct TailFit {
        std::array<cplx, K> p{};
        std::array<cplx, K> q{};
    };

    // Shared, immutable instance per grid.
    static std::shared_ptr<const LineOps> get(const Grid& g);

    explicit LineOps(const Grid& g);
    ~LineOps();
    LineOps(const LineOps&) = delete;
    LineOps& operator=(const LineOps&) = delete;

    const Grid& grid() const { return grid_; }
    double tail_scale() const { return s_; }

    TailFit fit(const cvec& f) const;
    cvec tail_values(const TailFit& t) const;

    // Multiplier with symbol −i·sgn ξ, i ξ or |ξ| respectively.
    cvec apply(const cvec& f, Op op) const;
    // Several multipliers sharing one tail fit and one forward transform.
    std::vector<cvec> apply(const cvec& f, const std::vector<Op>& ops) const;

    // Harmonic (Poisson) extension sampled on the row y ≤ 0.
    cvec poisson(const cvec& f, double y) const;
    // Poisson extension of f and of |D|f on the row y (one forward transform).
    std::pair<cvec, cvec> poisson_with_absd(const cvec& f, double y) const;

    // Poisson extension and its x-derivative at an arbitrary point, y ≤ 0.
    kernels::PointSum point(const cvec& f, double x, double y) const;
    kernels::PointSum point(const cvec& core, const TailFit& t, double x, double y) const;

    struct Impl;

private:
    Grid grid_;
    double s_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cwave
