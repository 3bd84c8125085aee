#pragma once

#include <functional>
#include <vector>

#include "cwave/grid.hpp"

namespace cwave {

// Convention: (ℍf)(α') = (1/iπ) p.v.∫ f(β')/(α'−β') dβ', Fourier symbol
// −sgn ξ, so boundary values of functions holomorphic and decaying in the
// lower half-plane satisfy ℍg = g.
BoundaryField hilbert(const BoundaryField& f);

// P = (I + ℍ)/2.
BoundaryField holomorphic_projection(const BoundaryField& f);

// ‖(I − P)f‖∞ on the grid.
double holomorphic_residual(const BoundaryField& f);

// (K_y * f) on the grid row, K_y(x) = −y / (π(x² + y²)), y ≤ 0.
BoundaryField poisson_extend(const BoundaryField& f, double y);

// ∂_{z'} of the holomorphic extension of a holomorphic trace, y < 0.
cplx holo_derivative(const BoundaryField& f, const HalfPlanePoint& p);

// Spectral derivative and |D| (symbol |ξ|).
BoundaryField derivative(const BoundaryField& f);
BoundaryField abs_derivative(const BoundaryField& f);

// ‖f‖_{Ḣ^{1/2}} = ‖|ξ|^{1/2} f̂‖₂ with the unitary Fourier transform.
double sobolev_half_seminorm(const BoundaryField& f);
// Squared seminorm, real part of ∫ conj(f)·|D|f.
double sobolev_half_seminorm_sq(const BoundaryField& f);

struct LimitEstimate {
    cplx value;
    bool converged = false;
    double error = 0.0;          // magnitude of the last correction or difference
    std::vector<cplx> samples;   // f along the ladder
};

inline constexpr double kContraction = 1.3;

// Depths −2^{−k}·8·spacing, k = 0..6.
std::vector<double> default_depth_ladder(const Grid& g);

// Estimate lim_{y→0⁻} f(α'_0 + i y) from samples on a decreasing depth
// ladder. Successive differences must shrink by kContraction; the limit
// is the iterated Aitken Δ² value over the whole ladder.
LimitEstimate boundary_limit(const std::function<cplx(const HalfPlanePoint&)>& f, double alpha0,
                             const std::vector<double>& depths);
// Same extrapolation on precomputed ladder samples.
LimitEstimate extrapolate_ladder(const std::vector<cplx>& samples);

}  // namespace cwave
