#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cwave/field.hpp"
#include "cwave/jet.hpp"

namespace cwave {

enum class MapKind { flat, bump, corner, cusp };

const char* map_kind_name(MapKind k);

// One singular factor of Ψ_{z'}: m^{ν−1} (corner) or c²/(m(c − log m)²)
// (cusp), with m = (z' − x₀)/(z' − x₀ − iR).
struct MapFactor {
    MapKind kind = MapKind::corner;
    double x0 = 0.0;
    double R = 1.0;
    double nu = 0.5;
    double c = 2.0;
};

struct SingularPoint {
    double alpha0 = 0.0;
    MapKind kind = MapKind::corner;
    double nu = 0.0;       // opening angle νπ; 0 for cusps
    int marker_index = -1;
};

using Jet4 = Jet<4>;

// Ψ(·,0) and Ψ_{z'}(·,0) on the closed lower half-plane.
class ConformalMap {
public:
    struct Row {
        double y = 0.0;
        cvec Z;     // Ψ(α' + iy)
        cvec Zap;   // Ψ_{z'}(α' + iy); non-finite at a singular node when y = 0
    };

    ConformalMap() = default;

    MapKind kind() const { return kind_; }
    const std::vector<MapFactor>& factors() const { return factors_; }
    double bump_amplitude() const { return a_; }
    double bump_width() const { return w_; }
    double bump_center() const { return bx0_; }
    cplx base_point() const { return base_; }

    // Taylor jet of Ψ_{z'} at z (y ≤ 0, away from singular points).
    Jet4 dpsi_jet(cplx z) const;
    cplx dpsi(cplx z) const;
    // Ψ(z) by path integration from base_point (closed form for flat and bump).
    cplx psi(cplx z) const;
    // Ψ and Ψ_{z'} on the grid row at depth y ≤ 0, cached per (grid, y).
    std::shared_ptr<const Row> row(const Grid& g, double y) const;

    std::vector<SingularPoint> singular_points() const;

    friend ConformalMap build_flat_map();
    friend ConformalMap build_bump_map(double, double, double);
    friend ConformalMap build_product_map(std::vector<MapFactor>, bool);

private:
    cplx psi_segment(cplx a, cplx b) const;
    cplx psi_real_cell(double a, double b) const;

    MapKind kind_ = MapKind::flat;
    std::vector<MapFactor> factors_;
    double a_ = 0.0, w_ = 1.0, bx0_ = 0.0;
    cplx base_{0.0, -1.0};
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

ConformalMap build_flat_map();
// Ψ(z') = z' + a·w/(z' − x₀ − iw); requires 0 ≤ a < w so Re Ψ_{z'} > 0.
ConformalMap build_bump_map(double a, double w, double x0);
// Rejects ν outside (0, 1/2) unless allow_inadmissible is set (ν < 1 still required).
ConformalMap build_corner_map(double nu, double x0, double R = 1.0, bool allow_inadmissible = false);
ConformalMap build_cusp_map(double x0, double R = 1.0, double c = 2.0);
// Product of corner/cusp factors; centres must be separated by ≥ 4·max R.
ConformalMap build_product_map(std::vector<MapFactor> factors, bool allow_inadmissible = false);

// Least-squares slope of log|1/Ψ_{z'}(x₀ + iy)| against log|y| over a
// logarithmically spaced set of depths in [ymin, ymax].
double fit_corner_exponent(const ConformalMap& m, double x0, double ymin, double ymax, int samples = 40);

struct CuspFit {
    double amplitude = 0.0;
    double y0 = 0.0;
    double max_log_residual = 0.0;   // max |Δ log| of the fitted model
};
// Fits |1/Ψ_{z'}(x₀ + iy)| ≈ A·|y|·log²(|y|/y₀) over [ymin, ymax].
CuspFit fit_cusp_model(const ConformalMap& m, double x0, double ymin, double ymax, int samples = 40);

struct TangentFit {
    double left = 0.0;     // arg of the tangent approaching x₀ from the left
    double right = 0.0;
    double interior_angle = 0.0;
};
// One-sided tangent limits from arg Ψ_{z'}(x₀ ± δ) on a δ-ladder of nodes,
// excluding the three nodes nearest x₀; linear fit in δ, extrapolated to 0.
TangentFit corner_tangents(const ConformalMap& m, const Grid& g, double x0);

struct JordanResult {
    bool simple = true;
    std::size_t i = 0, j = 0;   // offending segment indices
    double alpha_i = 0.0, alpha_j = 0.0;
};
JordanResult validate_jordan(const BoundaryField& Z);
JordanResult validate_jordan(const Grid& g, const cvec& Z);

// inf over sample pairs of chord / polyline arclength.
double chord_arc_constant(const Grid& g, const cvec& Z);
double chord_arc_constant(const BoundaryField& Z);

struct SeparationResult {
    bool ok = true;
    double worst_K = 0.0;      // max |α−β|^{1/2} / |Z(α) − Z(β)|
    double min_ratio = 0.0;    // min |Z(α) − Z(β)| / |α−β|^{1/2}
    std::size_t pairs = 0;
};
// Pairs α < x₀ < β straddling the cusp with inner ≤ |α − x₀|, |β − x₀| ≤ outer.
SeparationResult cusp_separation_check(const Grid& g, const cvec& Z, double x0, double inner, double outer,
                                       double K = 1.0);

enum class VelocityKind { zero, pole };

struct VelocityProfile {
    VelocityKind kind = VelocityKind::zero;
    double mu = 0.0;
    int k = 2;

    // F(z) = μ (i/(z − i))^k.
    Jet4 jet(cplx z) const;
    cplx F(cplx z) const;
};

struct VelocityField {
    BoundaryField trace;        // Z̄_t(α', 0) = F(α')
    double holo_residual = 0.0;
    std::vector<double> depths;
    std::vector<double> h3_norms;   // H³ norm of F on each row
    double h3_sup = 0.0;
};
VelocityField build_velocity(const VelocityProfile& v, const Grid& g);

}  // namespace cwave
