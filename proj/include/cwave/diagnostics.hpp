#pragma once

#include <array>
#include <string>
#include <vector>

#include "cwave/dynamics.hpp"

namespace cwave {

// Seven-term energy, in the order
//   ‖Z̄_{t,α'}‖₂², ‖Z̄_{t,α'}/Z_{,α'}‖²_{Ḣ½}, ‖Q∂(QZ̄_{t,α'})‖₂², ‖Q²∂(QZ̄_{t,α'})‖²_{Ḣ½},
//   ‖Q‖∞², ‖∂Q‖₂², ‖Q∂(Q∂Q)‖₂²        with Q = 1/Z_{,α'}.
using EnergyTerms = std::array<double, 7>;
const std::array<const char*, 7>& energy_term_names();

struct EnergyReport {
    EnergyTerms terms{};
    double total = 0.0;
};

EnergyReport energy_boundary(const WaveState& s);
EnergyReport energy_traces(const Grid& g, const cvec& Zap, const cvec& Zt_bar);

struct InteriorEnergy {
    EnergyTerms terms{};              // sup over the ladder, per term
    double E1 = 0.0;                  // sum of the per-term sups
    double c0 = 0.0;
    std::vector<double> depths;       // ascending (deepest first)
    std::vector<double> totals;       // ℰ on each row
    double argmax_depth = 0.0;
    bool monotone = true;             // totals non-decreasing toward y' = 0
};

// Twelve geometric depths from −1 to −4·spacing.
std::vector<double> interior_depth_ladder(const Grid& g);
// Rows of Ψ_{z'} and F evaluated from closed-form jets at t = 0.
InteriorEnergy energy_interior(const ConformalMap& m, const VelocityProfile& v, const Grid& g,
                               std::vector<double> depths = {});

// Marker labels for a crest at x0: x0 and x0 ± κε.
std::vector<double> crest_probe_alphas(double x0, double eps, const std::vector<double>& kappas = {1.0, 2.0, 4.0});

struct MarkerSeries {
    double alpha0 = 0.0;
    std::vector<double> t, h;
    std::vector<double> ratio;        // |1/Z_{,α'}|(h,t) / |1/Z_{,α'}|(α,0), interpolated
    std::vector<double> ratio_pred;   // exp(−logmod) from the marker ODE
    std::vector<double> band;         // exp(t·M(t))
    bool extrapolated = false;
};

struct SingularSetReport {
    std::vector<MarkerSeries> markers;
    double rate_bound = 0.0;          // max ‖b_{α'} − Z_{t,α'}/Z_{,α'}‖∞ over the run
    double c1 = 1.0, c2 = 1.0;        // observed ratio range
    bool band_ok = true;
    double worst_band_margin = 0.0;   // max |log ratio| − t·M(t) (≤ 0 when inside)
    double min_node_ratio = 1.0;      // over all nodes and frames, Eulerian
    bool no_new_singularity = true;   // min_node_ratio ≥ 0.1
};

SingularSetReport singular_set_track(const Trajectory& tr);

struct ProbeSeries {
    double alpha0 = 0.0;
    double offset = 0.0;              // α0 − crest
    std::vector<cplx> measured;       // (Z_{,α'}/|Z_{,α'}|)(h,t) ÷ (Z_{,α'}/|Z_{,α'}|)(α,0)
    std::vector<cplx> predicted;      // exp(i·phase)
    double max_mismatch = 0.0;        // max |measured − predicted|
};

struct RigidityReport {
    double crest = 0.0;
    std::vector<double> t;
    std::vector<double> left, right, interior_angle;   // outermost probes
    double angle_drift = 0.0;                          // max_t |θ(t) − θ(0)|
    std::vector<double> inner_angle;                   // same from the innermost probe pair x0 ± κ_min·ε
    double inner_angle_drift = 0.0;
    std::vector<ProbeSeries> probes;                   // includes the crest marker (offset 0)
    double max_mismatch = 0.0;                         // over probes with offset ≠ 0
    double max_modulus_error = 0.0;                    // max ||predicted| − 1|
    double crest_factor_error = 0.0;                   // max_t |predicted − 1| at the crest
    std::vector<double> probe_ladder;                  // |predicted − 1| at the final time, outer → crest
    bool probe_ladder_contracting = true;
    std::vector<cplx> tip;                             // (Z̄_tt − i) at the crest marker
    double tip_final = 0.0;
    bool tip_bound_ok = true;                          // |Z̄_tt − i| ≤ ‖A₁‖∞·|1/Z_{,α'}| everywhere, every frame
    double tip_bound_margin = 0.0;
    std::vector<double> ratio;                         // singular-set ratio at the crest
};

RigidityReport angle_rigidity(const Trajectory& tr, double crest);

struct TangentVanishing {
    cplx crest_limit;                 // (1/Ψ_{z'})F_{z'} at the crest, ray limit
    cplx crest_limit_conj;            // (1/Ψ_{z'})·conj(F_{z'})
    bool crest_converged = false;
    double away_median = 0.0;         // median |Z̄_{t,α'}/Z_{,α'}| outside the crest window
    double away_max_rel = 0.0;        // ray limit vs direct quotient, away from the crest
    double linf_bound = 0.0;          // sup over the depth ladder of ‖(1/Ψ_{z'})F_{z'}‖∞
};

TangentVanishing tangent_vanishing(const Frame& f, double crest, double window_halfwidth);

struct PressureReport {
    double laplacian_residual = 0.0;  // at depth 8·spacing
    double laplacian_depth = 0.0;
    double boundary_residual = 0.0;   // outside crest windows
    double boundary_residual_crest = 0.0;
    double crest_gradient = 0.0;      // |(1/Ψ_{z'})(∂_{x'}−i∂_{y'})𝔓| at the node nearest each crest, max
    double g_residual = 0.0;          // on NS windows
    double linf_bound = 0.0;
    double window = 0.0;
    bool converged = true;            // depth extrapolants of consecutive degree agree to 1e−3
};

// Crest windows of the given half-width are excluded from the smooth checks.
PressureReport pressure_identities(const Frame& f, const std::vector<double>& crests, double window_halfwidth);

struct CuspEvolution {
    std::vector<double> t;
    std::vector<double> max_lhs;      // max | |z(α,t)−z(β,t)| − |Z(α,0)−Z(β,0)| | / |α−β|^{1/2}
    double K = 0.0;                   // max_t max_lhs / t
    std::vector<double> min_ratio;    // min |z(α,t)−z(β,t)| / |α−β|^{1/2}
    bool lower_bound_ok = true;       // min_ratio ≥ 1/2 at every frame
    std::vector<double> chord_arc;    // global δ of Z(·,t)
    std::size_t pairs = 0;
};

// Straddling marker pairs α < x0 < β with inner ≤ |α−x0|, |β−x0| ≤ outer.
CuspEvolution cusp_evolution_check(const Trajectory& tr, double x0, double inner, double outer);

// ∫_{x0−δ}^{x0+δ} |Ψ_{z'}(s + iy)|² ds on each depth of the ladder (trapezoid on the grid).
std::vector<double> psi_window_integrals(const ConformalMap& m, const Grid& g, double x0, double delta,
                                         const std::vector<double>& depths);

}  // namespace cwave
