#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cwave/field.hpp"
#include "cwave/geometry.hpp"

namespace cwave {

// h(α,t) together with the running integrals of Im and Re of
// (Z_{t,α'}/Z_{,α'} − b_{α'})∘h, i.e. arg and log|·| of Z_{,α'}∘h relative
// to t = 0.
struct Marker {
    double alpha0 = 0.0;
    double h = 0.0;
    double phase = 0.0;
    double logmod = 0.0;
};

// Mollified data at t = 0, shared by every state of one run.
struct InitialTrace {
    Grid grid;
    double eps = 0.0;
    cvec Z;     // Ψ(α' − iε)
    cvec Zap;   // Ψ_{z'}(α' − iε)
};

struct WaveState {
    double t = 0.0;
    double eps = 0.0;
    std::shared_ptr<const InitialTrace> base;
    BoundaryField D;        // Z − Z(·,0); decaying
    BoundaryField Zt_bar;   // trace of F; decaying
    std::vector<Marker> markers;
    double holo_residual = 0.0;   // ‖(I−P)Z̄_t‖∞ after the last step

    const Grid& grid() const { return base->grid; }
    cvec Z() const;
    // Z − α', constant-plus-decaying class.
    BoundaryField Z_dev() const;
    cvec Zap() const;
};

struct StepDiagnostics {
    BoundaryField A1;
    BoundaryField b;
    BoundaryField Ztt_bar;
    double dt_used = 0.0;
    double euler_residual = 0.0;   // forward-difference residual of the step ending here
};

// A₁ = 1 + Re(conj(Z_t)·|D|Z_t) − ½|D||Z_t|², the expanded form of
// 1 + (1/2π)∫|Z_t(α')−Z_t(β')|²/(α'−β')² dβ'.
BoundaryField compute_A1(const BoundaryField& Zt);
// b = Re[(I − ℍ)(Z_t/Z_{,α'})]. Z_ap is the full derivative (→ 1 at ±∞).
BoundaryField compute_b(const BoundaryField& Zt, const BoundaryField& Z_ap, double floor = 1e-10);
BoundaryField compute_Ztt_bar(const BoundaryField& Z_ap, const BoundaryField& A1, double floor = 1e-10);

WaveState mollify_initial(const ConformalMap& map, const VelocityProfile& vel, double eps, const Grid& g,
                          const std::vector<double>& marker_alphas = {}, double holo_ceiling = 1e-6);

struct Rates {
    cvec dD;
    cvec dV;
    std::vector<Marker> dm;   // d/dt of h, phase, logmod
    double w_sup = 0.0;       // ‖Z_{t,α'}/Z_{,α'} − b_{α'}‖∞ (computed when markers are present)
};

// Time derivatives ∂_tZ = Z_t − b·Z_{,α'}, ∂_tZ̄_t = Z̄_tt − b·∂_{α'}Z̄_t.
Rates rhs(const WaveState& s, StepDiagnostics* diag = nullptr, double floor = 1e-10);

struct StepConfig {
    double holo_ceiling = 1e-6;
    double zap_floor = 1e-10;
    bool project = true;
};

// One classical RK4 step; the increments of D and Z̄_t are projected by P.
// Throws StepRejected or MarkerExit.
WaveState step_rk4(const WaveState& s, double dt, const StepConfig& cfg = {});

// Forward Euler marker update with given b (exposed for tests).
std::vector<Marker> advance_markers(const std::vector<Marker>& m, const BoundaryField& b, double dt);

// Bound monitors in the fixed order of monitor_names().
using Monitors = std::array<double, 7>;
const std::array<const char*, 7>& monitor_names();
Monitors compute_monitors(const WaveState& s, const StepDiagnostics& d);

struct Frame {
    WaveState state;
    StepDiagnostics diag;
    Monitors monitors{};
    double rate_sup = 0.0;    // running max of Rates::w_sup over accepted steps
};

struct RunConfig {
    double dt = 1e-3;
    double tmax = 0.0;
    int output_every = 1;
    double monitor_ceiling = 1e3;
    int max_halvings = 8;
    StepConfig step;
};

struct Trajectory {
    std::vector<Frame> frames;
    Monitors baseline{};
    bool blowup = false;
    bool completed = false;
    std::string stop_reason;
    double dt_initial = 0.0;
    double dt_final = 0.0;
    int rejections = 0;
    std::vector<std::string> log;
};

// Fixed step tmax/⌈tmax/dt⌉, halved on rejection (kept for the rest of
// the run). The callback, if any, sees each frame as it is emitted.
Trajectory run(const WaveState& init, const RunConfig& cfg,
               const std::function<void(const Frame&)>& on_frame = {});

}  // namespace cwave
