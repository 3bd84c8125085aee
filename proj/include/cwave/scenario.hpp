#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cwave/dynamics.hpp"

namespace cwave {

// Plain key = value scenario, one key per line, '#' starts a comment.
struct Scenario {
    double L = 16.0;
    std::size_t n = 2048;

    std::string kind = "flat";   // flat | bump | corner | cusp
    double corner_nu = 0.3, corner_x0 = 0.0, corner_R = 1.0;
    double cusp_c = 2.0, cusp_x0 = 0.0, cusp_R = 1.0;
    double bump_a = 0.3, bump_w = 1.0, bump_x0 = 0.0;

    VelocityProfile velocity;

    double dt = 1e-3;
    double tmax = 0.0;
    int output_every = 1;
    std::vector<double> epsilons;
    std::string output_dir = "out";
    double monitor_ceiling = 1e3;
    double holo_ceiling = 1e-6;
    bool allow_inadmissible = false;
    std::vector<double> extra_markers;

    Grid grid() const { return Grid(L, n); }
    bool has_crest() const { return kind == "corner" || kind == "cusp"; }
    double crest() const;
    ConformalMap build_map() const;   // throws GeometryRejected
    // Crest probes x0, x0 ± {1,2,4}ε; for cusps also straddling window labels up to 0.1; plus extras.
    std::vector<double> marker_alphas(double eps) const;
    RunConfig run_config() const;

    // Canonical text: every key, fixed order, %.17g numbers.
    std::string to_text() const;
    // FNV-1a 64 of to_text() without output.dir, 16 hex digits.
    std::string hash() const;
    // Throws ScenarioError naming the offending key.
    void validate() const;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
// Comma-separated numbers; errors name the key.
std::vector<double> parse_number_list(const std::string& key, const std::string& text);
std::uint64_t fnv1a64(const std::string& s);

// Labels for cusp-window markers: x0 ± ε·2^{k/2} inside [ε, outer].
std::vector<double> cusp_window_alphas(double x0, double eps, double outer = 0.1);

}  // namespace cwave
