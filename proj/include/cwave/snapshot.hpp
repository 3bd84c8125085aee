#pragma once

#include <string>
#include <vector>

#include "cwave/dynamics.hpp"

namespace cwave {

// Columnar text snapshot. Header lines "key = value", then n rows
//   alpha  Re(Z−α')  Im(Z−α')  Re Z̄_t  Im Z̄_t
// then a marker block "markers = m" with rows alpha0 h phase logmod.
struct Snapshot {
    double t = 0.0;
    double eps = 0.0;
    double L = 0.0;
    std::size_t n = 0;
    std::string scenario_hash;
    double dt_used = 0.0;
    double rate_sup = 0.0;
    double holo_residual = 0.0;
    double euler_residual = 0.0;
    std::vector<double> alpha;
    cvec Z_dev;
    cvec Zt_bar;
    std::vector<Marker> markers;
};

Snapshot snapshot_of(const Frame& f, const std::string& scenario_hash);
std::string format_snapshot(const Snapshot& s);
Snapshot parse_snapshot(const std::string& text);   // throws ScenarioError on malformed input
void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

// Rebuilds a frame on the given initial trace; diagnostics are recomputed.
Frame frame_from(const Snapshot& s, const std::shared_ptr<const InitialTrace>& base, double zap_floor = 1e-10);

bool operator==(const Snapshot& a, const Snapshot& b);

}  // namespace cwave
