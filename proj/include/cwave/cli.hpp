#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cwave/diagnostics.hpp"
#include "cwave/scenario.hpp"

namespace cwave {

// Exit codes of the command-line driver.
enum ExitCode : int { kOk = 0, kFailure = 1, kBadInput = 2, kGeometry = 3, kBlowup = 4 };

// One ε member read back from its trajectory directory.
struct LoadedRun {
    std::string dir;
    Scenario scenario;
    double eps = 0.0;
    Trajectory tr;
};

std::string eps_dir_name(double eps);
// Throws ScenarioError when the directory or its snapshots are missing or inconsistent.
LoadedRun load_run(const std::string& dir);

struct Verdict {
    std::string name;
    std::string status;   // pass | fail | skipped
    double margin = 0.0;
    std::string note;
};

// Diagnostics over one or more ε members (sorted by decreasing ε); plot CSVs go to plot_dir when non-empty.
std::vector<Verdict> analyze_runs(std::vector<LoadedRun> runs, const std::string& plot_dir = {});
std::string format_verdicts(const std::vector<Verdict>& v);

int cmd_init(const Scenario& sc, std::ostream& out);
int cmd_run(const Scenario& sc, std::ostream& out, std::vector<std::string>* dirs = nullptr);
int cmd_analyze(const std::vector<std::string>& dirs, const std::string& out_dir, std::ostream& out);

// argv-level entry point used by the cwave_cli tool.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cwave
