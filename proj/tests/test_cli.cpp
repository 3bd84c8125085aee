#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cwave/cli.hpp"
#include "cwave/errors.hpp"
#include "cwave/snapshot.hpp"

using namespace cwave;
namespace fs = std::filesystem;

namespace {

const char* kFlat =
    "# flat rest\n"
    "grid.L = 8\n"
    "grid.n = 256\n"
    "initial.kind = flat\n"
    "time.dt = 0.03125   # half the spacing\n"
    "time.tmax = 1\n"
    "time.output_every = 8\n"
    "epsilons = 0.5\n";

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("cwave_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path put(const fs::path& dir, const std::string& text) {
    fs::path p = dir / "scenario.in";
    std::ofstream(p) << text;
    return p;
}

struct Cli {
    int code = 0;
    std::string out, err;
};

Cli cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cwave_cli");
    std::vector<const char*> av;
    for (auto& a : args) av.push_back(a.c_str());
    std::ostringstream o, e;
    Cli r;
    r.code = cli_main(static_cast<int>(av.size()), av.data(), o, e);
    r.out = o.str();
    r.err = e.str();
    return r;
}

std::string expect_scenario_error(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no ScenarioError";
    return {};
}

}  // namespace

TEST(Scenario, ParsesKeysAndComments) {
    Scenario s = parse_scenario(kFlat);
    EXPECT_DOUBLE_EQ(s.L, 8.0);
    EXPECT_EQ(s.n, 256u);
    EXPECT_EQ(s.kind, "flat");
    EXPECT_DOUBLE_EQ(s.dt, 0.03125);
    EXPECT_EQ(s.output_every, 8);
    ASSERT_EQ(s.epsilons.size(), 1u);
    EXPECT_DOUBLE_EQ(parse_scenario(s.to_text()).dt, s.dt);
    EXPECT_EQ(parse_scenario(s.to_text()).to_text(), s.to_text());
}

TEST(Scenario, ErrorsNameTheKey) {
    std::string base = kFlat;
    EXPECT_NE(expect_scenario_error("grid.L = 8\ngrid.n = 256\ninitial.kind = flat\ntime.tmax = 1\nepsilons = 0.5\n")
                  .find("time.dt"),
              std::string::npos);
    EXPECT_NE(expect_scenario_error(base + "grid.m = 3\n").find("grid.m"), std::string::npos);
    EXPECT_NE(expect_scenario_error(base + "velocity.kind = vortex\n").find("velocity.kind"), std::string::npos);
    EXPECT_NE(expect_scenario_error(base + "time.dt = 2\n").find("duplicate"), std::string::npos);
}

TEST(Scenario, LadderAndStepInvariants) {
    auto with = [](const std::string& eps, const std::string& dt) {
        return std::string("grid.L = 8\ngrid.n = 512\ninitial.kind = flat\ntime.tmax = 1\ntime.dt = ") + dt +
               "\nepsilons = " + eps + "\n";
    };
    EXPECT_NO_THROW(parse_scenario(with("1, 0.5, 0.25", "0.015625")));
    EXPECT_NE(expect_scenario_error(with("0.25, 0.5", "0.015625")).find("decreasing"), std::string::npos);
    EXPECT_NE(expect_scenario_error(with("0.4, 0.2", "0.015625")).find("8 * grid spacing"), std::string::npos);
    EXPECT_NE(expect_scenario_error(with("1.5", "0.015625")).find("(0, 1]"), std::string::npos);
    EXPECT_NE(expect_scenario_error(with("0.5", "0.02")).find("time.dt"), std::string::npos);
    EXPECT_NE(expect_scenario_error(("grid.L = 8\ngrid.n = 256\ninitial.kind = corner\ntime.tmax = 1\n"
                                     "time.dt = 0.01\nepsilons = 0.5\n"))
                  .find("corner.nu"),
              std::string::npos);
}

TEST(Scenario, HashIsStableAndSensitive) {
    Scenario a = parse_scenario(kFlat);
    EXPECT_EQ(a.hash().size(), 16u);
    EXPECT_EQ(a.hash(), parse_scenario(kFlat).hash());
    Scenario b = a;
    b.output_dir = "elsewhere";
    EXPECT_EQ(a.hash(), b.hash());
    b.tmax = 0.5;
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Scenario, CrestMarkers) {
    Scenario s = parse_scenario(kFlat);
    s.kind = "corner";
    s.corner_x0 = 1.0;
    auto a = s.marker_alphas(0.25);
    EXPECT_EQ(a.size(), 7u);
    s.kind = "cusp";
    s.cusp_x0 = 0.0;
    auto c = s.marker_alphas(0.025);
    EXPECT_GT(c.size(), 7u);
    for (double x : cusp_window_alphas(0.0, 0.025)) {
        EXPECT_GE(std::abs(x), 0.025 - 1e-15);
        EXPECT_LE(std::abs(x), 0.1 + 1e-12);
    }
}

TEST(Snapshot, RoundTripIsBitExact) {
    Grid g(8.0, 256);
    RunConfig rc;
    rc.dt = 1.0 / 64;
    rc.tmax = 3.0 / 64;
    Trajectory tr = run(mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{VelocityKind::pole, 0.05, 2}, 0.5, g,
                                        {-0.3, 0.1}),
                        rc);
    Snapshot s = snapshot_of(tr.frames.back(), "0123456789abcdef");
    Snapshot r = parse_snapshot(format_snapshot(s));
    EXPECT_TRUE(r == s);
    EXPECT_EQ(format_snapshot(r), format_snapshot(s));
    fs::path d = scratch("snap");
    write_snapshot((d / "s.txt").string(), s);
    EXPECT_TRUE(read_snapshot((d / "s.txt").string()) == s);
    // rebuilt frame reproduces the state
    Frame f = frame_from(r, tr.frames.back().state.base);
    for (std::size_t j = 0; j < g.n; ++j) {
        EXPECT_NEAR(std::abs(f.state.D[j] - tr.frames.back().state.D[j]), 0.0, 1e-14);
        EXPECT_EQ(f.state.Zt_bar[j], tr.frames.back().state.Zt_bar[j]);
    }
    EXPECT_NEAR(f.diag.A1.sup_norm(), tr.frames.back().diag.A1.sup_norm(), 1e-13);
}

TEST(Snapshot, MalformedInputRejected) {
    Grid g(8.0, 64);
    RunConfig rc;
    rc.tmax = 0.0;
    Trajectory tr = run(mollify_initial(build_flat_map(), VelocityProfile{}, 0.5, g), rc);
    std::string text = format_snapshot(snapshot_of(tr.frames.front(), "h"));
    EXPECT_THROW(parse_snapshot(text.substr(0, text.size() / 2)), ScenarioError);
    EXPECT_THROW(parse_snapshot(text + "1 2 3 4\n"), ScenarioError);
}

TEST(Cli, InitFlatReport) {
    fs::path d = scratch("init_flat");
    Cli r = cli({"init", "--scenario", put(d, kFlat).string(), "--out", (d / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("E1 = 1\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("c0 = 0\n"), std::string::npos);
    EXPECT_NE(r.out.find("chord_arc_delta = 1\n"), std::string::npos);
    EXPECT_TRUE(fs::exists(d / "out" / "init_report.txt"));
    EXPECT_TRUE(fs::exists(d / "out" / eps_dir_name(0.5) / "snap_000000.txt"));
}

TEST(Cli, InitCornerReportsExponent) {
    fs::path d = scratch("init_corner");
    std::string sc = "grid.L = 8\ngrid.n = 1024\ninitial.kind = corner\ncorner.nu = 0.3\ntime.dt = 0.005\n"
                     "time.tmax = 0.1\nepsilons = 0.2\n";
    Cli r = cli({"init", "--scenario", put(d, sc).string(), "--out", (d / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto p = r.out.find("exponent_rel_error = ");
    ASSERT_NE(p, std::string::npos);
    EXPECT_LT(std::stod(r.out.substr(p + 21)), 0.02);
}

TEST(Cli, InadmissibleCornerExitCode) {
    fs::path d = scratch("init_055");
    std::string sc = "grid.L = 8\ngrid.n = 512\ninitial.kind = corner\ncorner.nu = 0.55\ntime.dt = 0.01\n"
                     "time.tmax = 0.1\nepsilons = 0.5\n";
    fs::path p = put(d, sc);
    Cli r = cli({"init", "--scenario", p.string(), "--out", (d / "out").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("energy-inadmissible corner"), std::string::npos) << r.err;
    Cli ok = cli({"init", "--scenario", p.string(), "--out", (d / "out").string(), "--allow-inadmissible"});
    EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST(Cli, BadKeyExitCode) {
    fs::path d = scratch("badkey");
    Cli r = cli({"init", "--scenario", put(d, std::string(kFlat) + "grid.q = 1\n").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("grid.q"), std::string::npos);
    EXPECT_EQ(cli({"init", "--scenario", (d / "missing.in").string()}).code, 2);
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    Cli e = cli({"init", "--scenario", put(d, kFlat).string(), "--epsilons", "0.5,0.6"});
    EXPECT_EQ(e.code, 2);
    EXPECT_NE(e.err.find("decreasing"), std::string::npos);
}

TEST(Cli, FlatRunStaysAtRest) {
    fs::path d = scratch("run_flat");
    Cli r = cli({"run", "--scenario", put(d, kFlat).string(), "--out", (d / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    fs::path e = d / "out" / eps_dir_name(0.5);
    Snapshot s0 = read_snapshot((e / "snap_000000.txt").string());
    int count = 0;
    for (const auto& f : fs::directory_iterator(e)) {
        if (f.path().filename().string().rfind("snap_", 0) != 0) continue;
        Snapshot s = read_snapshot(f.path().string());
        double dev = 0.0;
        for (std::size_t j = 0; j < s.n; ++j)
            dev = std::max(dev, std::abs(s.Z_dev[j] - s0.Z_dev[j]) + std::abs(s.Zt_bar[j] - s0.Zt_bar[j]));
        EXPECT_LE(dev, 1e-8);
        ++count;
    }
    EXPECT_EQ(count, 5);   // 32 steps, every 8th
    EXPECT_TRUE(fs::exists(e / "summary.csv"));
    EXPECT_NE(slurp(e / "log.txt").find("completed = 1"), std::string::npos);
}

TEST(Cli, RunIsDeterministic) {
    fs::path d = scratch("determinism");
    std::string sc = "grid.L = 16\ngrid.n = 1024\ninitial.kind = corner\ncorner.nu = 0.3\nvelocity.kind = pole\n"
                     "velocity.mu = 0.05\ntime.dt = 0.015625\ntime.tmax = 0.0625\ntime.output_every = 2\n"
                     "epsilons = 0.5, 0.25\n";
    fs::path p = put(d, sc);
    ASSERT_EQ(cli({"sweep", "--scenario", p.string(), "--out", (d / "a").string()}).code, 0);
    ASSERT_EQ(cli({"sweep", "--scenario", p.string(), "--out", (d / "b").string()}).code, 0);
    int files = 0;
    for (const auto& f : fs::recursive_directory_iterator(d / "a")) {
        if (!f.is_regular_file()) continue;
        fs::path rel = fs::relative(f.path(), d / "a");
        if (rel.filename() == "scenario.txt") continue;   // records its own output.dir
        EXPECT_EQ(slurp(f.path()), slurp(d / "b" / rel)) << rel;
        ++files;
    }
    EXPECT_GT(files, 10);
    EXPECT_TRUE(fs::exists(d / "a" / "verdict.txt"));
    EXPECT_TRUE(fs::exists(d / "a" / "angle_vs_t.csv"));
    EXPECT_TRUE(fs::exists(d / "a" / "tip_vs_eps.csv"));
}

TEST(Cli, RejectionHalvingIsLogged) {
    fs::path d = scratch("halving");
    std::string sc = "grid.L = 16\ngrid.n = 512\ninitial.kind = bump\nvelocity.kind = pole\nvelocity.mu = 0.05\n"
                     "time.dt = 0.03125\ntime.tmax = 0.125\nepsilons = 0.5\nstep.holo_ceiling = 1e-13\n";
    Cli r = cli({"run", "--scenario", put(d, sc).string(), "--out", (d / "out").string()});
    ASSERT_NE(r.code, 2) << r.err;
    std::string log = slurp(d / "out" / eps_dir_name(0.5) / "log.txt");
    EXPECT_NE(log.find("dt halved"), std::string::npos) << log;
    EXPECT_NE(r.out.find("dt_final"), std::string::npos);
}

TEST(Cli, MonitorBlowupExitCodeKeepsLastGoodSnapshot) {
    fs::path d = scratch("blowup");
    std::string sc = "grid.L = 16\ngrid.n = 512\ninitial.kind = bump\nvelocity.kind = pole\nvelocity.mu = 0.05\n"
                     "time.dt = 0.03125\ntime.tmax = 0.5\nepsilons = 0.5\nmonitors.ceiling = 1.0000001\n";
    Cli r = cli({"run", "--scenario", put(d, sc).string(), "--out", (d / "out").string()});
    EXPECT_EQ(r.code, 4);
    fs::path e = d / "out" / eps_dir_name(0.5);
    EXPECT_TRUE(fs::exists(e / "snap_000000.txt"));
    EXPECT_NE(slurp(e / "log.txt").find("blowup = 1"), std::string::npos);
}

TEST(Cli, AnalyzeSingleEpsSkipsCrossChecks) {
    fs::path d = scratch("analyze_single");
    std::string sc = "grid.L = 16\ngrid.n = 1024\ninitial.kind = corner\ncorner.nu = 0.3\ntime.dt = 0.015625\n"
                     "time.tmax = 0.0625\nepsilons = 0.5\n";
    ASSERT_EQ(cli({"run", "--scenario", put(d, sc).string(), "--out", (d / "out").string()}).code, 0);
    Cli r = cli({"analyze", (d / "out" / eps_dir_name(0.5)).string(), "--out", (d / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("tip_acceleration_limit = skipped"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("crest_limit_contraction = skipped"), std::string::npos);
    EXPECT_NE(r.out.find("angle_constant = pass"), std::string::npos);
    EXPECT_NE(r.out.find("unit_modulus_prediction = pass"), std::string::npos);
    EXPECT_EQ(cli({"analyze", (d / "nowhere").string()}).code, 2);
    fs::create_directories(d / "empty");
    std::ofstream(d / "empty" / "scenario.txt") << sc;
    EXPECT_EQ(cli({"analyze", (d / "empty").string()}).code, 2);
}
