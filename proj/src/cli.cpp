#include "cwave/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cwave/errors.hpp"
#include "cwave/field.hpp"
#include "cwave/snapshot.hpp"

namespace fs = std::filesystem;

namespace cwave {
namespace {

std::string g17(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

std::string e6(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6e", x);
    return b;
}

std::string snap_name(std::size_t k) {
    char b[32];
    std::snprintf(b, sizeof b, "snap_%06zu.txt", k);
    return b;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ScenarioError("cannot write '" + p.string() + "'");
    f << s;
}

std::string read_text(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ScenarioError("cannot read '" + p.string() + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool smooth_kind(const Scenario& sc) { return sc.kind == "flat" || sc.kind == "bump"; }

WaveState initial_state(const Scenario& sc, const ConformalMap& m, double eps) {
    return mollify_initial(m, sc.velocity, eps, sc.grid(), sc.marker_alphas(eps));
}

std::string summary_header(const WaveState& s) {
    std::string h = "t";
    for (auto n : energy_term_names()) h += std::string(",") + n;
    h += ",E_total,A1_inf,holo_residual,dt_used";
    for (std::size_t k = 0; k < s.markers.size(); ++k) {
        std::string p = ",m" + std::to_string(k);
        h += p + "_angle" + p + "_ratio" + p + "_acc";
    }
    return h + "\n";
}

std::string summary_row(const Frame& f) {
    const WaveState& s = f.state;
    const Grid& g = s.grid();
    EnergyReport e = energy_boundary(s);
    std::string r = g17(s.t);
    for (double x : e.terms) r += "," + g17(x);
    r += "," + g17(e.total) + "," + g17(f.diag.A1.sup_norm()) + "," + g17(s.holo_residual) + "," + g17(f.diag.dt_used);
    cvec zap = s.Zap();
    for (const Marker& m : s.markers) {
        cplx z = interpolate(g, zap, m.h);
        double ratio = std::abs(interpolate(g, s.base->Zap, m.alpha0)) / std::abs(z);
        double acc = std::abs(interpolate(g, f.diag.Ztt_bar.samples(), m.h) - cplx(0.0, 1.0));
        r += "," + g17(std::arg(z)) + "," + g17(ratio) + "," + g17(acc);
    }
    return r + "\n";
}

struct RunLog {
    bool completed = false, blowup = false;
    int rejections = 0;
    std::string stop_reason;
};

std::string format_log(const Trajectory& tr) {
    std::ostringstream o;
    o << "completed = " << (tr.completed ? 1 : 0) << "\n"
      << "blowup = " << (tr.blowup ? 1 : 0) << "\n"
      << "rejections = " << tr.rejections << "\n"
      << "dt_initial = " << g17(tr.dt_initial) << "\n"
      << "dt_final = " << g17(tr.dt_final) << "\n"
      << "frames = " << tr.frames.size() << "\n"
      << "stop_reason = " << tr.stop_reason << "\n";
    for (const auto& l : tr.log) o << "log: " << l << "\n";
    return o.str();
}

RunLog parse_log(const std::string& text) {
    RunLog r;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        std::string k = line.substr(0, eq), v = line.substr(eq + 3);
        if (k == "completed") r.completed = v == "1";
        else if (k == "blowup") r.blowup = v == "1";
        else if (k == "rejections") r.rejections = std::atoi(v.c_str());
        else if (k == "stop_reason") r.stop_reason = v;
    }
    return r;
}

Verdict verdict(std::string name, bool applicable, bool ok, double margin, std::string note = {}) {
    return Verdict{std::move(name), applicable ? (ok ? "pass" : "fail") : "skipped", margin, std::move(note)};
}

// |predicted − 1| at the crest marker, final time.
double crest_factor_final(const RigidityReport& r) {
    for (const auto& p : r.probes)
        if (p.offset == 0.0) return std::abs(p.predicted.back() - 1.0);
    return 0.0;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] < v[k - 1])) return false;
    return true;
}

double min_contraction(const std::vector<double>& v) {
    double m = 1e300;
    for (std::size_t k = 1; k < v.size(); ++k) m = std::min(m, v[k] > 0.0 ? v[k - 1] / v[k] : 1e300);
    return m;
}

}  // namespace

std::string eps_dir_name(double eps) {
    char b[40];
    std::snprintf(b, sizeof b, "eps_%.6g", eps);
    return b;
}

LoadedRun load_run(const std::string& dir) {
    fs::path d(dir);
    if (!fs::is_directory(d)) throw ScenarioError("trajectory directory '" + dir + "' not found");
    LoadedRun lr;
    lr.dir = dir;
    lr.scenario = parse_scenario(read_text(d / "scenario.txt"));
    std::vector<fs::path> snaps;
    for (const auto& e : fs::directory_iterator(d)) {
        auto n = e.path().filename().string();
        if (n.rfind("snap_", 0) == 0 && e.path().extension() == ".txt") snaps.push_back(e.path());
    }
    std::sort(snaps.begin(), snaps.end());
    if (snaps.empty()) throw ScenarioError("no snapshots in '" + dir + "'");
    std::vector<Snapshot> ss;
    for (const auto& p : snaps) ss.push_back(read_snapshot(p.string()));
    const std::string hash = lr.scenario.hash();
    for (const auto& s : ss)
        if (s.scenario_hash != hash) throw ScenarioError("snapshot hash does not match scenario.txt in '" + dir + "'");
    lr.eps = ss.front().eps;
    if (ss.front().t != 0.0) throw ScenarioError("missing initial snapshot in '" + dir + "'");
    std::vector<double> labels;
    for (const auto& m : ss.front().markers) labels.push_back(m.alpha0);
    WaveState s0 = mollify_initial(lr.scenario.build_map(), lr.scenario.velocity, lr.eps, lr.scenario.grid(), labels);
    for (const auto& s : ss) {
        Frame f = frame_from(s, s0.base);
        lr.tr.frames.push_back(std::move(f));
    }
    for (std::size_t k = 0; k < 7; ++k) lr.tr.baseline[k] = std::max(lr.tr.frames.front().monitors[k], 1.0);
    if (fs::exists(d / "log.txt")) {
        RunLog l = parse_log(read_text(d / "log.txt"));
        lr.tr.completed = l.completed;
        lr.tr.blowup = l.blowup;
        lr.tr.rejections = l.rejections;
        lr.tr.stop_reason = l.stop_reason;
    }
    return lr;
}

std::vector<Verdict> analyze_runs(std::vector<LoadedRun> runs, const std::string& plot_dir) {
    std::sort(runs.begin(), runs.end(), [](const LoadedRun& a, const LoadedRun& b) { return a.eps > b.eps; });
    std::vector<Verdict> out;
    if (runs.empty()) return out;
    const Scenario& sc = runs.front().scenario;
    const bool crest = sc.has_crest(), smooth = smooth_kind(sc), multi = runs.size() >= 2;
    const bool zero_vel = sc.velocity.kind == VelocityKind::zero || sc.velocity.mu == 0.0;

    std::string energy_csv = "eps,t", ratio_csv = "eps,alpha0,t,ratio,ratio_pred,band\n",
                angle_csv = "eps,t,left,right,interior_angle,crest_factor_re,crest_factor_im\n",
                tip_csv = "eps,re_tip,im_tip,abs_tip\n";
    for (auto n : energy_term_names()) energy_csv += std::string(",") + n;
    energy_csv += ",total\n";

    double holo = 0.0, energy_growth = 0.0, band_margin = -1e300, min_node = 1e300, modulus = 0.0, crest_factor = 0.0,
           mismatch = 0.0, tip_margin = 0.0, lap = 0.0, bdry = 0.0, gres = 0.0, away = 0.0, cusp_min = 1e300;
    bool band_ok = true, tip_ok = true, completed = true;
    int rejections = 0;
    std::vector<double> drift, probe, crest_grad, linf, K, tip_abs;
    std::vector<cplx> tips;
    TangentVanishing finest_tv;

    for (const LoadedRun& r : runs) {
        const Trajectory& tr = r.tr;
        const Grid g = r.scenario.grid();
        const double window = 16.0 * g.spacing;
        completed = completed && tr.completed;
        rejections += tr.rejections;
        double e0 = 0.0;
        for (std::size_t q = 0; q < tr.frames.size(); ++q) {
            const Frame& f = tr.frames[q];
            holo = std::max(holo, f.state.holo_residual);
            EnergyReport e = energy_boundary(f.state);
            if (q == 0) e0 = e.total;
            energy_growth = std::max(energy_growth, e.total / e0);
            energy_csv += g17(r.eps) + "," + g17(f.state.t);
            for (double x : e.terms) energy_csv += "," + g17(x);
            energy_csv += "," + g17(e.total) + "\n";
        }
        SingularSetReport ss = singular_set_track(tr);
        band_ok = band_ok && ss.band_ok;
        band_margin = std::max(band_margin, ss.worst_band_margin);
        min_node = std::min(min_node, ss.min_node_ratio);
        for (const auto& m : ss.markers)
            for (std::size_t k = 0; k < m.t.size(); ++k)
                ratio_csv += g17(r.eps) + "," + g17(m.alpha0) + "," + g17(m.t[k]) + "," + g17(m.ratio[k]) + "," +
                             g17(m.ratio_pred[k]) + "," + g17(m.band[k]) + "\n";

        const Frame& last = tr.frames.back();
        std::vector<double> crests;
        if (crest) crests.push_back(r.scenario.crest());
        PressureReport pr = pressure_identities(last, crests, window);
        lap = std::max(lap, pr.laplacian_residual);
        bdry = std::max(bdry, pr.boundary_residual);
        gres = std::max(gres, pr.g_residual);
        if (!crest) continue;

        RigidityReport rg = angle_rigidity(tr, r.scenario.crest());
        for (std::size_t k = 0; k < rg.t.size(); ++k) {
            cplx cf = 1.0;
            for (const auto& p : rg.probes)
                if (p.offset == 0.0) cf = p.predicted[k];
            angle_csv += g17(r.eps) + "," + g17(rg.t[k]) + "," + g17(rg.left[k]) + "," + g17(rg.right[k]) + "," +
                         g17(rg.interior_angle[k]) + "," + g17(cf.real()) + "," + g17(cf.imag()) + "\n";
        }
        modulus = std::max(modulus, rg.max_modulus_error);
        crest_factor = std::max(crest_factor, rg.crest_factor_error);
        mismatch = std::max(mismatch, rg.max_mismatch);
        tip_ok = tip_ok && rg.tip_bound_ok;
        tip_margin = std::max(tip_margin, rg.tip_bound_margin);
        drift.push_back(rg.inner_angle_drift);
        probe.push_back(crest_factor_final(rg));
        tips.push_back(rg.tip.back());
        tip_abs.push_back(rg.tip_final);
        tip_csv += g17(r.eps) + "," + g17(rg.tip.back().real()) + "," + g17(rg.tip.back().imag()) + "," +
                   g17(rg.tip_final) + "\n";
        crest_grad.push_back(pr.crest_gradient);

        TangentVanishing tv = tangent_vanishing(last, r.scenario.crest(), window);
        away = std::max(away, tv.away_max_rel);
        linf.push_back(tv.linf_bound);
        finest_tv = tv;

        if (r.scenario.kind == "cusp") {
            CuspEvolution cu = cusp_evolution_check(tr, r.scenario.crest(), r.eps, 0.1);
            for (std::size_t k = 0; k < cu.t.size(); ++k)
                if (cu.t[k] <= 0.1 + 1e-12) cusp_min = std::min(cusp_min, cu.min_ratio[k]);
            K.push_back(cu.K);
        }
    }

    out.push_back(verdict("run_completed", true, completed, rejections, "rejections"));
    out.push_back(verdict("holo_residual", true, holo <= sc.holo_ceiling, holo));
    out.push_back(verdict("energy_bounded", smooth, energy_growth <= 2.0, energy_growth, "max E(t)/E(0)"));
    out.push_back(verdict("singular_set_band", true, band_ok, band_margin, "max |log ratio| - t*M(t)"));
    out.push_back(verdict("no_new_singularity", smooth, min_node >= 0.1, min_node, "min node ratio"));
    out.push_back(verdict("pressure_laplacian", true, lap <= 1e-5, lap));
    out.push_back(verdict("pressure_boundary", true, bdry <= 1e-3, bdry));
    out.push_back(verdict("pressure_g", true, gres <= 1e-3, gres));
    out.push_back(verdict("unit_modulus_prediction", crest, modulus <= 1e-12, modulus));
    bool drift_ok = !multi || strictly_decreasing(drift);
    out.push_back(verdict("angle_constant", crest && zero_vel, crest_factor <= 1e-10 && drift_ok,
                          drift.empty() ? 0.0 : drift.back(), "innermost probe angle drift at finest eps"));
    out.push_back(verdict("tangent_factor_agreement", crest, mismatch <= 1e-3, mismatch));
    double contraction = multi ? min_contraction(probe) : 0.0;
    out.push_back(verdict("crest_limit_contraction", crest && multi, strictly_decreasing(probe) && contraction >= kContraction,
                          contraction, "min per-level contraction of crest factor"));
    out.push_back(verdict("tip_bound", crest, tip_ok, tip_margin, "max |Ztt - i| / (|A1|_inf |1/Zap|)"));
    double tip = tip_abs.empty() ? 0.0 : tip_abs.back();
    std::string tip_note = "finest eps value";
    if (tips.size() >= 3) {
        LimitEstimate e = extrapolate_ladder(tips);
        tip = std::abs(e.value);
        tip_note = e.converged ? "extrapolated" : "extrapolation not contracting; finest eps value";
    }
    out.push_back(verdict("tip_acceleration_limit", crest && multi, tip <= 0.05, tip, tip_note));
    out.push_back(verdict("pressure_crest_decay", crest && multi, strictly_decreasing(crest_grad),
                          crest_grad.empty() ? 0.0 : crest_grad.back()));
    out.push_back(verdict("tangent_away", crest, away <= 1e-4, away));
    double tc = finest_tv.away_median > 0.0 ? std::abs(finest_tv.crest_limit) / finest_tv.away_median : 0.0;
    out.push_back(verdict("tangent_crest", crest && !zero_vel, tc <= 0.05, tc, "crest limit / away median, finest eps"));
    double lr = linf.size() >= 2 && linf.front() > 0.0 ? *std::max_element(linf.begin(), linf.end()) / linf.front() : 0.0;
    out.push_back(verdict("linf_monitor", crest && multi && !zero_vel, lr <= 2.0, lr, "max over ladder / coarsest"));
    out.push_back(verdict("cusp_lower_bound", sc.kind == "cusp", cusp_min >= 0.5, cusp_min, "min ratio, t <= 0.1"));
    double kspread = 0.0;
    if (K.size() >= 2) {
        double mean = 0.0;
        for (double k : K) mean += k / K.size();
        for (double k : K) kspread = std::max(kspread, std::abs(k - mean) / mean);
    }
    out.push_back(verdict("cusp_K_stable", sc.kind == "cusp" && multi, kspread <= 0.3, kspread));

    if (!plot_dir.empty()) {
        fs::create_directories(plot_dir);
        write_text(fs::path(plot_dir) / "energy_vs_t.csv", energy_csv);
        write_text(fs::path(plot_dir) / "ratio_vs_t.csv", ratio_csv);
        if (crest) {
            write_text(fs::path(plot_dir) / "angle_vs_t.csv", angle_csv);
            write_text(fs::path(plot_dir) / "tip_vs_eps.csv", tip_csv);
        }
    }
    return out;
}

std::string format_verdicts(const std::vector<Verdict>& v) {
    std::string s;
    for (const auto& x : v) {
        s += x.name + " = " + x.status + " " + e6(x.margin);
        if (!x.note.empty()) s += " (" + x.note + ")";
        s += "\n";
    }
    return s;
}

int cmd_init(const Scenario& sc, std::ostream& out) {
    ConformalMap m = sc.build_map();
    const Grid g = sc.grid();
    auto row = m.row(g, 0.0);
    JordanResult jr = validate_jordan(g, row->Z);
    if (!jr.simple) throw GeometryRejected("interface self-intersects near alpha = " + g17(jr.alpha_i));
    std::ostringstream rep;
    rep << "scenario_hash = " << sc.hash() << "\n"
        << "kind = " << sc.kind << "\n"
        << "jordan = simple\n"
        << "chord_arc_delta = " << g17(chord_arc_constant(g, row->Z)) << "\n";
    InteriorEnergy ie = energy_interior(m, sc.velocity, g);
    rep << "E1 = " << g17(ie.E1) << "\n"
        << "c0 = " << g17(ie.c0) << "\n"
        << "E1_argmax_depth = " << g17(ie.argmax_depth) << "\n";
    if (sc.kind == "corner") {
        double p = fit_corner_exponent(m, sc.corner_x0, 1e-4, 1e-1);
        rep << "exponent_fit = " << g17(p) << "\n"
            << "exponent_target = " << g17(1.0 - sc.corner_nu) << "\n"
            << "exponent_rel_error = " << g17(std::abs(p - (1.0 - sc.corner_nu)) / (1.0 - sc.corner_nu)) << "\n";
    } else if (sc.kind == "cusp") {
        CuspFit f = fit_cusp_model(m, sc.cusp_x0, 1e-5, 1e-2);
        rep << "cusp_fit_amplitude = " << g17(f.amplitude) << "\n"
            << "cusp_fit_y0 = " << g17(f.y0) << "\n"
            << "cusp_fit_max_log_residual = " << g17(f.max_log_residual) << "\n";
    }
    fs::create_directories(sc.output_dir);
    RunConfig rc0 = sc.run_config();
    rc0.tmax = 0.0;
    for (double eps : sc.epsilons) {
        WaveState s = initial_state(sc, m, eps);
        Trajectory tr = run(s, rc0);
        fs::path d = fs::path(sc.output_dir) / eps_dir_name(eps);
        fs::create_directories(d);
        write_text(d / "scenario.txt", sc.to_text());
        write_snapshot((d / snap_name(0)).string(), snapshot_of(tr.frames.front(), sc.hash()));
        EnergyReport e = energy_boundary(s);
        rep << "energy[" << g17(eps) << "] = " << g17(e.total) << "\n";
    }
    write_text(fs::path(sc.output_dir) / "init_report.txt", rep.str());
    out << rep.str();
    return kOk;
}

int cmd_run(const Scenario& sc, std::ostream& out, std::vector<std::string>* dirs) {
    ConformalMap m = sc.build_map();
    int code = kOk;
    const std::string hash = sc.hash();
    for (double eps : sc.epsilons) {
        WaveState s = initial_state(sc, m, eps);
        fs::path d = fs::path(sc.output_dir) / eps_dir_name(eps);
        fs::create_directories(d);
        for (const auto& e : fs::directory_iterator(d))
            if (e.path().filename().string().rfind("snap_", 0) == 0) fs::remove(e.path());
        write_text(d / "scenario.txt", sc.to_text());
        std::ofstream csv(d / "summary.csv", std::ios::binary);
        csv << summary_header(s);
        RunConfig rc = sc.run_config();
        std::size_t k = 0;
        Monitors base{};
        auto on_frame = [&](const Frame& f) {
            if (k == 0)
                for (std::size_t i = 0; i < 7; ++i) base[i] = std::max(f.monitors[i], 1.0);
            bool good = true;
            for (std::size_t i = 0; i < 7; ++i)
                if (!(f.monitors[i] <= rc.monitor_ceiling * base[i])) good = false;
            if (good) {
                write_snapshot((d / snap_name(k)).string(), snapshot_of(f, hash));
                csv << summary_row(f);
            }
            ++k;
        };
        Trajectory tr = run(s, rc, on_frame);
        write_text(d / "log.txt", format_log(tr));
        out << d.string() << ": " << (tr.completed ? "completed" : "stopped") << ", frames " << tr.frames.size()
            << ", rejections " << tr.rejections << ", dt_final " << g17(tr.dt_final);
        if (!tr.stop_reason.empty()) out << ", " << tr.stop_reason;
        out << "\n";
        if (tr.blowup) code = kBlowup;
        else if (!tr.completed && code == kOk) code = kFailure;
        if (dirs) dirs->push_back(d.string());
    }
    return code;
}

int cmd_analyze(const std::vector<std::string>& dirs, const std::string& out_dir, std::ostream& out) {
    if (dirs.empty()) throw ScenarioError("analyze: no trajectory directories given");
    std::vector<LoadedRun> runs;
    for (const auto& d : dirs) runs.push_back(load_run(d));
    std::string od = out_dir.empty() ? fs::path(dirs.front()).parent_path().string() : out_dir;
    if (od.empty()) od = ".";
    std::string v = format_verdicts(analyze_runs(std::move(runs), od));
    write_text(fs::path(od) / "verdict.txt", v);
    out << v;
    return kOk;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Angled-crest and cusp water-wave simulator"};
    app.require_subcommand(1);
    std::string scenario_path, out_dir, eps_list;
    bool allow = false;
    std::vector<std::string> dirs;
    auto add_common = [&](CLI::App* c) {
        c->add_option("--scenario", scenario_path, "scenario file")->required();
        c->add_option("--out", out_dir, "output directory (overrides output.dir)");
        c->add_option("--epsilons", eps_list, "comma-separated epsilon ladder (overrides epsilons)");
        c->add_flag("--allow-inadmissible", allow, "permit corners with nu >= 1/2");
    };
    CLI::App* init = app.add_subcommand("init", "validate the scenario and write initial snapshots");
    CLI::App* runc = app.add_subcommand("run", "evolve every epsilon member");
    CLI::App* sweep = app.add_subcommand("sweep", "run followed by analyze");
    CLI::App* an = app.add_subcommand("analyze", "diagnostics over trajectory directories");
    add_common(init);
    add_common(runc);
    add_common(sweep);
    an->add_option("dirs", dirs, "trajectory directories")->required();
    an->add_option("--out", out_dir, "directory for verdict and plot files");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kBadInput;
    }
    try {
        if (an->parsed()) return cmd_analyze(dirs, out_dir, out);
        Scenario sc = load_scenario(scenario_path);
        if (!out_dir.empty()) sc.output_dir = out_dir;
        if (!eps_list.empty()) {
            sc.epsilons = parse_number_list("--epsilons", eps_list);
        }
        if (allow) sc.allow_inadmissible = true;
        sc.validate();
        if (init->parsed()) return cmd_init(sc, out);
        std::vector<std::string> made;
        int code = cmd_run(sc, out, &made);
        if (sweep->parsed()) {
            int a = cmd_analyze(made, sc.output_dir, out);
            if (code == kOk) code = a;
        }
        return code;
    } catch (const ScenarioError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kBadInput;
    } catch (const GeometryRejected& e) {
        err << "geometry rejected: " << e.what() << "\n";
        return kGeometry;
    } catch (const IllPosedInput& e) {
        err << "geometry rejected: " << e.what() << "\n";
        return kGeometry;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace cwave
