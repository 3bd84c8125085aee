#include <gtest/gtest.h>

#include <cmath>

#include "cwave/dynamics.hpp"
#include "cwave/errors.hpp"
#include "cwave/line_ops.hpp"
#include "oracles.hpp"

using namespace cwave;
using cd = std::complex<double>;

namespace {

BoundaryField sampled(const Grid& g, const std::function<cd(double)>& f) {
    cvec s(g.n);
    for (std::size_t j = 0; j < g.n; ++j) s[j] = f(g.node(j));
    return BoundaryField(g, std::move(s));
}

// Flat background carrying a given Z̄_t.
WaveState flat_with(const Grid& g, const std::function<cd(double)>& zbar_t) {
    WaveState s = mollify_initial(build_flat_map(), VelocityProfile{}, 0.1, g);
    s.Zt_bar = sampled(g, zbar_t);
    return s;
}

double max_diff(const cvec& a, const cvec& b, const Grid& g, double window) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (std::abs(g.node(j)) <= window) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

WaveState run_to(const WaveState& s0, double dt, double T) {
    WaveState s = s0;
    long n = std::lround(T / dt);
    for (long k = 0; k < n; ++k) s = step_rk4(s, dt);
    return s;
}

}  // namespace

TEST(A1, ZeroVelocityGivesOne) {
    Grid g(16.0, 256);
    BoundaryField a = compute_A1(BoundaryField(g, cvec(g.n, 0.0)));
    for (std::size_t j = 0; j < g.n; ++j) EXPECT_EQ(a[j], cd(1.0, 0.0));
}

TEST(A1, MatchesQuadrature) {
    Grid g(80.0, 4096);
    auto zt = [](double b) { return cd(1.0 / (b * b + 1.0), 0.0); };
    BoundaryField a = compute_A1(sampled(g, zt));
    for (double x : {0.0, 0.5, -1.25, 3.0}) {
        const double alpha = g.node(g.nearest(x));
        auto integrand = [&](double b) -> cd {
            double d = alpha - b;
            if (d == 0.0) return 0.0;
            return std::norm(zt(alpha) - zt(b)) / (d * d);
        };
        double ref = 1.0 + oracle::whole_line(integrand, alpha - 20.0, alpha + 20.0).real() / (2.0 * M_PI);
        std::size_t j = g.nearest(alpha);
        EXPECT_NEAR(a[j].real() / ref, 1.0, 1e-6) << alpha;
    }
    EXPECT_NEAR(a[g.nearest(0.0)].real(), 1.25, 1e-6);
}

TEST(A1, PositiveForRandomFields) {
    Grid g(40.0, 2048);
    for (unsigned seed = 1; seed <= 4; ++seed) {
        BoundaryField a = compute_A1(sampled(g, oracle::random_field(seed)));
        for (std::size_t j = 0; j < g.n; ++j) {
            EXPECT_GE(a[j].real(), 1.0 - 1e-10);
            EXPECT_EQ(a[j].imag(), 0.0);
        }
    }
}

TEST(B, ZeroVelocityGivesZero) {
    Grid g(16.0, 256);
    BoundaryField b = compute_b(BoundaryField(g, cvec(g.n, 0.0)), BoundaryField(g, cvec(g.n, 1.0), DecayClass::constant_plus_decaying));
    EXPECT_EQ(b.sup_norm(), 0.0);
}

TEST(B, UpperTraceExample) {
    Grid g(80.0, 4096);
    auto zt = [](double a) { return 1.0 / cd(a, 1.0); };
    // ℍZ_t = −Z_t by direct principal-value quadrature
    for (double a : {0.0, 0.7, -2.0}) EXPECT_LT(std::abs(oracle::pv_hilbert(zt, a) + zt(a)), 1e-9);
    BoundaryField one(g, cvec(g.n, 1.0), DecayClass::constant_plus_decaying);
    BoundaryField b = compute_b(sampled(g, zt), one);
    double err = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        double a = g.node(j);
        if (std::abs(a) > g.L / 2) continue;
        err = std::max(err, std::abs(b[j] - 2.0 * a / (a * a + 1.0)));
        EXPECT_EQ(b[j].imag(), 0.0);
    }
    EXPECT_LT(err, 1e-6);
}

TEST(B, LowerTraceIsAnnihilated) {
    Grid g(80.0, 4096);
    auto zt = [](double a) { return 1.0 / (cd(a, -1.0) * cd(a, -1.0)); };
    for (double a : {0.0, 1.5}) EXPECT_LT(std::abs(oracle::pv_hilbert(zt, a) - zt(a)), 1e-9);
    BoundaryField one(g, cvec(g.n, 1.0), DecayClass::constant_plus_decaying);
    EXPECT_LT(compute_b(sampled(g, zt), one).sup_norm(), 1e-8);
}

TEST(B, FloorRejects) {
    Grid g(16.0, 256);
    cvec zap(g.n, 1.0);
    zap[100] = 1e-12;
    EXPECT_THROW(compute_b(BoundaryField(g, cvec(g.n, 0.0)), BoundaryField(g, zap, DecayClass::constant_plus_decaying)),
                 StepRejected);
}

TEST(Ztt, FlatEquilibriumAndBound) {
    Grid g(16.0, 256);
    BoundaryField one(g, cvec(g.n, 1.0), DecayClass::constant_plus_decaying);
    EXPECT_EQ(compute_Ztt_bar(one, one).sup_norm(), 0.0);

    Grid gc(16.0, 4096);
    WaveState s = mollify_initial(build_corner_map(0.3, 0.0), VelocityProfile{VelocityKind::pole, 0.05, 2}, 0.1, gc);
    StepDiagnostics d;
    rhs(s, &d);
    cvec zap = s.Zap();
    double a1 = d.A1.sup_norm();
    for (std::size_t j = 0; j < gc.n; ++j)
        EXPECT_LE(std::abs(d.Ztt_bar[j] - cd(0.0, 1.0)), a1 / std::abs(zap[j]) * (1.0 + 1e-12));
}

TEST(Mollify, FlatIsShiftedLine) {
    Grid g(8.0, 128);
    WaveState s = mollify_initial(build_flat_map(), VelocityProfile{}, 0.3, g);
    cvec z = s.Z();
    for (std::size_t j = 0; j < g.n; ++j) EXPECT_LT(std::abs(z[j] - cd(g.node(j), -0.3)), 1e-14);
    EXPECT_THROW(mollify_initial(build_flat_map(), VelocityProfile{}, 0.0, g), IllPosedInput);
    EXPECT_THROW(mollify_initial(build_flat_map(), VelocityProfile{}, 1.5, g), IllPosedInput);
}

TEST(Mollify, CornerCrestScaling) {
    Grid g(16.0, 1024);
    ConformalMap m = build_corner_map(0.3, 0.0);
    std::vector<double> lx, ly;
    for (double e : {0.01, 0.005, 0.0025}) {
        WaveState s = mollify_initial(m, VelocityProfile{}, e, g);
        lx.push_back(std::log(e));
        ly.push_back(std::log(std::abs(1.0 / s.base->Zap[g.nearest(0.0)])));
    }
    EXPECT_NEAR((ly.back() - ly.front()) / (lx.back() - lx.front()), 0.7, 0.02);
}

TEST(Mollify, MarkersStartAtLagrangianLabels) {
    Grid g(8.0, 256);
    WaveState s = mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{}, 0.1, g, {0.5, -1.0, 0.0});
    ASSERT_EQ(s.markers.size(), 3u);
    EXPECT_EQ(s.markers[0].h, -1.0);
    EXPECT_EQ(s.markers[2].alpha0, 0.5);
}

TEST(Rhs, FlatRestIsEquilibrium) {
    Grid g(16.0, 256);
    WaveState s = mollify_initial(build_flat_map(), VelocityProfile{}, 0.1, g);
    Rates r = rhs(s);
    for (std::size_t j = 0; j < g.n; ++j) {
        EXPECT_EQ(r.dD[j], cd(0.0, 0.0));
        EXPECT_EQ(r.dV[j], cd(0.0, 0.0));
    }
}

TEST(Rhs, ComponentComposition) {
    Grid g(80.0, 4096);
    WaveState s = flat_with(g, [](double a) { return 1.0 / cd(a, -1.0); });
    StepDiagnostics d;
    Rates r = rhs(s, &d);
    double err = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        double a = g.node(j);
        if (std::abs(a) > g.L / 2) continue;
        cd zt = 1.0 / cd(a, 1.0);
        err = std::max(err, std::abs(r.dD[j] - (zt - 2.0 * a / (a * a + 1.0))));
        EXPECT_EQ(d.b[j].imag(), 0.0);
    }
    EXPECT_LT(err, 1e-6);
}

TEST(Step, FlatRestThousandSteps) {
    Grid g(16.0, 256);
    WaveState s = mollify_initial(build_flat_map(), VelocityProfile{}, 0.1, g);
    for (int k = 0; k < 1000; ++k) s = step_rk4(s, 1e-3);
    EXPECT_LE(s.D.sup_norm() + s.Zt_bar.sup_norm(), 1e-8);
    EXPECT_NEAR(s.t, 1.0, 1e-12);
}

TEST(Step, FourthOrderSelfConvergence) {
    Grid g(16.0, 512);
    WaveState s0 = mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{}, 0.05, g);
    WaveState a = run_to(s0, 1.0 / 32, 1.0), b = run_to(s0, 1.0 / 64, 1.0), c = run_to(s0, 1.0 / 128, 1.0);
    double e1 = max_diff(a.Zt_bar.samples(), b.Zt_bar.samples(), g, g.L);
    double e2 = max_diff(b.Zt_bar.samples(), c.Zt_bar.samples(), g, g.L);
    EXPECT_NEAR(e1 / e2, 16.0, 3.0);
}

TEST(Step, Reversibility) {
    Grid g(16.0, 512);
    WaveState s0 = mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{VelocityKind::pole, 0.05, 2}, 0.05, g);
    s0 = run_to(s0, 1.0 / 64, 0.25);
    std::vector<double> errs;
    for (double dt : {1.0 / 32, 1.0 / 64}) {
        WaveState f = step_rk4(s0, dt), r = step_rk4(f, -dt);
        errs.push_back(max_diff(r.Zt_bar.samples(), s0.Zt_bar.samples(), g, g.L));
    }
    EXPECT_LT(errs[0], 1e-5);
    EXPECT_GT(errs[0] / errs[1], 16.0);
}

TEST(Step, HolomorphyPreserved) {
    Grid g(16.0, 2048);
    WaveState s = mollify_initial(build_corner_map(0.3, 0.0), VelocityProfile{VelocityKind::pole, 0.05, 2}, 0.1, g);
    for (int k = 0; k < 20; ++k) {
        s = step_rk4(s, 1.0 / 256);
        EXPECT_LE(s.holo_residual, 1e-6);
    }
    EXPECT_LE(holomorphic_residual(s.Zt_bar), 1e-9);
}

TEST(Markers, ConstantAdvection) {
    Grid g(8.0, 256);
    BoundaryField b(g, cvec(g.n, 0.25), DecayClass::constant_plus_decaying);
    std::vector<Marker> m = {{-1.0, -1.0}, {0.3, 0.3}};
    for (int k = 0; k < 8; ++k) m = advance_markers(m, b, 0.125);
    EXPECT_NEAR(m[0].h, -0.75, 1e-14);
    EXPECT_NEAR(m[1].h, 0.55, 1e-14);
    BoundaryField fast(g, cvec(g.n, 100.0), DecayClass::constant_plus_decaying);
    EXPECT_THROW(advance_markers(m, fast, 1.0), MarkerExit);
}

TEST(Markers, StayPutWithoutFlow) {
    Grid g(8.0, 256);
    WaveState s = mollify_initial(build_flat_map(), VelocityProfile{}, 0.1, g, {-1.0, 0.0, 2.0});
    for (int k = 0; k < 10; ++k) s = step_rk4(s, 1.0 / 64);
    for (const auto& m : s.markers) EXPECT_EQ(m.h, m.alpha0);
}

TEST(Markers, TrajectoryMatchesAdvection) {
    // five-point derivative of the stored h(t) against b(h) at the same time
    Grid g(16.0, 512);
    WaveState s0 = mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{VelocityKind::pole, 0.05, 2}, 0.05, g,
                                   {-0.5, 0.25, 1.0});
    std::vector<double> res;
    for (double dt : {1.0 / 64, 1.0 / 128}) {
        RunConfig rc;
        rc.dt = dt;
        rc.tmax = 0.25;
        Trajectory tr = run(s0, rc);
        ASSERT_TRUE(tr.completed);
        double r = 0.0;
        for (std::size_t k = 2; k + 2 < tr.frames.size(); ++k)
            for (std::size_t i = 0; i < 3; ++i) {
                auto h = [&](std::size_t q) { return tr.frames[q].state.markers[i].h; };
                double dh = (h(k - 2) - 8.0 * h(k - 1) + 8.0 * h(k + 1) - h(k + 2)) / (12.0 * dt);
                double bh = interpolate(g, tr.frames[k].diag.b.samples(), h(k)).real();
                r = std::max(r, std::abs(dh - bh));
            }
        res.push_back(r);
    }
    EXPECT_LT(res[0], 1e-6);
    EXPECT_GT(res[0] / res[1], 8.0);
}

TEST(Markers, LogModulusBookkeeping) {
    Grid g(16.0, 1024);
    ConformalMap m = build_bump_map(0.3, 1.0, 0.0);
    WaveState s0 = mollify_initial(m, VelocityProfile{VelocityKind::pole, 0.05, 2}, 0.05, g, {-0.4, 0.0, 0.8});
    WaveState s = run_to(s0, 1.0 / 128, 0.5);
    cvec zap = s.Zap();
    for (std::size_t i = 0; i < 3; ++i) {
        const Marker& mk = s.markers[i];
        cd now = interpolate(g, zap, mk.h), then = interpolate(g, s0.base->Zap, mk.alpha0);
        EXPECT_NEAR(std::log(std::abs(now / then)), mk.logmod, 1e-7);
        EXPECT_NEAR(std::remainder(std::arg(now / then) - mk.phase, 2 * M_PI), 0.0, 1e-7);
    }
}

TEST(Run, FlatRestTrajectory) {
    Grid g(16.0, 256);
    RunConfig rc;
    rc.dt = 1.0 / 32;
    rc.tmax = 1.0;
    rc.output_every = 8;
    Trajectory tr = run(mollify_initial(build_flat_map(), VelocityProfile{}, 0.1, g, {0.0}), rc);
    EXPECT_TRUE(tr.completed);
    EXPECT_EQ(tr.frames.size(), 5u);
    EXPECT_DOUBLE_EQ(tr.frames.back().state.t, 1.0);
    for (const auto& f : tr.frames) EXPECT_LE(f.state.D.sup_norm() + f.state.Zt_bar.sup_norm(), 1e-8);
}

TEST(Run, StepCountRoundsUp) {
    Grid g(16.0, 256);
    RunConfig rc;
    rc.dt = 0.3;
    rc.tmax = 1.0;
    Trajectory tr = run(mollify_initial(build_flat_map(), VelocityProfile{}, 0.1, g), rc);
    EXPECT_EQ(tr.frames.size(), 5u);
    EXPECT_DOUBLE_EQ(tr.dt_initial, 0.25);
}

TEST(Run, RejectionHalvesStep) {
    Grid g(16.0, 512);
    RunConfig rc;
    rc.dt = 1.0 / 16;
    rc.tmax = 0.25;
    rc.step.holo_ceiling = 1e-13;
    Trajectory tr = run(mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{VelocityKind::pole, 0.05, 2}, 0.05, g), rc);
    EXPECT_GT(tr.rejections, 0);
    EXPECT_FALSE(tr.log.empty());
    EXPECT_LT(tr.dt_final, tr.dt_initial);
}

TEST(Run, BumpEnergyProxyBounded) {
    // the seven monitors stay of the same size as the initial data
    Grid g(16.0, 1024);
    RunConfig rc;
    rc.dt = 1.0 / 64;
    rc.tmax = 0.5;
    rc.output_every = 4;
    Trajectory tr = run(mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{}, 0.05, g), rc);
    ASSERT_TRUE(tr.completed);
    EXPECT_FALSE(tr.blowup);
    for (const auto& f : tr.frames) {
        EXPECT_LE(f.state.holo_residual, 1e-6);
        for (std::size_t j = 0; j < g.n; ++j) {
            EXPECT_LE(std::abs(f.diag.b[j].imag()), 1e-12);
            EXPECT_LE(std::abs(f.diag.A1[j].imag()), 1e-12);
            EXPECT_GE(f.diag.A1[j].real(), 1.0 - 1e-10);
        }
    }
}

TEST(Run, MonitorBlowupStopsEarly) {
    Grid g(16.0, 512);
    RunConfig rc;
    rc.dt = 1.0 / 32;
    rc.tmax = 0.5;
    rc.monitor_ceiling = 1e-3;   // forces the first output past the ceiling
    Trajectory tr = run(mollify_initial(build_bump_map(0.3, 1.0, 0.0), VelocityProfile{}, 0.05, g), rc);
    EXPECT_TRUE(tr.blowup);
    EXPECT_FALSE(tr.completed);
    EXPECT_EQ(tr.frames.size(), 2u);
}
