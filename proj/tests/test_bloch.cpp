#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tlsctl;

namespace {

TransferTask task_from(const Vec3& p0) {
    TransferTask t;
    t.p_initial = p0;
    return t;
}

} // namespace

TEST(Bloch, ConstantDriftMatchesMatrixExponential) {
    RateRow g;
    g.gamma_yx = 0.1;
    g.gamma_yy = g.gamma_zz = 0.22;
    g.gamma_zx = 0.05;
    g.a_y = 0.09;
    g.a_z = -0.18;
    const DriftSystem d = drift_from(175.4, -75.0, g);
    const Vec3 p0(0.3, -0.2, 0.9);
    const Vec3 got = evolve_constant(d, p0, 0.094, 10000);
    EXPECT_LT((got - oracle::affine_solution(d.m, d.r, p0, 0.094)).norm(), 1e-11);
}

TEST(Bloch, NormConservedWithoutBath) {
    ModelParams p = fmo_params();
    p.alpha = 0.0;
    const TimeGrid g(p.t_final, 512);
    for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
        const ControlPulse pulse = random_smooth_pulse(g, 20.0, seed);
        const RateTable rates = compute_rates(propagate(pulse, p), make_bath_table(p, g));
        const BlochTrajectory traj = evolve(pulse, p, rates, task_from(Vec3(0.6, 0.0, 0.8)));
        for (const Vec3& v : traj.p) ASSERT_NEAR(v.norm(), 1.0, 1e-8) << "seed " << seed;
    }
}

TEST(Bloch, UndrivenCoherentRotationMatchesClosedForm) {
    ModelParams p = fmo_params();
    p.alpha = 0.0;
    const TimeGrid g(p.t_final, 512);
    const ControlPulse zero = ControlPulse::zero(g);
    const BlochTrajectory traj =
        evolve(zero, p, compute_rates(propagate(zero, p), make_bath_table(p, g)), task_from(Vec3::UnitX()));
    const Vec3 exact = oracle::affine_solution(drift_from(p.eps0, p.delta, {}).m, Vec3::Zero(),
                                               Vec3::UnitX(), p.t_final);
    // fourth-order phase error: Omega t (Omega h)^4 / 120 ~ 2e-7 at M = 512
    EXPECT_LT((traj.final_state() - exact).norm(), 5e-7);
}

TEST(Bloch, PurityDecaysUnderBath) {
    const ModelParams p = fmo_params();
    const TimeGrid g(p.t_final, 256);
    const ControlPulse zero = ControlPulse::zero(g);
    const BlochTrajectory traj =
        evolve(zero, p, compute_rates(propagate(zero, p), make_bath_table(p, g)), task_from(Vec3::UnitX()));
    EXPECT_NEAR(traj.purity.front(), 1.0, 1e-15);
    EXPECT_LT(traj.purity.back(), 0.99);
    for (double pur : traj.purity) EXPECT_LE(pur, 1.0 + 1e-3);
}

TEST(Bloch, RejectsForeignRateTable) {
    const ModelParams p = fmo_params();
    const ControlPulse zero = ControlPulse::zero(TimeGrid(p.t_final, 16));
    RateTable wrong;
    wrong.rows.resize(5);
    EXPECT_THROW(evolve(zero, p, wrong, task_from(Vec3::UnitX())), std::invalid_argument);
}

TEST(Bloch, AdjointOfRk4StepMatchesFiniteDifferences) {
    // directional derivative check on a single affine RK4 step
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    auto rnd_m = [&] { Mat3 m; for (int i = 0; i < 9; ++i) m(i) = n01(rng); return m; };
    auto rnd_v = [&] { return Vec3(n01(rng), n01(rng), n01(rng)); };
    const Mat3 a0 = rnd_m(), am = rnd_m(), a1 = rnd_m(), da0 = rnd_m(), dam = rnd_m(), da1 = rnd_m();
    const Vec3 y = rnd_v(), r0 = rnd_v(), rm = rnd_v(), r1 = rnd_v(), dy = rnd_v(), dr0 = rnd_v(),
               drm = rnd_v(), dr1 = rnd_v(), w = rnd_v();
    const double h = 0.05, e = 1e-6;
    auto f = [&](double s) {
        return w.dot(rk4_affine_step(Vec3(y + s * dy), Mat3(a0 + s * da0), Mat3(am + s * dam),
                                     Mat3(a1 + s * da1), Vec3(r0 + s * dr0), Vec3(rm + s * drm),
                                     Vec3(r1 + s * dr1), h));
    };
    const double fd = (f(e) - f(-e)) / (2 * e);
    const auto adj = rk4_affine_step_adjoint(y, a0, am, a1, r0, rm, r1, h, w);
    const double ad = adj.y.dot(dy) + (adj.a0.cwiseProduct(da0)).sum() + (adj.am.cwiseProduct(dam)).sum() +
                      (adj.a1.cwiseProduct(da1)).sum() + adj.r0.dot(dr0) + adj.rm.dot(drm) + adj.r1.dot(dr1);
    EXPECT_NEAR(ad, fd, 1e-8 * std::abs(fd));
}
