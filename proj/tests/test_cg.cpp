#include <tlsctl/cg.hpp>

#include <Eigen/Cholesky>

#include <gtest/gtest.h>

#include <cmath>

using namespace tlsctl;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.setZero(x.size());
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i], b = 1.0 - x[i];
        f += 100.0 * a * a + b * b;
        g[i] += -400.0 * x[i] * a - 2.0 * b;
        g[i + 1] += 200.0 * a;
    }
    return f;
}

} // namespace

TEST(Cg, QuadraticConvergesInAboutNSteps) {
    const int n = 10;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = 1.0 + i;
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
    Objective fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = a * x - b;
        return 0.5 * x.dot(a * x) - b.dot(x);
    };
    CgOptions opt;
    opt.gradient_tolerance = 1e-10;
    const CgResult r = minimize_cg(fn, Eigen::VectorXd::Zero(n), opt);
    EXPECT_TRUE(r.converged) << r.message;
    EXPECT_LT((r.x - a.ldlt().solve(b)).norm(), 1e-8);
    EXPECT_LE(r.iterations, 3 * n);
}

TEST(Cg, Rosenbrock) {
    Eigen::VectorXd x0(4);
    x0 << -1.2, 1.0, -1.2, 1.0;
    CgOptions opt;
    opt.max_iterations = 2000;
    const CgResult r = minimize_cg(rosenbrock, x0, opt);
    EXPECT_LT((r.x - Eigen::VectorXd::Ones(4)).norm(), 1e-5) << r.message;
}

TEST(Cg, MonotoneAndDescentDirections) {
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    const CgResult r = minimize_cg(rosenbrock, x0, {});
    ASSERT_GE(r.cost_history.size(), 2u);
    for (std::size_t i = 1; i < r.cost_history.size(); ++i)
        EXPECT_LE(r.cost_history[i], r.cost_history[i - 1]);
    for (double d : r.directional_derivatives) EXPECT_LT(d, 0.0);
    EXPECT_EQ(r.cost_history.size(), r.gradient_norm_history.size());
}

TEST(Cg, StrongWolfeConditionsHold) {
    Eigen::VectorXd x(2), d(2), g;
    x << -1.2, 1.0;
    const double f0 = rosenbrock(x, g);
    d = -g;
    LineSearchOptions ls;
    const double slope = g.dot(d);
    detail::LinePoint out;
    int evals = 0;
    ASSERT_TRUE(strong_wolfe_search(rosenbrock, x, d, f0, slope, 1e-3, ls, out, evals));
    Eigen::VectorXd g1;
    const double f1 = rosenbrock(x + out.a * d, g1);
    EXPECT_LE(f1, f0 + ls.c1 * out.a * slope);
    EXPECT_LE(std::abs(g1.dot(d)), ls.c2 * std::abs(slope));
}

TEST(Cg, ZeroIterationsReturnsStart) {
    Eigen::VectorXd x0(2);
    x0 << 0.5, 0.5;
    CgOptions opt;
    opt.max_iterations = 0;
    const CgResult r = minimize_cg(rosenbrock, x0, opt);
    EXPECT_EQ(r.x, x0);
    EXPECT_EQ(r.iterations, 0);
    Eigen::VectorXd g;
    EXPECT_EQ(r.f, rosenbrock(x0, g));
}

TEST(Cg, StationaryStartConvergesImmediately) {
    const CgResult r = minimize_cg(rosenbrock, Eigen::VectorXd::Ones(3), {});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 0);
}
