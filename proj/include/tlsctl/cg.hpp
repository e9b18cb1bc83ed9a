#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tlsctl {

struct LineSearchOptions {
    double c1 = 1e-4;  ///< sufficient decrease
    double c2 = 0.1;   ///< strong curvature
    double expansion = 4.0;
    int max_evaluations = 40;
};

struct CgOptions {
    int max_iterations = 500;
    /// stop when |g|_inf < gradient_tolerance * max(1, |f|)
    double gradient_tolerance = 1e-8;
    /// restart with steepest descent every this many iterations; 0 means the dimension
    int restart_period = 0;
    LineSearchOptions line_search;
};

struct CgResult {
    Eigen::VectorXd x;
    double f = 0.0;
    std::vector<double> cost_history;           ///< accepted iterates, starting with x0
    std::vector<double> gradient_norm_history;  ///< inf-norms, aligned with cost_history
    std::vector<double> directional_derivatives; ///< g.d at the start of each accepted step
    int iterations = 0;
    int evaluations = 0;
    int restarts = 0;
    bool converged = false;
    std::string message;
};

/// Objective: returns f(x) and writes the gradient.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

namespace detail {

struct LinePoint {
    double a = 0.0;
    double f = 0.0;
    double slope = 0.0;
    Eigen::VectorXd g;
};

/// Minimizer of the cubic through (a, fa, da), (b, fb, db); NaN if degenerate.
inline double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
}

} // namespace detail

/// Strong-Wolfe line search (bracketing phase followed by zoom with
/// safeguarded cubic interpolation). On success `out` holds the accepted point.
inline bool strong_wolfe_search(const Objective& fn, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& d, double f0, double slope0,
                                double a_init, const LineSearchOptions& opt,
                                detail::LinePoint& out, int& evaluations) {
    using detail::LinePoint;
    auto eval = [&](double a) {
        LinePoint p;
        p.a = a;
        p.g.resize(x.size());
        p.f = fn(x + a * d, p.g);
        p.slope = p.g.dot(d);
        ++evaluations;
        return p;
    };
    auto armijo_fails = [&](const LinePoint& p) { return !(p.f <= f0 + opt.c1 * p.a * slope0); };
    auto curvature_ok = [&](const LinePoint& p) {
        return std::abs(p.slope) <= -opt.c2 * slope0;
    };

    int budget = opt.max_evaluations;
    auto zoom = [&](LinePoint lo, LinePoint hi) -> bool {
        while (budget-- > 0) {
            const double width = hi.a - lo.a;
            double a = detail::cubic_minimizer(lo.a, lo.f, lo.slope, hi.a, hi.f, hi.slope);
            const double lo_lim = lo.a + 0.1 * width, hi_lim = hi.a - 0.1 * width;
            if (!std::isfinite(a) || (a - std::min(lo_lim, hi_lim)) * (a - std::max(lo_lim, hi_lim)) > 0.0)
                a = lo.a + 0.5 * width;
            if (std::abs(width) <= 1e-14 * std::abs(lo.a)) break;
            LinePoint p = eval(a);
            if (!std::isfinite(p.f) || armijo_fails(p) || p.f >= lo.f) {
                hi = p;
            } else {
                if (curvature_ok(p)) {
                    out = p;
                    return true;
                }
                if (p.slope * (hi.a - lo.a) >= 0.0) hi = lo;
                lo = p;
            }
        }
        // out of budget: accept the best sufficient-decrease point seen
        if (lo.a > 0.0) {
            out = lo;
            return true;
        }
        return false;
    };

    LinePoint prev;
    prev.a = 0.0;
    prev.f = f0;
    prev.slope = slope0;
    double a = a_init;
    for (int i = 0; budget-- > 0; ++i) {
        LinePoint p = eval(a);
        if (!std::isfinite(p.f) || armijo_fails(p) || (i > 0 && p.f >= prev.f)) {
            if (!std::isfinite(p.f)) p.f = std::numeric_limits<double>::max();
            return zoom(prev, p);
        }
        if (curvature_ok(p)) {
            out = p;
            return true;
        }
        if (p.slope >= 0.0) return zoom(p, prev);
        prev = p;
        a *= opt.expansion;
    }
    if (prev.a > 0.0) {
        out = prev;
        return true;
    }
    return false;
}

/// Polak-Ribiere+ nonlinear conjugate gradient with strong-Wolfe steps.
/// Restarts with steepest descent when beta < 0, when the new direction is
/// not a descent direction, and every restart_period iterations.
inline CgResult minimize_cg(const Objective& fn, Eigen::VectorXd x0, const CgOptions& opt) {
    CgResult res;
    const int n = static_cast<int>(x0.size());
    const int period = opt.restart_period > 0 ? opt.restart_period : std::max(n, 1);

    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd g(x.size());
    double f = fn(x, g);
    ++res.evaluations;
    res.cost_history.push_back(f);
    res.gradient_norm_history.push_back(g.size() ? g.cwiseAbs().maxCoeff() : 0.0);

    Eigen::VectorXd d = -g;
    double prev_step = 0.0, prev_slope = 0.0;
    int since_restart = 0;
    while (true) {
        const double gnorm = res.gradient_norm_history.back();
        if (gnorm < opt.gradient_tolerance * std::max(1.0, std::abs(f))) {
            res.converged = true;
            res.message = "gradient tolerance reached";
            break;
        }
        if (res.iterations >= opt.max_iterations) {
            res.message = "iteration limit reached";
            break;
        }
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            d = -g;
            slope = -g.squaredNorm();
            ++res.restarts;
            since_restart = 0;
        }
        double a_init;
        if (res.iterations == 0 || prev_step <= 0.0)
            a_init = std::max(std::abs(f), 1e-8) / (-slope);
        else
            a_init = prev_step * prev_slope / slope;  // N&W heuristic, keeps a*g.d constant
        if (!std::isfinite(a_init) || a_init <= 0.0) a_init = 1.0;

        detail::LinePoint accepted;
        if (!strong_wolfe_search(fn, x, d, f, slope, a_init, opt.line_search, accepted,
                                 res.evaluations)) {
            if (since_restart > 0) {
                // retry once along steepest descent before giving up
                d = -g;
                ++res.restarts;
                since_restart = 0;
                prev_step = 0.0;
                continue;
            }
            res.message = "line search failed to find an acceptable step";
            break;
        }

        res.directional_derivatives.push_back(slope);
        x += accepted.a * d;
        const Eigen::VectorXd g_old = g;
        const double f_old = f;
        f = accepted.f;
        g = accepted.g;
        prev_step = accepted.a;
        prev_slope = slope;
        ++res.iterations;
        ++since_restart;
        res.cost_history.push_back(f);
        res.gradient_norm_history.push_back(g.cwiseAbs().maxCoeff());

        if (f_old - f <= std::numeric_limits<double>::epsilon() * std::abs(f_old)) {
            res.message = "no further decrease possible";
            break;
        }

        double beta = g.dot(g - g_old) / g_old.squaredNorm();
        if (!(beta > 0.0) || since_restart >= period) {
            beta = 0.0;
            ++res.restarts;
            since_restart = 0;
        }
        d = -g + beta * d;
    }
    res.x = std::move(x);
    res.f = f;
    return res;
}

} // namespace tlsctl
