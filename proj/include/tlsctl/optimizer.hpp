#pragma once

#include <tlsctl/cg.hpp>
#include <tlsctl/control.hpp>

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace tlsctl {

struct OptimizerOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
    double c1 = 1e-4;
    double c2 = 0.1;
    int restart_period = 0;  ///< 0: restart every M iterations
    int max_line_search_evaluations = 40;
};

struct OptimizationReport {
    std::vector<double> cost_history;
    std::vector<double> gradient_norm_history;
    double cost = 0.0;
    double fluence = 0.0;
    double terminal_error = 0.0;
    Vec3 final_state = Vec3::Zero();
    double final_purity = 0.0;
    int iterations = 0;
    int evaluations = 0;
    int restarts = 0;
    bool converged = false;
    std::string message;
};

inline std::pair<ControlPulse, OptimizationReport>
optimize(const ControlProblem& problem, const ControlPulse& initial,
         const OptimizerOptions& options = {}) {
    const TimeGrid& grid = problem.grid();
    bool started = false;
    Objective fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        ControlPulse pulse(grid, std::vector<double>(x.data(), x.data() + x.size()));
        std::vector<double> gv;
        double f = 0.0;
        try {
            f = problem.cost_and_gradient(pulse, gv);
        } catch (const NumericalError&) {
            // a trial step too large for the grid; the line search backs off
            if (!started) throw;
            g.setConstant(x.size(), std::numeric_limits<double>::quiet_NaN());
            return std::numeric_limits<double>::infinity();
        }
        started = true;
        g = Eigen::Map<const Eigen::VectorXd>(gv.data(), static_cast<Eigen::Index>(gv.size()));
        return f;
    };

    CgOptions cg;
    cg.max_iterations = options.max_iterations;
    cg.gradient_tolerance = options.gradient_tolerance;
    cg.restart_period = options.restart_period;
    cg.line_search.c1 = options.c1;
    cg.line_search.c2 = options.c2;
    cg.line_search.max_evaluations = options.max_line_search_evaluations;

    const auto& v0 = initial.values();
    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(v0.data(), static_cast<Eigen::Index>(v0.size()));
    CgResult res = minimize_cg(fn, std::move(x0), cg);

    ControlPulse best(grid, std::vector<double>(res.x.data(), res.x.data() + res.x.size()));
    const ForwardPass fp = problem.forward(best);

    OptimizationReport report;
    report.cost_history = std::move(res.cost_history);
    report.gradient_norm_history = std::move(res.gradient_norm_history);
    report.cost = fp.cost;
    report.fluence = fp.fluence;
    report.terminal_error = fp.terminal_error;
    report.final_state = fp.trajectory.final_state();
    report.final_purity = fp.trajectory.purity.back();
    report.iterations = res.iterations;
    report.evaluations = res.evaluations;
    report.restarts = res.restarts;
    report.converged = res.converged;
    report.message = std::move(res.message);
    return {std::move(best), std::move(report)};
}

inline std::pair<ControlPulse, OptimizationReport>
optimize(const ControlPulse& initial, const ModelParams& params, const TimeGrid& grid,
         const TransferTask& task, const OptimizerOptions& options = {}) {
    return optimize(ControlProblem(params, grid, task), initial, options);
}

} // namespace tlsctl
