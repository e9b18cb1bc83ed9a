#pragma once

#include <tlsctl/bath.hpp>
#include <tlsctl/bloch.hpp>
#include <tlsctl/propagator.hpp>
#include <tlsctl/pulse.hpp>
#include <tlsctl/rates.hpp>
#include <tlsctl/scenario.hpp>

#include <stdexcept>
#include <utility>
#include <vector>

namespace tlsctl {

/// 1/2 |p - p_target|^2.
inline double terminal_error(const Vec3& p, const Vec3& target) {
    return 0.5 * (p - target).squaredNorm();
}

/// Everything the forward map produces for one pulse.
struct ForwardPass {
    PropagatorGrid propagator;
    RateTable rates;
    BlochTrajectory trajectory;
    double terminal_error = 0.0;
    double fluence = 0.0;
    double cost = 0.0;
};

/// Cost J = 1/2 |p(t_F) - p_D|^2 + (nu/2) int eps^2 dt and its exact discrete
/// gradient. The bath table depends only on the parameters and grid, so it is
/// built once and shared by every evaluation.
class ControlProblem {
public:
    ControlProblem(ModelParams params, TimeGrid grid, TransferTask task,
                   const BathQuadrature& quad = {})
        : ControlProblem(params, grid, task, make_bath_table(params, grid, quad)) {}

    ControlProblem(ModelParams params, TimeGrid grid, TransferTask task,
                   BathCorrelationTable bath)
        : params_(params), grid_(grid), task_(std::move(task)), bath_(std::move(bath)),
          fluence_weights_(fluence_weights(grid_)) {
        validate(params_);
        validate(task_);
        if (bath_.size() != grid_.n_nodes())
            throw std::invalid_argument("bath table does not match the grid");
    }

    [[nodiscard]] const ModelParams& params() const { return params_; }
    [[nodiscard]] const TimeGrid& grid() const { return grid_; }
    [[nodiscard]] const TransferTask& task() const { return task_; }
    [[nodiscard]] const BathCorrelationTable& bath() const { return bath_; }

    [[nodiscard]] ForwardPass forward(const ControlPulse& pulse) const {
        check(pulse);
        ForwardPass fp{propagate(pulse, params_), {}, {}};
        fp.rates = compute_rates(fp.propagator, bath_);
        fp.trajectory = evolve(pulse, params_, fp.rates, task_);
        fp.terminal_error = terminal_error(fp.trajectory.final_state(), task_.p_target);
        fp.fluence = fluence(pulse);
        fp.cost = fp.terminal_error + 0.5 * params_.nu * fp.fluence;
        return fp;
    }

    [[nodiscard]] double cost(const ControlPulse& pulse) const { return forward(pulse).cost; }

    /// Reverse sweep: Bloch steps, then rate quadratures, then propagator steps.
    double cost_and_gradient(const ControlPulse& pulse, std::vector<double>& grad) const {
        const ForwardPass fp = forward(pulse);
        const Vec3 p_bar = fp.trajectory.final_state() - task_.p_target;

        const EvolveAdjoint ev = evolve_adjoint(pulse, params_, fp.rates, fp.trajectory, p_bar);
        std::vector<cplx> u11_bar, u12_bar;
        rates_adjoint(fp.propagator, bath_, ev.rows_bar, u11_bar, u12_bar);
        const std::vector<double> prop_bar =
            propagate_adjoint(pulse, params_, fp.propagator, u11_bar, u12_bar);

        grad.assign(pulse.size(), 0.0);
        const auto& eps = pulse.values();
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad[i] = ev.pulse_bar[i] + prop_bar[i] +
                      params_.nu * fluence_weights_[i] * eps[i];
        }
        return fp.cost;
    }

    [[nodiscard]] std::vector<double> gradient(const ControlPulse& pulse) const {
        std::vector<double> g;
        cost_and_gradient(pulse, g);
        return g;
    }

private:
    void check(const ControlPulse& pulse) const {
        if (!(pulse.grid() == grid_)) throw DomainError("pulse/grid length mismatch");
    }

    ModelParams params_;
    TimeGrid grid_;
    TransferTask task_;
    BathCorrelationTable bath_;
    std::vector<double> fluence_weights_;
};

inline double cost(const ControlPulse& pulse, const ModelParams& params, const TimeGrid& grid,
                   const TransferTask& task) {
    return ControlProblem(params, grid, task).cost(pulse);
}

inline std::vector<double> gradient(const ControlPulse& pulse, const ModelParams& params,
                                    const TimeGrid& grid, const TransferTask& task) {
    return ControlProblem(params, grid, task).gradient(pulse);
}

} // namespace tlsctl
