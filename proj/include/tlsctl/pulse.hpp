#pragma once

#include <tlsctl/errors.hpp>
#include <tlsctl/scenario.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace tlsctl {

/// Discretized control eps_1 ... eps_M on nodes t_1 ... t_M.
///
/// Between nodes the field is piecewise linear. The node-0 value is held
/// equal to eps_1, so the first subinterval carries a constant field.
class ControlPulse {
public:
    ControlPulse(TimeGrid grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.n_steps())
            throw DomainError("pulse/grid length mismatch: " + std::to_string(values_.size()) +
                              " values for " + std::to_string(grid_.n_steps()) + " steps");
        for (double v : values_)
            if (!std::isfinite(v)) throw DomainError("pulse values must be finite");
    }

    static ControlPulse zero(const TimeGrid& grid) {
        return ControlPulse(grid, std::vector<double>(grid.n_steps(), 0.0));
    }

    [[nodiscard]] const TimeGrid& grid() const { return grid_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    /// eps(t_k) for k = 0 ... M.
    [[nodiscard]] double at_node(std::size_t k) const { return values_[k == 0 ? 0 : k - 1]; }

    /// Index into values() that node k reads from.
    [[nodiscard]] static std::size_t value_index(std::size_t k) { return k == 0 ? 0 : k - 1; }

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// Trapezoid weights w_0 ... w_M of the grid.
inline std::vector<double> trapezoid_weights(const TimeGrid& grid) {
    std::vector<double> w(grid.n_nodes(), grid.dt());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

/// Fluence int eps^2 dt by the trapezoid rule over nodes 0 ... M.
inline double fluence(const ControlPulse& pulse) {
    const auto w = trapezoid_weights(pulse.grid());
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double e = pulse.at_node(k);
        sum += w[k] * e * e;
    }
    return sum;
}

/// d(fluence)/d(eps_i) = 2 * weights[i] * eps_i; the first weight absorbs node 0.
inline std::vector<double> fluence_weights(const TimeGrid& grid) {
    const auto w = trapezoid_weights(grid);
    std::vector<double> out(grid.n_steps(), 0.0);
    for (std::size_t k = 0; k < w.size(); ++k) out[ControlPulse::value_index(k)] += w[k];
    return out;
}

} // namespace tlsctl
