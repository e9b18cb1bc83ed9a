#pragma once

#include <tlsctl/errors.hpp>
#include <tlsctl/pulse.hpp>
#include <tlsctl/rk4.hpp>
#include <tlsctl/scenario.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace tlsctl {

using cplx = std::complex<double>;

/// Top row (u11, u12) of an SU(2) matrix; the bottom row is (-conj(u12), conj(u11)).
struct SU2Row {
    cplx u11{1.0, 0.0};
    cplx u12{0.0, 0.0};
};

/// U(t_k, 0) on every node of the grid.
struct PropagatorGrid {
    TimeGrid grid;
    std::vector<cplx> u11;
    std::vector<cplx> u12;
    double max_unitarity_defect = 0.0;

    /// Set when the unitarity defect exceeded kUnitarityFlag somewhere on the grid.
    [[nodiscard]] bool step_size_flag() const;

    [[nodiscard]] SU2Row at(std::size_t k) const { return {u11[k], u12[k]}; }
};

/// Defect above which the step size is flagged as too coarse.
inline constexpr double kUnitarityFlag = 1e-6;
/// Defect above which propagation is treated as failed.
inline constexpr double kUnitarityFailure = 1e-3;

inline bool PropagatorGrid::step_size_flag() const { return max_unitarity_defect > kUnitarityFlag; }

namespace detail {

using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;

/// Generator of dU/dt = (i/2)[delta sigma_x + bias sigma_z] U.
inline Mat2c su2_generator(double bias, double delta) {
    const cplx h(0.0, 0.5);
    Mat2c a;
    a << h * bias, h * delta, h * delta, -h * bias;
    return a;
}

/// d/d(bias) pulled back from a generator cotangent.
inline double bias_cotangent(const Mat2c& a_bar) {
    return 0.5 * (a_bar(0, 0).imag() - a_bar(1, 1).imag());
}

// The first column (u11, -conj(u12)) obeys the same complex-linear ODE as U.
inline Vec2c column_of(const SU2Row& r) { return Vec2c(r.u11, -std::conj(r.u12)); }
inline SU2Row row_of(const Vec2c& c) { return {c(0), -std::conj(c(1))}; }

} // namespace detail

/// Integrates U(t, 0) with one RK4 step per grid interval. The control is
/// piecewise linear, so the two midpoint stages use the node average.
inline PropagatorGrid propagate(const ControlPulse& pulse, const ModelParams& params) {
    const TimeGrid& grid = pulse.grid();
    const std::size_t n = grid.n_nodes();
    const double h = grid.dt();
    const detail::Vec2c zero = detail::Vec2c::Zero();

    PropagatorGrid out{grid, std::vector<cplx>(n), std::vector<cplx>(n)};
    detail::Vec2c col(cplx(1.0, 0.0), cplx(0.0, 0.0));
    out.u11[0] = 1.0;
    out.u12[0] = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double e0 = params.eps0 + pulse.at_node(k);
        const double e1 = params.eps0 + pulse.at_node(k + 1);
        const auto a0 = detail::su2_generator(e0, params.delta);
        const auto am = detail::su2_generator(0.5 * (e0 + e1), params.delta);
        const auto a1 = detail::su2_generator(e1, params.delta);
        col = rk4_affine_step(col, a0, am, a1, zero, zero, zero, h);
        const SU2Row r = detail::row_of(col);
        out.u11[k + 1] = r.u11;
        out.u12[k + 1] = r.u12;
        const double defect = std::abs(std::norm(r.u11) + std::norm(r.u12) - 1.0);
        out.max_unitarity_defect = std::max(out.max_unitarity_defect, defect);
        if (!(defect <= kUnitarityFailure)) {
            throw NumericalError("propagator step-size instability at node " +
                                 std::to_string(k + 1) + ": unitarity defect " +
                                 std::to_string(defect));
        }
    }
    return out;
}

/// Top row of U(t_k, t_j) = U(t_k, 0) U(t_j, 0)^dagger, j <= k.
inline SU2Row two_time_elements(const PropagatorGrid& prop, std::size_t k, std::size_t j) {
    if (k >= prop.u11.size() || j > k)
        throw std::out_of_range("two_time_elements: need j <= k < n_nodes");
    if (j == k) return {};
    const cplx ak = prop.u11[k], bk = prop.u12[k];
    const cplx aj = prop.u11[j], bj = prop.u12[j];
    return {ak * std::conj(aj) + bk * std::conj(bj), bk * aj - ak * bj};
}

/// Reverse sweep of propagate(): given cotangents of u11 and u12 at every
/// node, returns the cotangent of every pulse value.
inline std::vector<double> propagate_adjoint(const ControlPulse& pulse, const ModelParams& params,
                                             const PropagatorGrid& prop,
                                             const std::vector<cplx>& u11_bar,
                                             const std::vector<cplx>& u12_bar) {
    const TimeGrid& grid = pulse.grid();
    const std::size_t n = grid.n_nodes();
    const double h = grid.dt();
    const detail::Vec2c zero = detail::Vec2c::Zero();

    std::vector<double> node_bar(n, 0.0);
    // column cotangent: d = -conj(u12) pulls back as dbar = -conj(u12bar)
    auto seed = [&](std::size_t k) {
        return detail::Vec2c(u11_bar[k], -std::conj(u12_bar[k]));
    };
    detail::Vec2c col_bar = seed(n - 1);
    for (std::size_t k = n - 1; k-- > 0;) {
        const double e0 = params.eps0 + pulse.at_node(k);
        const double e1 = params.eps0 + pulse.at_node(k + 1);
        const auto a0 = detail::su2_generator(e0, params.delta);
        const auto am = detail::su2_generator(0.5 * (e0 + e1), params.delta);
        const auto a1 = detail::su2_generator(e1, params.delta);
        const auto col = detail::column_of(prop.at(k));
        const auto adj = rk4_affine_step_adjoint(col, a0, am, a1, zero, zero, zero, h, col_bar);
        const double mid_bar = detail::bias_cotangent(adj.am);
        node_bar[k] += detail::bias_cotangent(adj.a0) + 0.5 * mid_bar;
        node_bar[k + 1] += detail::bias_cotangent(adj.a1) + 0.5 * mid_bar;
        col_bar = adj.y + seed(k);
    }

    std::vector<double> out(pulse.size(), 0.0);
    for (std::size_t k = 0; k < n; ++k) out[ControlPulse::value_index(k)] += node_bar[k];
    return out;
}

} // namespace tlsctl
