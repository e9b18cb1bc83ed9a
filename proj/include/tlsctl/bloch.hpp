#pragma once

#include <tlsctl/errors.hpp>
#include <tlsctl/pulse.hpp>
#include <tlsctl/rates.hpp>
#include <tlsctl/rk4.hpp>
#include <tlsctl/scenario.hpp>

#include <Eigen/Core>

#include <string>
#include <vector>

namespace tlsctl {

using Mat3 = Eigen::Matrix3d;

inline constexpr double kBlochNormAlarm = 1.5;

/// p' = M p + R at one node.
struct DriftSystem {
    Mat3 m = Mat3::Zero();
    Vec3 r = Vec3::Zero();
};

/// Drift for a given total bias eps0 + eps and rate row.
inline DriftSystem drift_from(double bias, double delta, const RateRow& g) {
    DriftSystem d;
    d.m << 0.0, bias, 0.0,                           //
        -(bias + g.gamma_yx), -g.gamma_yy, delta,    //
        -g.gamma_zx, -delta, -g.gamma_zz;
    d.r << 0.0, -g.a_y, -g.a_z;
    return d;
}

inline DriftSystem drift_matrix(std::size_t k, const ControlPulse& pulse, const RateTable& rates,
                                const ModelParams& params) {
    return drift_from(params.eps0 + pulse.at_node(k), params.delta, rates.rows.at(k));
}

inline double purity(const Vec3& p) { return p.squaredNorm(); }

struct BlochTrajectory {
    std::vector<Vec3> p;
    std::vector<double> purity;

    [[nodiscard]] const Vec3& final_state() const { return p.back(); }
};

/// RK4 on the Bloch equation with M and R linear between nodes.
inline BlochTrajectory evolve(const ControlPulse& pulse, const ModelParams& params,
                              const RateTable& rates, const TransferTask& task) {
    const TimeGrid& grid = pulse.grid();
    const std::size_t n = grid.n_nodes();
    if (rates.rows.size() != n) throw std::invalid_argument("rate table is on a different grid");
    const double h = grid.dt();

    BlochTrajectory traj;
    traj.p.resize(n);
    traj.purity.resize(n);
    traj.p[0] = task.p_initial;
    traj.purity[0] = purity(task.p_initial);
    DriftSystem left = drift_matrix(0, pulse, rates, params);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const DriftSystem right = drift_matrix(k + 1, pulse, rates, params);
        const Mat3 mm = 0.5 * (left.m + right.m);
        const Vec3 rm = 0.5 * (left.r + right.r);
        traj.p[k + 1] = rk4_affine_step(traj.p[k], left.m, mm, right.m, left.r, rm, right.r, h);
        traj.purity[k + 1] = purity(traj.p[k + 1]);
        if (!(traj.p[k + 1].norm() <= kBlochNormAlarm)) {
            throw NumericalError("Bloch integration unstable at node " + std::to_string(k + 1) +
                                 ": |p| = " + std::to_string(traj.p[k + 1].norm()));
        }
        left = right;
    }
    return traj;
}

/// Cotangents produced by the reverse sweep of evolve().
struct EvolveAdjoint {
    std::vector<double> pulse_bar;   ///< direct dependence through eps in M
    std::vector<RateRow> rows_bar;   ///< gamma_zz already folded into gamma_yy
};

inline EvolveAdjoint evolve_adjoint(const ControlPulse& pulse, const ModelParams& params,
                                    const RateTable& rates, const BlochTrajectory& traj,
                                    const Vec3& p_final_bar) {
    const TimeGrid& grid = pulse.grid();
    const std::size_t n = grid.n_nodes();
    const double h = grid.dt();

    std::vector<Mat3> m_bar(n, Mat3::Zero());
    std::vector<Vec3> r_bar(n, Vec3::Zero());
    Vec3 p_bar = p_final_bar;
    DriftSystem right = drift_matrix(n - 1, pulse, rates, params);
    for (std::size_t k = n - 1; k-- > 0;) {
        const DriftSystem left = drift_matrix(k, pulse, rates, params);
        const Mat3 mm = 0.5 * (left.m + right.m);
        const Vec3 rm = 0.5 * (left.r + right.r);
        const auto adj =
            rk4_affine_step_adjoint(traj.p[k], left.m, mm, right.m, left.r, rm, right.r, h, p_bar);
        m_bar[k] += adj.a0 + 0.5 * adj.am;
        m_bar[k + 1] += adj.a1 + 0.5 * adj.am;
        r_bar[k] += adj.r0 + 0.5 * adj.rm;
        r_bar[k + 1] += adj.r1 + 0.5 * adj.rm;
        p_bar = adj.y;
        right = left;
    }

    EvolveAdjoint out;
    out.pulse_bar.assign(pulse.size(), 0.0);
    out.rows_bar.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Mat3& mb = m_bar[k];
        out.pulse_bar[ControlPulse::value_index(k)] += mb(0, 1) - mb(1, 0);
        RateRow& g = out.rows_bar[k];
        g.gamma_yx = -mb(1, 0);
        g.gamma_yy = -mb(1, 1) - mb(2, 2);
        g.gamma_zx = -mb(2, 0);
        g.a_y = -r_bar[k](1);
        g.a_z = -r_bar[k](2);
    }
    return out;
}

/// Integrates p' = M p + R with a time-independent drift.
inline Vec3 evolve_constant(const DriftSystem& d, const Vec3& p0, double duration,
                            std::size_t n_steps) {
    const double h = duration / static_cast<double>(n_steps);
    Vec3 p = p0;
    for (std::size_t k = 0; k < n_steps; ++k)
        p = rk4_affine_step(p, d.m, d.m, d.m, d.r, d.r, d.r, h);
    return p;
}

} // namespace tlsctl
