#pragma once

#include <tlsctl/bath.hpp>
#include <tlsctl/propagator.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace tlsctl {

/// Relaxation rates and inhomogeneous terms at one node (cm^-1 for the rates).
struct RateRow {
    double gamma_yx = 0.0;
    double gamma_yy = 0.0;
    double gamma_zx = 0.0;
    double gamma_zz = 0.0;
    double a_y = 0.0;
    double a_z = 0.0;
};

struct RateTable {
    std::vector<RateRow> rows;
};

/// b_ij(t_k, t_j) kernels.
struct KernelB {
    double yx = 0.0;
    double yy = 0.0;
    double zx = 0.0;
};

namespace detail {

inline KernelB kernel_from_row(const SU2Row& u) {
    const cplx s = u.u11 * u.u11 - u.u12 * u.u12;
    const cplx q = u.u11 * std::conj(u.u12);
    return {s.imag(), s.real(), -2.0 * q.real()};
}

inline void check_tables(const PropagatorGrid& prop, const BathCorrelationTable& bath) {
    if (bath.size() != prop.u11.size())
        throw std::invalid_argument("bath table and propagator are on different grids");
}

} // namespace detail

/// b_yx = Im[U11^2 - U12^2], b_yy = Re[U11^2 - U12^2], b_zx = -2 Re[U11 U12*]
/// with U = U(t_k, t_j).
inline KernelB kernel_b(const PropagatorGrid& prop, std::size_t k, std::size_t j) {
    return detail::kernel_from_row(two_time_elements(prop, k, j));
}

/// History integrals over [0, t_k] by the trapezoid rule on the grid nodes:
///   Gamma_ij = int M'(t - t') b_ij,   Gamma_zz = Gamma_yy,
///   A_y = 2 int M''(t - t') Re[U11 U12*] = -int M'' b_zx,
///   A_z = int M''(t - t') Im[U11^2 - U12^2] = int M'' b_yx.
inline RateRow rates_at(std::size_t k, const PropagatorGrid& prop,
                        const BathCorrelationTable& bath) {
    detail::check_tables(prop, bath);
    RateRow row;
    if (k == 0) return row;
    const double h = prop.grid.dt();
    for (std::size_t j = 0; j <= k; ++j) {
        const double w = (j == 0 || j == k) ? 0.5 * h : h;
        const double mr = w * bath.m_real[k - j];
        const double mi = w * bath.m_imag[k - j];
        const KernelB b = kernel_b(prop, k, j);
        row.gamma_yx += mr * b.yx;
        row.gamma_yy += mr * b.yy;
        row.gamma_zx += mr * b.zx;
        row.a_y -= mi * b.zx;
        row.a_z += mi * b.yx;
    }
    row.gamma_zz = row.gamma_yy;
    return row;
}

inline RateTable compute_rates(const PropagatorGrid& prop, const BathCorrelationTable& bath) {
    RateTable table;
    table.rows.resize(prop.u11.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k) table.rows[k] = rates_at(k, prop, bath);
    return table;
}

/// Pulls cotangents of every rate row back onto the propagator nodes.
/// gamma_zz is not an independent output; callers fold its cotangent into gamma_yy.
inline void rates_adjoint(const PropagatorGrid& prop, const BathCorrelationTable& bath,
                          const std::vector<RateRow>& rows_bar, std::vector<cplx>& u11_bar,
                          std::vector<cplx>& u12_bar) {
    detail::check_tables(prop, bath);
    const std::size_t n = prop.u11.size();
    const double h = prop.grid.dt();
    u11_bar.assign(n, cplx{});
    u12_bar.assign(n, cplx{});
    for (std::size_t k = 1; k < n; ++k) {
        const RateRow& g = rows_bar[k];
        const cplx ak = prop.u11[k], bk = prop.u12[k];
        cplx ak_bar{}, bk_bar{};
        // j == k uses U = I exactly and has no dependence on the pulse
        for (std::size_t j = 0; j < k; ++j) {
            const double w = (j == 0) ? 0.5 * h : h;
            const double mr = w * bath.m_real[k - j];
            const double mi = w * bath.m_imag[k - j];
            const SU2Row u = two_time_elements(prop, k, j);

            const cplx s_bar(mr * g.gamma_yy, mr * g.gamma_yx + mi * g.a_z);
            const double q_bar = -2.0 * mr * g.gamma_zx + 2.0 * mi * g.a_y;

            const cplx v11 = std::conj(2.0 * u.u11) * s_bar + u.u12 * q_bar;
            const cplx v12 = std::conj(-2.0 * u.u12) * s_bar + u.u11 * q_bar;

            const cplx aj = prop.u11[j], bj = prop.u12[j];
            ak_bar += aj * v11 - std::conj(bj) * v12;
            bk_bar += bj * v11 + std::conj(aj) * v12;
            u11_bar[j] += ak * std::conj(v11) + std::conj(bk) * v12;
            u12_bar[j] += bk * std::conj(v11) - std::conj(ak) * v12;
        }
        u11_bar[k] += ak_bar;
        u12_bar[k] += bk_bar;
    }
}

} // namespace tlsctl
