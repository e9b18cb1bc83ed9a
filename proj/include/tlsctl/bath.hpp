#pragma once

#include <tlsctl/errors.hpp>
#include <tlsctl/scenario.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace tlsctl {

/// Quadrature settings for the correlation-function integrals.
struct BathQuadrature {
    double relative_tolerance = 1e-8;
    /// Upper frequency limit in units of omega_c; exp(-40) is below 1e-16.
    double cutoff_multiple = 40.0;
    unsigned max_depth = 24;
};

/// Ohmic spectral density J(w) = 2 pi alpha w exp(-w / omega_c).
inline double spectral_density(double omega, const ModelParams& p) {
    return 2.0 * std::numbers::pi * p.alpha * omega * std::exp(-omega / p.omega_c);
}

/// S(w) = J(w) coth(beta w / 2), continuous at w = 0 where it equals 4 pi alpha / beta.
inline double noise_power(double omega, const ModelParams& p) {
    const double beta = p.beta();
    // w coth(beta w/2) = w + 2w / expm1(beta w)
    double w_coth;
    if (omega == 0.0)
        w_coth = 2.0 / beta;
    else
        w_coth = omega + 2.0 * omega / std::expm1(beta * omega);
    return 2.0 * std::numbers::pi * p.alpha * w_coth * std::exp(-omega / p.omega_c);
}

namespace detail {

/// int_0^{cutoff} f(w) dw for an integrand oscillating like cos/sin(w t).
///
/// The range is split into panels no wider than one oscillation (and no
/// wider than omega_c), each integrated by adaptive Gauss-Kronrod. The
/// tolerance is relative to the value when cancellation makes the value much
/// smaller than the integrand's L1 norm.
template <class F>
double bath_integral(F&& f, const ModelParams& p, const BathQuadrature& q, const char* what,
                     double t) {
    using boost::math::quadrature::gauss_kronrod;
    const double upper = q.cutoff_multiple * p.omega_c;
    double width = p.omega_c;
    if (t > 0.0) width = std::min(width, 2.0 * std::numbers::pi / t);
    const auto panels = static_cast<std::size_t>(std::ceil(upper / width));
    width = upper / static_cast<double>(panels);

    auto integrate = [&](double tol, double& err, double& l1) {
        double value = 0.0;
        err = 0.0;
        l1 = 0.0;
        for (std::size_t i = 0; i < panels; ++i) {
            double e = 0.0, l = 0.0;
            const double a = width * static_cast<double>(i);
            const double b = (i + 1 == panels) ? upper : a + width;
            value += gauss_kronrod<double, 31>::integrate(f, a, b, q.max_depth, tol, &e, &l);
            err += e;
            l1 += l;
        }
        return value;
    };

    double err = 0.0, l1 = 0.0;
    double value = integrate(q.relative_tolerance, err, l1);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
    if (err > q.relative_tolerance * std::abs(value) && err > floor && l1 > 0.0) {
        const double tol = std::max(q.relative_tolerance * std::abs(value) / l1,
                                    std::numeric_limits<double>::epsilon());
        value = integrate(tol, err, l1);
    }
    if (!std::isfinite(value) ||
        (err > q.relative_tolerance * std::abs(value) && err > floor)) {
        throw NumericalError(std::string(what) + "(t=" + std::to_string(t) +
                             ") quadrature did not converge: achieved relative error " +
                             std::to_string(value != 0.0 ? err / std::abs(value) : err));
    }
    return value;
}

inline double correlation_real(double t, const ModelParams& p, const BathQuadrature& q) {
    auto f = [&](double w) { return noise_power(w, p) * std::cos(w * t); };
    return bath_integral(f, p, q, "M'", t) / std::numbers::pi;
}

inline double correlation_imag(double t, const ModelParams& p, const BathQuadrature& q) {
    if (t == 0.0) return 0.0;
    auto f = [&](double w) { return spectral_density(w, p) * std::sin(w * t); };
    return -bath_integral(f, p, q, "M''", t) / std::numbers::pi;
}

} // namespace detail

/// Bath correlation function
///   M(t) = (1/pi) int_0^inf dw J(w) cosh(beta w/2 - i w t) / sinh(beta w/2)
///        = (1/pi) int dw J(w) [coth(beta w/2) cos(w t) - i sin(w t)].
/// The quotient is expanded into the coth/cos and sin kernels before integration.
inline std::complex<double> correlation_function(double t, const ModelParams& p,
                                                 const BathQuadrature& q = {}) {
    if (t < 0.0) throw DomainError("correlation_function requires t >= 0");
    return {detail::correlation_real(t, p, q), detail::correlation_imag(t, p, q)};
}

/// M'(t_k) and M''(t_k) on the grid nodes; since grid differences t_k - t_j
/// are themselves nodes, this covers every lag the rate integrals need.
struct BathCorrelationTable {
    std::vector<double> times;
    std::vector<double> m_real;
    std::vector<double> m_imag;

    [[nodiscard]] std::size_t size() const { return times.size(); }
};

inline BathCorrelationTable make_bath_table(const ModelParams& p, const TimeGrid& grid,
                                            const BathQuadrature& q = {}) {
    BathCorrelationTable table;
    const std::size_t n = grid.n_nodes();
    table.times.resize(n);
    table.m_real.resize(n);
    table.m_imag.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        // lag k*dt, not grid.t(k), so that lag(k - j) is exact
        const double tau = static_cast<double>(k) * grid.dt();
        table.times[k] = tau;
        table.m_real[k] = detail::correlation_real(tau, p, q);
        table.m_imag[k] = detail::correlation_imag(tau, p, q);
    }
    return table;
}

/// Same lags, new temperature: M'' does not depend on beta and is reused.
inline BathCorrelationTable rethermalize(const BathCorrelationTable& base, const ModelParams& p,
                                         const BathQuadrature& q = {}) {
    BathCorrelationTable table = base;
    for (std::size_t k = 0; k < table.size(); ++k)
        table.m_real[k] = detail::correlation_real(table.times[k], p, q);
    return table;
}

} // namespace tlsctl
