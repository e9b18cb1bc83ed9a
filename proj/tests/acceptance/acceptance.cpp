// Acceptance gate: one PASS/FAIL line per criterion, with the measured
// numbers. Indented lines are informational. Exit status is nonzero when any
// criterion fails.

#include <tlsctl.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace tlsctl;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& what, double seconds) {
    std::printf("[%s] C%d %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, what.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <class... A>
void info(const char* fmt, A... args) {
    std::printf("       ");
    std::printf(fmt, args...);
    std::printf("\n");
}

class Timer {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Scenario fmo_scenario(std::size_t steps = kDefaultSteps) {
    Scenario sc;
    sc.params = fmo_params();
    sc.grid = TimeGrid(sc.params.t_final, steps);
    sc.task.p_initial = fmo_frame_map(FmoState::ket1);
    sc.task.p_target = fmo_frame_map(FmoState::superposition_plus_i_ket0);
    sc.task.frame = Frame::fmo_rotated;
    return sc;
}

using Full = Eigen::Matrix2cd;
Full full(const SU2Row& r) {
    Full m;
    m << r.u11, r.u12, -std::conj(r.u12), std::conj(r.u11);
    return m;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void gradient_exactness() {
    Timer t;
    const Scenario sc = fmo_scenario(64);
    const ControlProblem prob(sc.params, sc.grid, sc.task);
    const double h = 1e-4;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ControlPulse pulse = random_smooth_pulse(sc.grid, 20.0, seed);
        const auto grad = prob.gradient(pulse);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            auto plus = pulse.values(), minus = pulse.values();
            plus[i] += h;
            minus[i] -= h;
            const double fd = (prob.cost(ControlPulse(sc.grid, plus)) -
                               prob.cost(ControlPulse(sc.grid, minus))) / (2.0 * h);
            worst = std::max(worst, std::abs(grad[i] - fd) / std::abs(fd));
        }
    }
    verdict(1, worst < 1e-6 && t.seconds() < 60.0,
            "gradient vs central differences, 10 pulses, M=64: max rel error " + fmt("%.2e", worst) +
                " (< 1e-6, < 60 s)",
            t.seconds());
}

void undriven_propagator_oracle() {
    Timer t;
    const Scenario sc = fmo_scenario();
    const PropagatorGrid prop = propagate(ControlPulse::zero(sc.grid), sc.params);
    const SU2Row exact = undriven_propagator(sc.params, sc.params.t_final);
    const double e11 = std::abs(prop.u11.back() - exact.u11);
    const double e12 = std::abs(prop.u12.back() - exact.u12);
    verdict(2, e11 < 1e-8 && e12 < 1e-8,
            "undriven propagator at t_F: |dU11| " + fmt("%.2e", e11) + ", |dU12| " + fmt("%.2e", e12) +
                " (< 1e-8)",
            t.seconds());
}

void stationary_limits() {
    Timer t;
    const ModelParams p = fmo_params();
    const double horizon = 2.0, dt = 1e-3;
    const RateRow num = undriven_rates_at(p, horizon, dt);
    const RateRow printed = conventional_stationary_rates(p);
    const RateRow exact = asymptotic_rates(p);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

    const double e_yy = rel(num.gamma_yy, printed.gamma_yy);
    const double e_zx = rel(num.gamma_zx, printed.gamma_zx);
    const double e_az = rel(num.a_z, printed.a_z);

    const StationaryCheck st = relax_undriven(p, fmo_frame_map(FmoState::ket1), 50.0 / p.omega_c,
                                              p.t_final / kDefaultSteps, num);
    const Vec3 ref(-0.371, 0.0, 0.869);
    const Vec3 s = st.relaxed_state;
    const bool state_ok = std::abs(s.x() - ref.x()) <= 0.02 * std::abs(ref.x()) &&
                          std::abs(s.y()) <= 0.02 * ref.norm() &&
                          std::abs(s.z() - ref.z()) <= 0.02 * std::abs(ref.z());
    const bool ok = e_yy <= 0.01 && e_zx <= 0.01 && e_az <= 0.01 && state_ok;
    verdict(3, ok,
            "long-time rates vs printed closed forms (1%): gamma_yy " + fmt("%.1f%%", 100 * e_yy) +
                ", gamma_zx " + fmt("%.1f%%", 100 * e_zx) + ", A_z " + fmt("%.1f%%", 100 * e_az) +
                "; stationary state " + (state_ok ? "within" : "outside") + " 2%",
            t.seconds());
    info("horizon T = %.1f, dt = %.0e", horizon, dt);
    info("%-9s %12s %12s %12s", "", "numerical", "printed", "exact limit");
    info("%-9s %12.6f %12.6f %12.6f", "gamma_yy", num.gamma_yy, printed.gamma_yy, exact.gamma_yy);
    info("%-9s %12.6f %12.6f %12.6f", "gamma_zx", num.gamma_zx, printed.gamma_zx, exact.gamma_zx);
    info("%-9s %12.6f %12.6f %12.6f", "A_z", num.a_z, printed.a_z, exact.a_z);
    info("%-9s %12.6f %12.6f %12s  (report only)", "gamma_yx", num.gamma_yx, printed.gamma_yx, "-");
    info("%-9s %12.6f %12.6f %12.6f  (report only)", "A_y", num.a_y, printed.a_y, exact.a_y);
    info("relative error vs exact limits: gamma_yy %.2e, gamma_zx %.2e, A_z %.2e, A_y %.2e",
         rel(num.gamma_yy, exact.gamma_yy), rel(num.gamma_zx, exact.gamma_zx),
         rel(num.a_z, exact.a_z), rel(num.a_y, exact.a_y));
    info("relaxed state (%.5f, %.5f, %.5f), thermal (%.5f, %.5f, %.5f)", s.x(), s.y(), s.z(),
         thermal_bloch_vector(p).x(), thermal_bloch_vector(p).y(), thermal_bloch_vector(p).z());
    {
        const DriftSystem d = drift_from(p.eps0, p.delta, [&] {
            RateRow r = printed;
            r.gamma_yx = num.gamma_yx;
            return r;
        }());
        const Vec3 fp = -d.m.fullPivLu().solve(d.r);
        info("fixed point of the printed rates: (%.4f, %.4f, %.4f)", fp.x(), fp.y(), fp.z());
    }
}

struct Optimized {
    ControlPulse pulse;
    OptimizationReport report;
};

Optimized state_transfer(const Scenario& sc) {
    const ControlProblem prob(sc.params, sc.grid, sc.task);
    auto [pulse, rep] = optimize(prob, ControlPulse::zero(sc.grid), {});
    return {std::move(pulse), std::move(rep)};
}

double max_abs(const ControlPulse& p) {
    double m = 0.0;
    for (double v : p.values()) m = std::max(m, std::abs(v));
    return m;
}

Optimized state_transfer_reproduction() {
    Timer t;
    const Scenario sc = fmo_scenario();
    Optimized o = state_transfer(sc);
    const auto& r = o.report;
    verdict(4, r.terminal_error <= 1e-4 && r.iterations <= 500,
            "optimal state transfer, FMO, M=512, from zero: terminal error " +
                fmt("%.3e", r.terminal_error) + " after " + std::to_string(r.iterations) +
                " iterations (<= 1e-4)",
            t.seconds());
    info("nu = %.0e: %s; cost %.6e, fluence %.4f, purity %.5f, max|eps| %.2f cm^-1", sc.params.nu,
         r.message.c_str(), r.cost, r.fluence, r.final_purity, max_abs(o.pulse));
    const double floor = 0.5 * (1.0 - std::sqrt(r.final_purity)) * (1.0 - std::sqrt(r.final_purity));
    info("purity-limited floor 0.5 (1 - |p|)^2 at this purity: %.3e", floor);
    return o;
}

Optimized unpenalized_transfer() {
    Timer t;
    Scenario sc = fmo_scenario();
    sc.params.nu = 0.0;
    Optimized o = state_transfer(sc);
    info("nu = 0: terminal error %.3e after %d iterations, fluence %.4f, purity %.5f (%.1fs)",
         o.report.terminal_error, o.report.iterations, o.report.fluence, o.report.final_purity,
         t.seconds());
    return o;
}

void robustness_statistics(const Optimized& nominal, const Optimized& unpenalized) {
    Timer t;
    const Scenario sc = fmo_scenario();
    const ControlProblem prob(sc.params, sc.grid, sc.task);
    const RobustnessReport r = run_robustness(prob, nominal.pulse, 1000, 20240101);
    verdict(5, r.mean_purity >= 0.97 && r.std_purity <= 0.02,
            "robustness, 1000 samples of beta: mean purity " + fmt("%.6f", r.mean_purity) +
                " (>= 0.97), std " + fmt("%.6f", r.std_purity) + " (<= 0.02)",
            t.seconds());
    info("nominal purity %.6f, beta = %.6e +- %.6e", r.nominal_purity, r.beta_mean, r.beta_std);
    const RobustnessReport u = run_robustness(prob, unpenalized.pulse, 1000, 20240101);
    info("with the nu = 0 pulse: mean purity %.6f, std %.6f", u.mean_purity, u.std_purity);
}

void structural_properties(const Optimized& nominal) {
    Timer t;
    const Scenario sc = fmo_scenario();
    std::vector<std::string> broken;

    // dissipationless norm conservation
    double norm_drift = 0.0;
    {
        ModelParams free = sc.params;
        free.alpha = 0.0;
        const ControlProblem prob(free, sc.grid, sc.task);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto traj = prob.forward(random_smooth_pulse(sc.grid, 20.0, seed)).trajectory;
            for (const Vec3& v : traj.p) norm_drift = std::max(norm_drift, std::abs(v.norm() - 1.0));
        }
    }
    if (!(norm_drift <= 1e-8)) broken.push_back("norm");

    // purity bound along the optimized trajectory
    const ControlProblem prob(sc.params, sc.grid, sc.task);
    double max_purity = 0.0;
    for (double x : prob.forward(nominal.pulse).trajectory.purity) max_purity = std::max(max_purity, x);
    if (!(max_purity <= 1.0 + 1e-3)) broken.push_back("purity");

    // rates linear in alpha
    double lin = 0.0;
    {
        ModelParams twice = sc.params;
        twice.alpha *= 2.0;
        const PropagatorGrid pg = propagate(nominal.pulse, sc.params);
        const RateTable a = compute_rates(pg, prob.bath());
        const RateTable b = compute_rates(pg, make_bath_table(twice, sc.grid));
        auto rel = [](double x, double y) { return std::abs(2.0 * x - y) / std::max(std::abs(y), 1e-300); };
        for (std::size_t k = 1; k < a.rows.size(); ++k) {
            const RateRow &x = a.rows[k], &y = b.rows[k];
            lin = std::max({lin, rel(x.gamma_yx, y.gamma_yx), rel(x.gamma_yy, y.gamma_yy),
                            rel(x.gamma_zx, y.gamma_zx), rel(x.a_y, y.a_y), rel(x.a_z, y.a_z)});
        }
    }
    if (!(lin <= 1e-10)) broken.push_back("linearity");

    // group property closure
    double closure = 0.0;
    {
        const PropagatorGrid pg = propagate(nominal.pulse, sc.params);
        for (std::size_t k = 0; k < pg.u11.size(); k += 37)
            for (std::size_t j = 0; j <= k; j += 29)
                for (std::size_t i = 0; i <= j; i += 23) {
                    const Full lhs = full(two_time_elements(pg, k, j)) * full(two_time_elements(pg, j, i));
                    closure = std::max(closure, (lhs - full(two_time_elements(pg, k, i))).cwiseAbs().maxCoeff());
                }
    }
    if (!(closure <= 1e-8)) broken.push_back("closure");

    // fixed-seed determinism of the robustness CSV
    bool identical = false;
    {
        const auto dir = std::filesystem::temp_directory_path();
        RobustnessOptions one, many;
        one.workers = 1;
        many.workers = 4;
        csv::write_robustness(dir / "tlsctl_acc_rob_a.csv", run_robustness(prob, nominal.pulse, 40, 7, one));
        csv::write_robustness(dir / "tlsctl_acc_rob_b.csv", run_robustness(prob, nominal.pulse, 40, 7, many));
        identical = slurp(dir / "tlsctl_acc_rob_a.csv") == slurp(dir / "tlsctl_acc_rob_b.csv");
    }
    if (!identical) broken.push_back("determinism");

    verdict(6, broken.empty(),
            "structural properties: norm drift " + fmt("%.2e", norm_drift) + ", max purity " +
                fmt("%.6f", max_purity) + ", alpha linearity " + fmt("%.2e", lin) + ", closure " +
                fmt("%.2e", closure) + ", robustness CSV " + (identical ? "bit-identical" : "differs"),
            t.seconds());
}

void discretization_convergence() {
    Timer t;
    auto final_state = [](std::size_t steps) {
        const Scenario sc = fmo_scenario(steps);
        const ControlProblem prob(sc.params, sc.grid, sc.task);
        return prob.forward(ControlPulse::zero(sc.grid)).trajectory.final_state();
    };
    const Vec3 a = final_state(512), b = final_state(1024);
    const double d = (a - b).norm();
    verdict(7, d < 1e-5, "free evolution p(t_F), M=512 vs 1024: |dp| = " + fmt("%.2e", d) + " (< 1e-5)",
            t.seconds());
}

} // namespace

int main() {
    gradient_exactness();
    undriven_propagator_oracle();
    stationary_limits();
    const Optimized nominal = state_transfer_reproduction();
    const Optimized unpenalized = unpenalized_transfer();
    robustness_statistics(nominal, unpenalized);
    structural_properties(nominal);
    discretization_convergence();
    std::printf("%d of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
