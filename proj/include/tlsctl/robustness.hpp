#pragma once

#include <tlsctl/control.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace tlsctl {

struct RobustnessSample {
    double beta = 0.0;
    double purity = 0.0;
};

struct RobustnessReport {
    std::size_t samples = 0;
    double mean_purity = 0.0;
    double std_purity = 0.0;
    double beta_mean = 0.0;
    double beta_std = 0.0;
    std::uint64_t rng_seed = 0;
    std::size_t rejected_draws = 0;
    double nominal_purity = 0.0;
    std::vector<RobustnessSample> records;
};

struct RobustnessOptions {
    /// sigma_beta / mean_beta
    double relative_sigma = 0.1;
    /// 0 picks std::thread::hardware_concurrency()
    unsigned workers = 0;
};

/// Population mean and standard deviation (divisor n).
inline std::pair<double, double> population_stats(const std::vector<RobustnessSample>& records) {
    if (records.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (const auto& r : records) mean += r.purity;
    mean /= static_cast<double>(records.size());
    double var = 0.0;
    for (const auto& r : records) var += (r.purity - mean) * (r.purity - mean);
    var /= static_cast<double>(records.size());
    return {mean, std::sqrt(var)};
}

namespace detail {

// splitmix64 finalizer; decorrelates per-sample streams drawn from one seed
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

/// Monte-Carlo purity statistics of a fixed pulse under beta ~ Normal(beta, sigma).
///
/// Each sample owns an RNG stream derived from (seed, index), so the report
/// does not depend on the number of workers. Non-positive draws are redrawn.
inline RobustnessReport run_robustness(const ControlProblem& problem, const ControlPulse& pulse,
                                       std::size_t n_samples, std::uint64_t seed,
                                       const RobustnessOptions& options = {}) {
    if (n_samples < 2) throw DomainError("n_samples >= 2 required");
    if (!(options.relative_sigma >= 0.0)) throw DomainError("relative_sigma must be >= 0");

    const ModelParams& base = problem.params();
    const double beta_mean = base.beta();
    const double beta_std = options.relative_sigma * beta_mean;

    // the propagator does not depend on temperature
    const PropagatorGrid prop = propagate(pulse, base);
    const ForwardPass nominal = problem.forward(pulse);

    RobustnessReport report;
    report.samples = n_samples;
    report.beta_mean = beta_mean;
    report.beta_std = beta_std;
    report.rng_seed = seed;
    report.nominal_purity = nominal.trajectory.purity.back();
    report.records.resize(n_samples);
    std::vector<std::size_t> rejected(n_samples, 0);

    auto run_sample = [&](std::size_t i) {
        std::mt19937_64 rng(detail::mix_seed(seed, i));
        std::normal_distribution<double> dist(beta_mean, beta_std);
        double beta = beta_std > 0.0 ? dist(rng) : beta_mean;
        while (!(beta > 0.0)) {
            ++rejected[i];
            beta = dist(rng);
        }
        ModelParams p = base;
        p.inv_beta = 1.0 / beta;
        const BathCorrelationTable bath = rethermalize(problem.bath(), p);
        const RateTable rates = compute_rates(prop, bath);
        const BlochTrajectory traj = evolve(pulse, p, rates, problem.task());
        report.records[i] = {beta, traj.purity.back()};
    };

    unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(n_samples));
    if (workers == 1) {
        for (std::size_t i = 0; i < n_samples; ++i) run_sample(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n_samples; i += workers) run_sample(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (std::size_t r : rejected) report.rejected_draws += r;
    std::tie(report.mean_purity, report.std_purity) = population_stats(report.records);
    return report;
}

inline RobustnessReport run_robustness(const ControlPulse& pulse, const ModelParams& params,
                                       const TimeGrid& grid, const TransferTask& task,
                                       std::size_t n_samples, std::uint64_t seed,
                                       const RobustnessOptions& options = {}) {
    return run_robustness(ControlProblem(params, grid, task), pulse, n_samples, seed, options);
}

} // namespace tlsctl
