#pragma once

// Solve-rate benchmark: random in-limit joints -> FK -> IK, reported per
// solver configuration.

#include "openarms/arm_model.hpp"
#include "openarms/ik_engine.hpp"
#include "openarms/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace openarms {

struct BenchCase {
    JointVector q_true;
    Pose target;
};

inline std::vector<BenchCase> generate_cases(const KinematicChain& chain, std::size_t n, std::uint64_t rng_seed) {
    if (n == 0) throw std::invalid_argument("generate_cases: n must be >= 1");
    Rng rng(rng_seed);
    std::vector<BenchCase> cases;
    cases.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        JointVector q(static_cast<Eigen::Index>(chain.size()));
        for (std::size_t i = 0; i < chain.size(); ++i)
            q[static_cast<Eigen::Index>(i)] = rng.uniform(chain.joints()[i].limit_lo, chain.joints()[i].limit_hi);
        cases.push_back({q, forward_kinematics(chain, q)});
    }
    return cases;
}

enum class BenchMode {
    Single,         // solve() with `tight` from the neutral seed
    TwoStage,       // solve_two_stage(loose, tight) from the neutral seed
    SeedWithTruth,  // solve() with `tight`, seeded with q_true
};

struct BenchConfig {
    std::string name;
    BenchMode mode = BenchMode::TwoStage;
    IkConfig loose = IkConfig::loose();
    IkConfig tight = IkConfig::tight();
    // Success tolerance; defaults to the tight tolerance.
    std::optional<double> judge_pos_tol;
    std::optional<double> judge_ori_tol;

    double success_pos_tol() const { return judge_pos_tol.value_or(tight.pos_tol); }
    double success_ori_tol() const { return judge_ori_tol.value_or(tight.ori_tol); }
};

struct BenchReport {
    std::string config_name;
    std::size_t n_cases = 0;
    std::size_t n_exact = 0;
    double solve_rate = 0.0;  // percent
    double time_mean = 0.0;
    double time_p99 = 0.0;
    double err_pos_mean = 0.0;
};

inline IkResult run_case(const KinematicChain& chain, const BenchCase& c, const BenchConfig& cfg) {
    switch (cfg.mode) {
        case BenchMode::Single:
            return solve(chain, c.target, chain.zeros(), cfg.tight);
        case BenchMode::TwoStage:
            return solve_two_stage(chain, c.target, chain.zeros(), cfg.loose, cfg.tight);
        case BenchMode::SeedWithTruth:
            return solve(chain, c.target, c.q_true, cfg.tight);
    }
    throw std::logic_error("unknown bench mode");
}

// Solves every case under one configuration. Results are stored by case
// index, so the output does not depend on the worker count.
inline std::vector<IkResult> run_config(const KinematicChain& chain, const std::vector<BenchCase>& cases,
                                        const BenchConfig& cfg, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<IkResult> results(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) results[i] = run_case(chain, cases[i], cfg);
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return results;
}

inline BenchReport summarize(const std::string& name, const std::vector<IkResult>& results, double pos_tol,
                             double ori_tol) {
    BenchReport r;
    r.config_name = name;
    r.n_cases = results.size();
    std::vector<double> times;
    times.reserve(results.size());
    double err_sum = 0.0;
    for (const auto& res : results) {
        if (res.meets(pos_tol, ori_tol)) ++r.n_exact;
        times.push_back(res.elapsed);
        err_sum += res.pos_err;
    }
    if (r.n_cases > 0) {
        r.solve_rate = 100.0 * static_cast<double>(r.n_exact) / static_cast<double>(r.n_cases);
        r.time_mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(r.n_cases);
        std::sort(times.begin(), times.end());
        const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(times.size()))) - 1;
        r.time_p99 = times[std::min(idx, times.size() - 1)];
        r.err_pos_mean = err_sum / static_cast<double>(r.n_cases);
    }
    return r;
}

inline std::vector<BenchReport> run_benchmark(const KinematicChain& chain, const std::vector<BenchCase>& cases,
                                              const std::vector<BenchConfig>& configs, unsigned threads = 0) {
    if (cases.empty()) throw std::invalid_argument("run_benchmark: no cases");
    if (configs.empty()) throw std::invalid_argument("run_benchmark: no configs");
    std::vector<BenchReport> reports;
    for (const auto& cfg : configs) {
        const auto results = run_config(chain, cases, cfg, threads);
        reports.push_back(summarize(cfg.name, results, cfg.success_pos_tol(), cfg.success_ori_tol()));
    }
    return reports;
}

// The configurations `bench` runs by default.
inline std::vector<BenchConfig> default_bench_configs() {
    BenchConfig two_stage{"two_stage", BenchMode::TwoStage, IkConfig::loose(), IkConfig::tight(), {}, {}};
    BenchConfig single{"single_tight", BenchMode::Single, IkConfig::loose(), IkConfig::tight(), {}, {}};
    BenchConfig no_restart = single;
    no_restart.name = "single_tight_no_restarts";
    no_restart.tight.restarts = 0;
    BenchConfig cheat{"seeded_with_truth", BenchMode::SeedWithTruth, IkConfig::loose(), IkConfig::tight(), {}, {}};
    return {two_stage, single, no_restart, cheat};
}

inline constexpr const char* kBenchCsvHeader =
    "config,n_cases,n_exact,solve_rate_pct,time_mean_s,time_p99_s,err_pos_mean_m";

inline std::string bench_csv(const std::vector<BenchReport>& reports) {
    std::ostringstream out;
    out << kBenchCsvHeader << '\n';
    char buf[256];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.4f,%.9f,%.9f,%.9g\n", r.config_name.c_str(), r.n_cases,
                      r.n_exact, r.solve_rate, r.time_mean, r.time_p99, r.err_pos_mean);
        out << buf;
    }
    return out.str();
}

inline std::string bench_summary(const std::vector<BenchReport>& reports) {
    std::ostringstream out;
    char buf[256];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%-28s %6zu/%-6zu solved  %7.3f%%  mean %.3f ms  p99 %.3f ms\n",
                      r.config_name.c_str(), r.n_exact, r.n_cases, r.solve_rate, 1e3 * r.time_mean,
                      1e3 * r.time_p99);
        out << buf;
    }
    out << "reference (third-party solvers, not run here): TRAC_IK 99.8%, KDL 96%\n";
    return out.str();
}

}  // namespace openarms
