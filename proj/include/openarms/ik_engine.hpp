#pragma once

// Damped-least-squares inverse kinematics with joint-limit clamping,
// random restarts, best-fit fallback, two-stage tolerances and seeded
// trajectory tracking.

#include "openarms/arm_model.hpp"
#include "openarms/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace openarms {

// 1 rad of orientation error weighs as much as this many meters.
inline constexpr double kMetersPerRadian = 0.25;

inline constexpr double kMinDamping = 1e-4;
inline constexpr double kMaxDamping = 1.0;

struct IkConfig {
    double damping = 0.05;
    // Iteration cap per attempt (the seeded attempt and each restart).
    int max_iters = 100;
    // Wall-clock budget per solve in seconds; 0 disables the check.
    double time_budget = 0.0;
    double pos_tol = 1e-3;
    double ori_tol = 1e-2;
    int restarts = 30;
    std::uint64_t rng_seed = 0;

    static IkConfig loose() {
        IkConfig c;
        c.pos_tol = 5e-3;
        c.ori_tol = 5e-2;
        return c;
    }
    static IkConfig tight() { return IkConfig{}; }

    void validate() const {
        if (!(damping > 0.0)) throw std::invalid_argument("IkConfig: damping must be > 0");
        if (max_iters < 1) throw std::invalid_argument("IkConfig: max_iters must be >= 1");
        if (!(pos_tol > 0.0) || !(ori_tol > 0.0)) throw std::invalid_argument("IkConfig: tolerances must be > 0");
        if (restarts < 0) throw std::invalid_argument("IkConfig: restarts must be >= 0");
        if (!(time_budget >= 0.0)) throw std::invalid_argument("IkConfig: time_budget must be >= 0");
    }

    bool accepts(double pos_err, double ori_err) const { return pos_err <= pos_tol && ori_err <= ori_tol; }
};

enum class IkStatus { Exact, BestFit };

inline const char* to_string(IkStatus s) { return s == IkStatus::Exact ? "Exact" : "BestFit"; }

struct IkResult {
    JointVector joints;
    Pose achieved;
    double pos_err = 0.0;
    double ori_err = 0.0;
    IkStatus status = IkStatus::BestFit;
    int iterations = 0;
    double elapsed = 0.0;
    // Which stage of a two-stage solve produced this result (1 for plain solves)
    // and the tolerances status was judged against.
    int stage = 1;
    double pos_tol = 0.0;
    double ori_tol = 0.0;

    double weighted_error() const { return std::hypot(pos_err, kMetersPerRadian * ori_err); }
    bool meets(double ptol, double otol) const { return pos_err <= ptol && ori_err <= otol; }
    bool meets(const IkConfig& c) const { return meets(c.pos_tol, c.ori_tol); }
};

using Twist = Eigen::Matrix<double, 6, 1>;

// (target.position - actual.position, rotation vector of target * actual^-1).
inline Twist pose_error(const Pose& target, const Pose& actual) {
    Twist e;
    e.head<3>() = target.position - actual.position;
    e.tail<3>() = rotation_vector(target.orientation * actual.orientation.conjugate());
    return e;
}

namespace detail {

struct Evaluated {
    Pose pose;
    Twist error;
    double pos_err;
    double ori_err;
    double weighted;
};

inline Evaluated evaluate(const KinematicChain& chain, const Pose& target, const JointVector& q) {
    Evaluated ev;
    ev.pose = forward_kinematics(chain, q);
    ev.error = pose_error(target, ev.pose);
    ev.pos_err = ev.error.head<3>().norm();
    ev.ori_err = ev.error.tail<3>().norm();
    ev.weighted = std::hypot(ev.pos_err, kMetersPerRadian * ev.ori_err);
    return ev;
}

inline bool finite_pose(const Pose& p) {
    return p.position.allFinite() && p.orientation.coeffs().allFinite();
}

// One damped least-squares step in the unit-weighted task space. Joints
// pinned at a limit whose step would push them further out are locked and
// the step is recomputed without them.
inline JointVector dls_step(const KinematicChain& chain, const JointVector& q, const Twist& error, double lambda) {
    Jacobian J = jacobian(chain, q);
    J.bottomRows<3>() *= kMetersPerRadian;
    Twist e = error;
    e.tail<3>() *= kMetersPerRadian;
    const Eigen::Matrix<double, 6, 6> damp = lambda * lambda * Eigen::Matrix<double, 6, 6>::Identity();

    JointVector dq;
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::Matrix<double, 6, 6> A = J * J.transpose() + damp;
        dq = J.transpose() * A.ldlt().solve(e);
        bool locked = false;
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            const auto& js = chain.joints()[static_cast<std::size_t>(i)];
            const bool at_lo = q[i] <= js.limit_lo && dq[i] < 0.0;
            const bool at_hi = q[i] >= js.limit_hi && dq[i] > 0.0;
            if ((at_lo || at_hi) && J.col(i).squaredNorm() > 0.0) {
                J.col(i).setZero();
                locked = true;
            }
        }
        if (!locked) break;
    }
    return dq;
}

}  // namespace detail

inline IkResult solve(const KinematicChain& chain, const Pose& target, const JointVector& seed, const IkConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    cfg.validate();
    check_length(chain, seed);
    if (!detail::finite_pose(target)) throw std::invalid_argument("IK target is not finite");
    if (!seed.allFinite()) throw std::invalid_argument("IK seed is not finite");

    auto seconds_since_start = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };
    auto out_of_time = [&] { return cfg.time_budget > 0.0 && seconds_since_start() > cfg.time_budget; };

    IkResult best;
    best.pos_tol = cfg.pos_tol;
    best.ori_tol = cfg.ori_tol;
    double best_weighted = std::numeric_limits<double>::infinity();
    // An iterate inside tolerance always wins, even over one with a lower
    // weighted error that misses one of the two tolerances.
    auto record = [&](const JointVector& q, const detail::Evaluated& ev) {
        if (ev.weighted < best_weighted || cfg.accepts(ev.pos_err, ev.ori_err)) {
            best_weighted = ev.weighted;
            best.joints = q;
            best.achieved = ev.pose;
            best.pos_err = ev.pos_err;
            best.ori_err = ev.ori_err;
        }
    };
    auto finish = [&](int iterations) {
        best.iterations = iterations;
        best.status = cfg.accepts(best.pos_err, best.ori_err) ? IkStatus::Exact : IkStatus::BestFit;
        best.elapsed = seconds_since_start();
        return best;
    };

    Rng rng(cfg.rng_seed);
    const JointVector lo = chain.lower_limits();
    const JointVector hi = chain.upper_limits();
    int iterations = 0;

    for (int attempt = 0; attempt <= cfg.restarts; ++attempt) {
        JointVector q(seed.size());
        if (attempt == 0) {
            q = clamp_to_limits(chain, seed);
        } else {
            for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = rng.uniform(lo[i], hi[i]);
        }
        auto ev = detail::evaluate(chain, target, q);
        record(q, ev);
        if (cfg.accepts(ev.pos_err, ev.ori_err)) return finish(iterations);

        double lambda = std::clamp(cfg.damping, kMinDamping, kMaxDamping);
        int stagnant = 0;
        for (int it = 0; it < cfg.max_iters; ++it) {
            if (out_of_time()) return finish(iterations);
            ++iterations;
            const JointVector dq = detail::dls_step(chain, q, ev.error, lambda);
            const JointVector q_next = clamp_to_limits(chain, q + dq);
            const auto ev_next = detail::evaluate(chain, target, q_next);
            if (ev_next.weighted < ev.weighted) {
                stagnant = ev_next.weighted > 0.995 * ev.weighted ? stagnant + 1 : 0;
                q = q_next;
                ev = ev_next;
                lambda = std::max(lambda * 0.5, kMinDamping);
                record(q, ev);
                if (cfg.accepts(ev.pos_err, ev.ori_err)) return finish(iterations);
            } else {
                ++stagnant;
                if (lambda >= kMaxDamping) break;
                lambda = std::min(lambda * 2.0, kMaxDamping);
            }
            if (stagnant >= 12) break;
        }
        if (out_of_time()) break;
    }
    return finish(iterations);
}

inline void check_stage_order(const IkConfig& loose, const IkConfig& tight) {
    if (loose.pos_tol < tight.pos_tol || loose.ori_tol < tight.ori_tol)
        throw std::invalid_argument("two-stage IK: loose tolerances must be >= tight tolerances");
}

// Stage 1 at loose tolerance; if it succeeds, stage 2 refines at tight
// tolerance from the stage-1 joints. A failed stage 2 falls back to the
// stage-1 solution so a configuration is always returned.
inline IkResult solve_two_stage(const KinematicChain& chain, const Pose& target, const JointVector& seed,
                                const IkConfig& loose, const IkConfig& tight) {
    loose.validate();
    tight.validate();
    check_stage_order(loose, tight);
    IkResult first = solve(chain, target, seed, loose);
    first.stage = 1;
    if (first.status != IkStatus::Exact) return first;

    IkResult second = solve(chain, target, first.joints, tight);
    second.stage = 2;
    second.iterations += first.iterations;
    second.elapsed += first.elapsed;
    if (second.status == IkStatus::Exact) return second;
    // The fallback is judged against the tolerance that was asked for.
    first.iterations = second.iterations;
    first.elapsed = second.elapsed;
    first.pos_tol = tight.pos_tol;
    first.ori_tol = tight.ori_tol;
    first.status = first.meets(tight) ? IkStatus::Exact : IkStatus::BestFit;
    return first;
}

// Solves a target sequence in order, each solve seeded with the previous
// result. Every target yields a configuration.
inline std::vector<IkResult> track(const KinematicChain& chain, std::span<const Pose> targets, const IkConfig& loose,
                                   const IkConfig& tight, std::optional<JointVector> first_seed = std::nullopt) {
    if (targets.empty()) throw std::invalid_argument("track: empty target sequence");
    JointVector seed = first_seed ? *first_seed : chain.zeros();
    std::vector<IkResult> out;
    out.reserve(targets.size());
    for (const auto& t : targets) {
        out.push_back(solve_two_stage(chain, t, seed, loose, tight));
        seed = out.back().joints;
    }
    return out;
}

}  // namespace openarms
