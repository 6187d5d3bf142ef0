#pragma once

// Random inputs shared by the test binaries.

#include "openarms/arm_model.hpp"
#include "openarms/grasp_geometry.hpp"
#include "openarms/rng.hpp"

#include <filesystem>
#include <string>

namespace testing_support {

using namespace openarms;

inline Eigen::Quaterniond random_quat(Rng& rng) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    return q.normalized();
}

inline Eigen::Vector3d random_unit(Rng& rng) {
    return Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
}

inline KinematicChain random_chain(Rng& rng, std::size_t n) {
    std::vector<JointSpec> joints;
    for (std::size_t i = 0; i < n; ++i) {
        JointSpec j;
        j.name = "j" + std::to_string(i);
        j.axis = random_unit(rng);
        j.limit_lo = -rng.uniform(0.5, 3.0);
        j.limit_hi = rng.uniform(0.5, 3.0);
        j.offset = {Eigen::Vector3d(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)),
                    random_quat(rng)};
        joints.push_back(j);
    }
    const Transform base{Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)), random_quat(rng)};
    const Transform tool{Eigen::Vector3d(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)),
                         random_quat(rng)};
    return KinematicChain(base, joints, tool);
}

inline JointVector random_q(const KinematicChain& chain, Rng& rng, double fraction = 1.0) {
    JointVector q(static_cast<Eigen::Index>(chain.size()));
    for (std::size_t i = 0; i < chain.size(); ++i)
        q[static_cast<Eigen::Index>(i)] =
            rng.uniform(chain.joint(i).limit_lo * fraction, chain.joint(i).limit_hi * fraction);
    return q;
}

inline GraspRectangle random_rect(Rng& rng, double span = 100.0) {
    return {Eigen::Vector2d(rng.uniform(0, span), rng.uniform(0, span)), rng.uniform(-kPi / 2, kPi / 2),
            rng.uniform(5, 60), rng.uniform(5, 40)};
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("openarms_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testing_support
