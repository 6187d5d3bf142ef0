#pragma once

// Kinematic chain model of a serial revolute arm, the default Open Arms
// 7-DoF profile, forward kinematics and the geometric Jacobian.

#include "openarms/rigid.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace openarms {

using JointVector = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

struct Pose {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

    static Pose from_transform(const Transform& t) {
        return {t.translation, t.rotation.normalized()};
    }
    Transform to_transform() const { return {position, orientation}; }
};

struct JointSpec {
    std::string name;
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    double limit_lo = -kPi;
    double limit_hi = kPi;
    // Parent joint frame -> this joint frame at zero angle.
    Transform offset;

    double span() const { return limit_hi - limit_lo; }

    void validate() const {
        if (name.empty()) throw std::invalid_argument("joint name is empty");
        if (!(limit_lo < limit_hi))
            throw std::invalid_argument("joint '" + name + "': limit_lo must be below limit_hi");
        if (!is_unit(axis)) throw std::invalid_argument("joint '" + name + "': axis is not unit length");
        if (!is_unit(offset.rotation))
            throw std::invalid_argument("joint '" + name + "': offset quaternion is not unit norm");
    }
};

class KinematicChain {
public:
    KinematicChain() = default;

    KinematicChain(Transform base, std::vector<JointSpec> joints, Transform tool)
        : base_(std::move(base)), joints_(std::move(joints)), tool_(std::move(tool)) {
        std::unordered_set<std::string> names;
        for (const auto& j : joints_) {
            j.validate();
            if (!names.insert(j.name).second)
                throw std::invalid_argument("duplicate joint name '" + j.name + "'");
        }
        if (!is_unit(base_.rotation) || !is_unit(tool_.rotation))
            throw std::invalid_argument("base/tool quaternion is not unit norm");
    }

    const Transform& base() const { return base_; }
    const Transform& tool() const { return tool_; }
    const std::vector<JointSpec>& joints() const { return joints_; }
    const JointSpec& joint(std::size_t i) const { return joints_.at(i); }
    std::size_t size() const { return joints_.size(); }

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < joints_.size(); ++i)
            if (joints_[i].name == name) return i;
        throw std::out_of_range("no joint named '" + std::string(name) + "'");
    }

    JointVector lower_limits() const {
        JointVector v(size());
        for (std::size_t i = 0; i < size(); ++i) v[i] = joints_[i].limit_lo;
        return v;
    }
    JointVector upper_limits() const {
        JointVector v(size());
        for (std::size_t i = 0; i < size(); ++i) v[i] = joints_[i].limit_hi;
        return v;
    }

    JointVector zeros() const { return JointVector::Zero(static_cast<Eigen::Index>(size())); }

    // Upper bound on the distance from the first joint to the tool point.
    double reach() const {
        double r = tool_.translation.norm();
        for (std::size_t i = 1; i < joints_.size(); ++i) r += joints_[i].offset.translation.norm();
        return r;
    }

private:
    Transform base_;
    std::vector<JointSpec> joints_;
    Transform tool_;
};

inline void check_length(const KinematicChain& chain, const JointVector& q) {
    if (static_cast<std::size_t>(q.size()) != chain.size())
        throw std::invalid_argument("joint vector has " + std::to_string(q.size()) + " values, chain has " +
                                    std::to_string(chain.size()) + " joints");
}

// Link lengths and range centers for the 7-DoF arm. Lengths are nominal
// values sized for a medium adult arm and can be overridden.
struct ArmProfile {
    double upper_arm = 0.28;
    double forearm = 0.25;
    double hand = 0.10;
    // Per-joint range center in degrees; limits are center +- span/2.
    std::array<double, 7> range_center_deg{0, 0, 0, 0, 0, 0, 0};
};

struct OpenArmsJoint {
    const char* name;
    double span_deg;
    Eigen::Vector3d axis;
};

// Joint order and ranges of one Open Arms arm. World frame: x forward,
// y left, z up; the arm hangs along -z at zero angles.
inline std::array<OpenArmsJoint, 7> open_arms_joint_table() {
    return {{
        {"shoulder_pitch", 180.0, Eigen::Vector3d::UnitY()},
        {"shoulder_roll", 180.0, Eigen::Vector3d::UnitX()},
        {"shoulder_yaw", 120.0, Eigen::Vector3d::UnitZ()},
        {"elbow_pitch", 127.0, Eigen::Vector3d::UnitY()},
        {"wrist_yaw", 180.0, Eigen::Vector3d::UnitZ()},
        {"wrist_roll", 40.0, Eigen::Vector3d::UnitX()},
        {"wrist_pitch", 45.0, Eigen::Vector3d::UnitY()},
    }};
}

inline KinematicChain open_arms_chain(const ArmProfile& profile) {
    if (!(profile.upper_arm > 0.0) || !(profile.forearm > 0.0) || !(profile.hand >= 0.0))
        throw std::invalid_argument("arm profile link lengths must be positive");
    const auto table = open_arms_joint_table();
    std::vector<JointSpec> joints;
    joints.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        JointSpec j;
        j.name = table[i].name;
        j.axis = table[i].axis;
        const double c = deg_to_rad(profile.range_center_deg[i]);
        const double half = deg_to_rad(table[i].span_deg) / 2.0;
        j.limit_lo = c - half;
        j.limit_hi = c + half;
        joints.push_back(std::move(j));
    }
    // Shoulder joints share an origin, elbow sits one upper arm below,
    // the three wrist joints share an origin one forearm below the elbow.
    joints[3].offset.translation = {0.0, 0.0, -profile.upper_arm};
    joints[4].offset.translation = {0.0, 0.0, -profile.forearm};
    const Transform tool = Transform::from_translation({0.0, 0.0, -profile.hand});
    return KinematicChain(Transform::identity(), std::move(joints), tool);
}

inline KinematicChain open_arms_chain(std::string_view profile = "default") {
    if (profile == "default") return open_arms_chain(ArmProfile{});
    throw std::invalid_argument("unknown arm profile '" + std::string(profile) + "'");
}

// World frames of every joint (after its fixed offset, before its rotation)
// and of the tool.
struct ChainFrames {
    std::vector<Transform> joint_frames;
    Transform tool;
};

inline ChainFrames chain_frames(const KinematicChain& chain, const JointVector& q) {
    check_length(chain, q);
    ChainFrames out;
    out.joint_frames.reserve(chain.size());
    Transform t = chain.base();
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& j = chain.joints()[i];
        t = t * j.offset;
        out.joint_frames.push_back(t);
        t.rotation = t.rotation * Eigen::Quaterniond(Eigen::AngleAxisd(q[static_cast<Eigen::Index>(i)], j.axis));
    }
    out.tool = t * chain.tool();
    return out;
}

inline Pose forward_kinematics(const KinematicChain& chain, const JointVector& q) {
    check_length(chain, q);
    Transform t = chain.base();
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& j = chain.joints()[i];
        t = t * j.offset;
        t.rotation = t.rotation * Eigen::Quaterniond(Eigen::AngleAxisd(q[static_cast<Eigen::Index>(i)], j.axis));
    }
    return Pose::from_transform(t * chain.tool());
}

// Rows 0-2 linear velocity, rows 3-5 angular velocity, world frame.
inline Jacobian jacobian(const KinematicChain& chain, const JointVector& q) {
    const ChainFrames frames = chain_frames(chain, q);
    const Eigen::Vector3d p_tool = frames.tool.translation;
    Jacobian J(6, static_cast<Eigen::Index>(chain.size()));
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& f = frames.joint_frames[i];
        const Eigen::Vector3d z = f.rotation * chain.joints()[i].axis;
        const auto c = static_cast<Eigen::Index>(i);
        J.block<3, 1>(0, c) = z.cross(p_tool - f.translation);
        J.block<3, 1>(3, c) = z;
    }
    return J;
}

inline JointVector clamp_to_limits(const KinematicChain& chain, const JointVector& q) {
    check_length(chain, q);
    JointVector out = q;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& j = chain.joints()[i];
        auto& v = out[static_cast<Eigen::Index>(i)];
        v = std::clamp(v, j.limit_lo, j.limit_hi);
    }
    return out;
}

inline bool within_limits(const KinematicChain& chain, const JointVector& q) {
    check_length(chain, q);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto v = q[static_cast<Eigen::Index>(i)];
        if (!(v >= chain.joints()[i].limit_lo && v <= chain.joints()[i].limit_hi)) return false;
    }
    return true;
}

}  // namespace openarms
