#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace openarms {

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into [-pi, pi).
inline double wrap_pi(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

// Wraps an angle modulo pi into [-pi/2, pi/2]. The +pi/2 end is kept, the
// -pi/2 end folds onto it so antipodal angles have a single representative.
inline double wrap_half_pi(double a) {
    a = std::fmod(a, kPi);
    if (a > kPi / 2.0) a -= kPi;
    if (a <= -kPi / 2.0) a += kPi;
    return a;
}

// Rigid transform: rotate, then translate. Quaternion is kept unit norm.
struct Transform {
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

    static Transform identity() { return {}; }

    static Transform from_translation(const Eigen::Vector3d& t) {
        return {t, Eigen::Quaterniond::Identity()};
    }

    static Transform from_rotation(const Eigen::Quaterniond& q) {
        return {Eigen::Vector3d::Zero(), q};
    }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

    Transform operator*(const Transform& rhs) const {
        return {translation + rotation * rhs.translation, rotation * rhs.rotation};
    }

    Transform inverse() const {
        const Eigen::Quaterniond inv = rotation.conjugate();
        return {-(inv * translation), inv};
    }
};

inline bool is_unit(const Eigen::Quaterniond& q, double tol = 1e-9) {
    return std::abs(q.norm() - 1.0) <= tol;
}

inline bool is_unit(const Eigen::Vector3d& v, double tol = 1e-9) {
    return std::abs(v.norm() - 1.0) <= tol;
}

// Quaternion from w-first components.
inline Eigen::Quaterniond quat_wxyz(double w, double x, double y, double z) {
    return Eigen::Quaterniond(w, x, y, z);
}

// Axis-angle vector of a rotation, shortest arc (angle in [0, pi]).
inline Eigen::Vector3d rotation_vector(Eigen::Quaterniond q) {
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const Eigen::Vector3d v = q.vec();
    const double s = v.norm();
    if (s < 1e-300) return Eigen::Vector3d::Zero();
    const double angle = 2.0 * std::atan2(s, q.w());
    return v * (angle / s);
}

// Distance between two unit quaternions that treats q and -q as equal.
inline double quaternion_distance(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
    const double plus = (a.coeffs() + b.coeffs()).norm();
    const double minus = (a.coeffs() - b.coeffs()).norm();
    return std::min(plus, minus);
}

}  // namespace openarms
