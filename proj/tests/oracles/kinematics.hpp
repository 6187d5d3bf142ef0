#pragma once

// Reference kinematics built from plain 4x4 homogeneous matrices and the
// Rodrigues formula, kept separate from the library's quaternion code.

#include "openarms/arm_model.hpp"

#include <Eigen/Dense>

namespace oracle {

using Mat4 = Eigen::Matrix4d;
using Mat3 = Eigen::Matrix3d;

inline Mat3 quat_matrix(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n, x /= n, y /= n, z /= n;
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

inline Mat3 rodrigues(const Eigen::Vector3d& axis, double angle) {
    Mat3 k;
    k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
    return Mat3::Identity() + std::sin(angle) * k + (1 - std::cos(angle)) * k * k;
}

inline Mat4 homogeneous(const Mat3& r, const Eigen::Vector3d& t) {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = r;
    m.topRightCorner<3, 1>() = t;
    return m;
}

inline Mat4 homogeneous(const openarms::Transform& t) {
    const auto& q = t.rotation;
    return homogeneous(quat_matrix(q.w(), q.x(), q.y(), q.z()), t.translation);
}

inline Mat4 fk(const openarms::KinematicChain& chain, const Eigen::VectorXd& q) {
    Mat4 m = homogeneous(chain.base());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const auto& j = chain.joint(i);
        m = m * homogeneous(j.offset) * homogeneous(rodrigues(j.axis, q[static_cast<Eigen::Index>(i)]), Eigen::Vector3d::Zero());
    }
    return m * homogeneous(chain.tool());
}

inline bool near_pi(double a) { return a > 3.14159265358979323846 - 1e-6; }

// Axis-angle vector of a rotation matrix (angle in [0, pi]).
inline Eigen::Vector3d log_so3(const Mat3& r) {
    const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    const double angle = std::acos(c);
    const Eigen::Vector3d v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    if (angle < 1e-12) return 0.5 * v;
    if (near_pi(angle)) {
        // Near pi: axis from the symmetric part.
        const Mat3 b = (r + Mat3::Identity()) / 2.0;
        Eigen::Index i;
        b.diagonal().maxCoeff(&i);
        Eigen::Vector3d axis = b.col(i) / std::sqrt(b(i, i));
        if (axis.dot(v) < 0) axis = -axis;
        return angle * axis.normalized();
    }
    return angle / (2.0 * std::sin(angle)) * v;
}

// Central differences of the matrix FK: linear rows from positions, angular
// rows from the log of R(q+h) R(q-h)^T.
inline Eigen::Matrix<double, 6, Eigen::Dynamic> fd_jacobian(const openarms::KinematicChain& chain,
                                                            const Eigen::VectorXd& q, double h = 1e-6) {
    Eigen::Matrix<double, 6, Eigen::Dynamic> j(6, q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        Eigen::VectorXd qp = q, qm = q;
        qp[i] += h;
        qm[i] -= h;
        const Mat4 a = fk(chain, qp), b = fk(chain, qm);
        j.block<3, 1>(0, i) = (a.topRightCorner<3, 1>() - b.topRightCorner<3, 1>()) / (2 * h);
        j.block<3, 1>(3, i) = log_so3(a.topLeftCorner<3, 3>() * b.topLeftCorner<3, 3>().transpose()) / (2 * h);
    }
    return j;
}

}  // namespace oracle
