#include "geogs/transforms.hpp"

#include "geogs/error.hpp"

#include <cmath>

namespace geogs {

namespace {

// dL/dq for raw q from dL/dq_hat where q_hat = q / |q|.
Quat normalize_backward(const Quat& q, const Quat& d_unit) {
    const double n = q.norm();
    const Quat u = q / n;
    return (d_unit - u * u.dot(d_unit)) / n;
}

}  // namespace

Quat normalized(const Quat& q) {
    const double n = q.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw InputError("quaternion has zero or non-finite norm");
    }
    return q / n;
}

Mat3 rotation_matrix(const Quat& q_raw) {
    const Quat q = normalized(q_raw);
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Mat3 r;
    r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
        2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
        2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
    return r;
}

Quat quaternion_from_matrix(const Mat3& r) {
    // Shepperd's method: branch on the largest diagonal combination for stability.
    Quat q;
    const double trace = r.trace();
    if (trace > r(0, 0) && trace > r(1, 1) && trace > r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + trace);
        q << 0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
        q << (r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) >= r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
        q << (r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s;
    } else {
        const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
        q << (r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s;
    }
    if (q[0] < 0.0) {
        q = -q;
    }
    return q.normalized();
}

Mat3 covariance_from_scales(const Vec3& scales, const Quat& rotation) {
    const Mat3 m = rotation_matrix(rotation) * scales.asDiagonal();
    return m * m.transpose();
}

Mat3 build_covariance(const Vec3& log_scales, const Quat& rotation) {
    return covariance_from_scales(log_scales.array().exp().matrix(), rotation);
}

Mat3 splat_covariance(const GaussianSplat& splat) {
    return covariance_from_scales(activated_scales(splat), splat.rotation);
}

Vec3 rotation_normal(const Quat& q_raw) {
    const Quat q = normalized(q_raw);
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    return {2.0 * (x * z + w * y), 2.0 * (y * z - w * x), 1.0 - 2.0 * (x * x + y * y)};
}

Vec3 normal_of(const GaussianSplat& splat) {
    if (!splat.is_thin()) {
        throw ContractError("normal_of: splat is not a Thin splat");
    }
    return rotation_normal(splat.rotation);
}

Quat rotation_matrix_backward(const Quat& q_raw, const Mat3& d) {
    const Quat q = normalized(q_raw);
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Quat du;
    // Contractions of dL/dR with dR/d{w,x,y,z}.
    du[0] = 2.0 * (-z * d(0, 1) + y * d(0, 2) + z * d(1, 0) - x * d(1, 2) - y * d(2, 0) + x * d(2, 1));
    du[1] = 2.0 * (y * d(0, 1) + z * d(0, 2) + y * d(1, 0) - 2.0 * x * d(1, 1) - w * d(1, 2) + z * d(2, 0) +
                   w * d(2, 1) - 2.0 * x * d(2, 2));
    du[2] = 2.0 * (-2.0 * y * d(0, 0) + x * d(0, 1) + w * d(0, 2) + x * d(1, 0) + z * d(1, 2) - w * d(2, 0) +
                   z * d(2, 1) - 2.0 * y * d(2, 2));
    du[3] = 2.0 * (-2.0 * z * d(0, 0) - w * d(0, 1) + x * d(0, 2) + w * d(1, 0) - 2.0 * z * d(1, 1) + y * d(1, 2) +
                   x * d(2, 0) + y * d(2, 1));
    return normalize_backward(q_raw, du);
}

Quat rotation_normal_backward(const Quat& q_raw, const Vec3& dn) {
    Mat3 d = Mat3::Zero();
    d.col(2) = dn;
    return rotation_matrix_backward(q_raw, d);
}

}  // namespace geogs
