#pragma once

#include "geogs/types.hpp"

namespace geogs {

/// Unit quaternion (w,x,y,z) for the given quaternion; throws InputError on a zero quaternion.
Quat normalized(const Quat& q);

/// Rotation matrix of q after normalization.
Mat3 rotation_matrix(const Quat& q);

/// Inverse of rotation_matrix for proper rotations. Returns the representative with w >= 0.
Quat quaternion_from_matrix(const Mat3& r);

/// Sigma = R S S^T R^T with S = diag(exp(log_scales)).
Mat3 build_covariance(const Vec3& log_scales, const Quat& rotation);

/// Same factorization from already activated scales.
Mat3 covariance_from_scales(const Vec3& scales, const Quat& rotation);

/// World covariance of a splat, honoring the frozen thickness of Thin splats.
Mat3 splat_covariance(const GaussianSplat& splat);

/// Third rotation column of a Thin splat. Throws ContractError for Free splats.
Vec3 normal_of(const GaussianSplat& splat);

/// Third rotation column without the kind check.
Vec3 rotation_normal(const Quat& q);

/// Chain rule through rotation_matrix: given dL/dR returns dL/dq for the raw (unnormalized) q.
Quat rotation_matrix_backward(const Quat& q, const Mat3& d_rotation);

/// Chain rule through rotation_normal: given dL/dn returns dL/dq for the raw q.
Quat rotation_normal_backward(const Quat& q, const Vec3& d_normal);

}  // namespace geogs
