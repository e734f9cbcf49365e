#pragma once

#include "geogs/types.hpp"

#include <limits>
#include <span>
#include <variant>

namespace geogs {

/// Rectangle (or infinite plane when the half extents are infinite) through `center`.
struct PlanarPatch {
    Vec3 center = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    /// In-plane direction of the first half extent; the second runs along normal x u_axis.
    Vec3 u_axis = Vec3::UnitX();
    double half_u = std::numeric_limits<double>::infinity();
    double half_v = std::numeric_limits<double>::infinity();

    Vec3 v_axis() const { return normal.cross(u_axis); }
};

/// Surface of an axis-aligned box.
struct AxisBox {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Ones();
};

using Surface = std::variant<PlanarPatch, AxisBox>;

double distance_to(const Surface& surface, const Vec3& p);
/// Smallest distance to any surface; +inf for an empty list.
double distance_to_nearest(std::span<const Surface> surfaces, const Vec3& p);

}  // namespace geogs
