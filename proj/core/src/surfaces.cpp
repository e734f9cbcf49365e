#include "geogs/surfaces.hpp"

#include <algorithm>
#include <cmath>

namespace geogs {

namespace {

double patch_distance(const PlanarPatch& s, const Vec3& p) {
    const Vec3 d = p - s.center;
    const double h = s.normal.dot(d);
    const double u = s.u_axis.dot(d);
    const double v = s.v_axis().dot(d);
    const double du = std::max(0.0, std::abs(u) - s.half_u);
    const double dv = std::max(0.0, std::abs(v) - s.half_v);
    if (du == 0.0 && dv == 0.0) {
        return std::abs(h);
    }
    return std::sqrt(h * h + du * du + dv * dv);
}

double box_distance(const AxisBox& b, const Vec3& p) {
    const Vec3 outside = (b.min - p).cwiseMax(p - b.max).cwiseMax(0.0);
    if (outside.squaredNorm() > 0.0) {
        return outside.norm();
    }
    return (p - b.min).cwiseMin(b.max - p).minCoeff();
}

}  // namespace

double distance_to(const Surface& surface, const Vec3& p) {
    return std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PlanarPatch>) {
                return patch_distance(s, p);
            } else {
                return box_distance(s, p);
            }
        },
        surface);
}

double distance_to_nearest(std::span<const Surface> surfaces, const Vec3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Surface& s : surfaces) {
        best = std::min(best, distance_to(s, p));
    }
    return best;
}

}  // namespace geogs
