#pragma once

#include "geogs/geometry.hpp"
#include "geogs/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace geogs {

struct InitOptions {
    double initial_opacity = 0.1;
    int sh_degree = 2;
    /// Scale used when a point has no neighbor to measure against.
    double fallback_scale = 0.01;
};

/// Right-handed orthonormal frame (b1, b2) completing `normal`.
/// Built from the coordinate axis with the smallest |normal| component: b2 = n x e, b1 = b2 x n.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& normal);

/// Splats from a classified cloud: co points become Thin splats aligned with their normal,
/// ind points become isotropic Free splats. Splat order is co points first, then ind points.
GaussianMap init_map(const ClassifiedCloud& cloud, const InitOptions& options = {},
                     std::vector<std::string>* warnings = nullptr);

/// Degree-0 SH band reproducing `rgb` (higher bands zero).
ShCoeffs sh_from_color(const Vec3& rgb, int degree);

}  // namespace geogs
