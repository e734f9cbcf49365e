#pragma once

#include "geogs/gradients.hpp"
#include "geogs/types.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace geogs {

struct RenderSettings {
    double near_plane = 0.01;
    /// Splats whose projected mean falls outside margin x the half image extent are culled.
    double frustum_margin = 1.3;
    /// Added to both diagonal entries of the 2D covariance (pixels^2).
    double dilation = 0.3;
    /// Contributors below this effective opacity are skipped. 0 disables skipping and tile culling.
    double min_alpha = 1.0 / 255.0;
    /// Compositing stops once transmittance drops below this value. 0 disables early termination.
    double transmittance_floor = 1e-4;
    Vec3 background = Vec3::Zero();
    int tile_size = 16;
};

struct ProjectedSplat {
    Vec2 mean2d = Vec2::Zero();
    Mat2 cov2d = Mat2::Identity();
    double depth = 0.0;
    Vec3 color = Vec3::Zero();
    double alpha = 0.0;
    std::size_t source_id = 0;
    Vec3 cam_point = Vec3::Zero();
    Vec3 view_dir = Vec3::UnitZ();
};

struct RenderOutput {
    Image image;
    /// Final transmittance per pixel, row-major.
    std::vector<double> transmittance;
    /// Number of blended contributors per pixel, row-major.
    std::vector<int> contributor_counts;
    /// Splats dropped because the regularized 2D covariance was not invertible.
    int skipped_singular = 0;
};

/// Projects a splat into the camera. nullopt when it lies in front of the near plane or
/// its projected mean leaves the frustum margin.
std::optional<ProjectedSplat> project(const GaussianSplat& splat, const CameraView& camera,
                                      const RenderSettings& settings = {}, std::size_t source_id = 0);

/// Inverse of the 2D covariance as (a, b, c) for [[a, b], [b, c]]; nullopt when singular.
std::optional<Eigen::Vector3d> conic_of(const Mat2& cov2d);

/// Effective opacity of a projected splat at pixel (px, py) given its conic.
inline double effective_alpha(const ProjectedSplat& p, const Eigen::Vector3d& conic, double px, double py) {
    const double dx = px - p.mean2d.x();
    const double dy = py - p.mean2d.y();
    const double power = -0.5 * (conic[0] * dx * dx + conic[2] * dy * dy) - conic[1] * dx * dy;
    return p.alpha * std::exp(power);
}

/// Depth-sorted front-to-back alpha compositing over 16x16 tiles. Pixel (x, y) samples at
/// integer coordinates (x, y) in the image plane.
RenderOutput render(const GaussianMap& map, const CameraView& camera, const RenderSettings& settings = {});

/// Exact gradients of sum(upstream . image) w.r.t. every splat parameter.
SplatGradients render_backward(const GaussianMap& map, const CameraView& camera, const Image& upstream,
                               const RenderSettings& settings = {});

}  // namespace geogs
