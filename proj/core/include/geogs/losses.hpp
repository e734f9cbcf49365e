#pragma once

#include "geogs/config.hpp"
#include "geogs/rasterizer.hpp"
#include "geogs/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace geogs {

struct PhotometricResult {
    double loss = 0.0;
    /// dL/d(rendered), same shape as the inputs.
    Image gradient;
};

/// Mean absolute difference over all pixels and channels.
PhotometricResult photometric_loss(const Image& rendered, const Image& reference);

/// (1 - w) * L1 + w * (1 - SSIM) / 2.
PhotometricResult photometric_loss(const Image& rendered, const Image& reference, double dssim_weight);

/// Thin splats inside the view frustum whose 2-sigma footprint covers at least one pixel center.
std::vector<std::size_t> select_view_thin(const GaussianMap& map, const CameraView& camera,
                                          const RenderSettings& settings = {});

/// Rebuilds the neighbor list of every Thin splat from its nearest Thin splats, dropping neighbors
/// whose normal deviates by more than angle_filter. Free splats get empty lists.
void refresh_neighbors(GaussianMap& map, double angle_filter, std::size_t max_neighbors = 8);

struct GeometricLossResult {
    double loss = 0.0;
    std::vector<Vec3> d_position;
    std::vector<Quat> d_rotation;
    /// Splats of the view set with at least one neighbor.
    std::size_t active = 0;
};

/// Co-planar smoothness loss over `view_set`, with gradients for the centers and their neighbors.
GeometricLossResult geometric_loss(const GaussianMap& map, std::span<const std::size_t> view_set);

/// Weight applied to the geometric term at iteration `iter` (0 during warm-up).
double geo_weight(const TrainConfig& config, long iter);

/// lambda_pho * pho, plus lambda_geo * geo once warm-up is over.
double combined_loss(double pho, double geo, const TrainConfig& config, long iter);

}  // namespace geogs
