#pragma once

#include "geogs/types.hpp"

#include <cstdint>
#include <vector>

namespace geogs {

/// Per-splat parameter gradients, parallel to GaussianMap::splats.
struct SplatGradients {
    std::vector<Vec3> position;
    std::vector<Vec3> log_scales;
    std::vector<Quat> rotation;
    std::vector<ShCoeffs> sh;
    std::vector<double> opacity_logit;
    /// 1 when the splat contributed to at least one pixel of the view.
    std::vector<std::uint8_t> visible;

    static SplatGradients zeros(const GaussianMap& map);

    std::size_t size() const noexcept { return position.size(); }
    /// this += scale * other
    void add_scaled(const SplatGradients& other, double scale);
    void scale(double factor);
    bool all_finite() const;
    /// Largest absolute entry across every parameter group.
    double max_abs() const;
};

}  // namespace geogs
