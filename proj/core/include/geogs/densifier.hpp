#pragma once

#include "geogs/gradients.hpp"
#include "geogs/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace geogs {

/// Positional-gradient statistics gathered between densification passes.
struct GrowthStats {
    std::vector<double> accum_grad;         // sum of |dL/dmu| over contributing views
    std::vector<std::uint32_t> accum_count;  // number of contributing views
    std::vector<Vec3> accum_step;           // sum of gradient-descent steps -lr * dL/dmu

    void resize(std::size_t n);
    void reset();
    std::size_t size() const noexcept { return accum_grad.size(); }
    /// Adds one view's positional gradients for every visible splat.
    void accumulate(const SplatGradients& grads, double position_lr);
    /// Mean accumulated step for splat i (zero when never visible).
    Vec3 mean_step(std::size_t i) const;
};

/// Provenance of each splat after a structural edit: new splat i came from old splat parent[i].
/// fresh[i] marks splats whose optimizer state must start from zero.
struct Lineage {
    std::vector<std::size_t> parent;
    std::vector<std::uint8_t> fresh;

    std::size_t size() const noexcept { return parent.size(); }
};

/// Tangent-plane clone of a Thin splat: mu' = mu + step - n (n . step). Every other parameter is copied.
GaussianSplat tangent_clone(const GaussianSplat& splat, const Vec3& step);

/// Replaces a Thin splat by two children sampled on its tangent plane with tangent scales / 1.6.
std::pair<GaussianSplat, GaussianSplat> coplanar_split(const GaussianSplat& splat, std::uint64_t seed);

/// Conventional densification of a Free splat: split into two children sampled from the full
/// 3D Gaussian when its largest scale exceeds size_threshold, otherwise clone at mu + step.
/// The returned splats are the new ones; a clone keeps the original, a split replaces it.
struct FreeDensifyResult {
    bool split = false;
    std::vector<GaussianSplat> created;
};
FreeDensifyResult free_split_clone(const GaussianSplat& splat, const Vec3& step, double size_threshold,
                                   std::uint64_t seed);

struct DensifyOptions {
    double grad_threshold = 0.0002;
    double size_threshold = 0.01;
    /// When false, Thin splats are densified with the Free-splat rules.
    bool tangent_space = true;
};

struct DensifyReport {
    long iteration = 0;
    std::size_t cloned_thin = 0;
    std::size_t split_thin = 0;
    std::size_t cloned_free = 0;
    std::size_t split_free = 0;
    std::size_t pruned = 0;
    std::size_t total = 0;

    /// `iter=<n> cloned_thin=<a> split_thin=<b> cloned_free=<c> split_free=<d> pruned=<e> total=<f>`
    std::string line() const;
};

/// One densification pass. Survivors keep their order; new splats are appended in source order.
/// Resets `stats` (resized to the new map) and returns the lineage for optimizer state.
Lineage densify_pass(GaussianMap& map, GrowthStats& stats, const DensifyOptions& options, std::uint64_t seed,
                     DensifyReport& report);

/// Removes splats with activated opacity strictly below opacity_floor.
Lineage prune(GaussianMap& map, double opacity_floor, std::size_t& removed);

/// Derives an independent stream seed for item `index` of a pass seeded with `seed`.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace geogs
