#pragma once

#include "geogs/densifier.hpp"
#include "geogs/rasterizer.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace geogs {

/// Every training hyperparameter. Defaults reproduce the published 30k-iteration schedule.
struct TrainConfig {
    // Optimizer. learning_rate is the position rate; the other groups have their own rates.
    double learning_rate = 0.0002;
    double lr_scale = 0.005;
    double lr_rotation = 0.001;
    double lr_sh = 0.0025;
    double lr_opacity = 0.05;

    // Loss weights.
    double lambda_pho = 0.8;
    double lambda_geo = 0.3;
    bool use_dssim = false;
    double lambda_dssim = 0.2;

    // Schedule, in iterations.
    long total_iters = 30000;
    long warmup_iters = 2000;
    long densify_until = 10000;
    long densify_interval = 10;
    long knn_refresh_early = 100;
    long knn_refresh_late = 1000;
    long knn_refresh_switch = 20000;
    long checkpoint_interval = 5000;

    // Densification and pruning.
    double opacity_floor = 0.05;
    double grad_threshold = 0.0002;
    /// Size threshold for clone-vs-split as a fraction of the scene extent.
    double size_threshold_factor = 0.01;

    // Geometric constraint.
    bool geo = true;
    long neighbors_m = 8;
    double neighbor_angle_filter = 0.5236;

    // Initialization.
    int sh_degree = 2;
    double initial_opacity = 0.1;
    long normal_k = 10;
    double dist_factor = 3.0;
    double angle_thresh = 0.349;

    // Rasterizer.
    double near_plane = 0.01;
    double frustum_margin = 1.3;
    double dilation = 0.3;

    // Data.
    double train_fraction = 100.0;
    std::uint64_t seed = 0;

    /// Throws ConfigError when a value is out of range or the schedule is inconsistent.
    void validate() const;

    /// Defaults with every schedule constant scaled by total_iters / 30000 (densify_interval kept).
    static TrainConfig scaled_to(long total_iters);

    RenderSettings render_settings() const;
};

/// Applies `key=value` lines on top of `config`. Blank lines and `#` comments are ignored.
/// Unknown keys and malformed values raise ConfigError. Returns the keys that were set.
std::vector<std::string> apply_config_text(TrainConfig& config, std::string_view text);

/// key=value rendering of every field, in declaration order.
std::string to_config_text(const TrainConfig& config);

/// Names of the schedule keys affected by TrainConfig::scaled_to.
const std::vector<std::string>& schedule_keys();

}  // namespace geogs
