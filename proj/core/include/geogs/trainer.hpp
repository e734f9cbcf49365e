#pragma once

#include "geogs/config.hpp"
#include "geogs/densifier.hpp"
#include "geogs/types.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace geogs {

/// One row of the metrics log.
struct IterationRecord {
    long iter = 0;
    double pho_loss = 0.0;
    double geo_loss = 0.0;
    double total_loss = 0.0;
    std::size_t n_splats = 0;
};

/// Per-iteration detail for instrumentation.
struct IterationEvent {
    long iter = 0;
    std::size_t camera = 0;
    double geo_weight = 0.0;
    /// Largest absolute gradient entry contributed by the geometric term (after weighting).
    double geo_grad_max = 0.0;
    std::size_t view_thin = 0;
};

struct PruneEvent {
    long iter = 0;
    double floor = 0.0;
    std::size_t removed = 0;
    /// Largest opacity among removed splats (0 when none) and smallest among survivors (1 when none).
    double max_removed_opacity = 0.0;
    double min_kept_opacity = 1.0;
};

class TrainObserver {
public:
    virtual ~TrainObserver() = default;
    virtual void on_iteration(const IterationEvent&, const IterationRecord&) {}
    virtual void on_neighbor_refresh(long /*iter*/, const GaussianMap&) {}
    virtual void on_densify(const DensifyReport&) {}
    virtual void on_prune(const PruneEvent&) {}
    /// After each densify and each prune, with the provenance of every splat of the edited map.
    virtual void on_lineage(long /*iter*/, const Lineage&, const GaussianMap&) {}
};

struct TrainHooks {
    TrainObserver* observer = nullptr;
    /// Receives one growth report line per densification pass.
    std::ostream* diagnostics = nullptr;
    /// Called every checkpoint_interval iterations and before an error propagates.
    std::function<void(long iter, const GaussianMap&)> checkpoint;
};

struct TrainResult {
    GaussianMap map;
    std::vector<IterationRecord> log;
};

/// Radius of the smallest centroid-centered sphere holding every splat position.
double scene_extent(const GaussianMap& map);

/// Iterations at which neighbor lists are rebuilt.
bool is_refresh_iteration(const TrainConfig& config, long iter);
/// Iterations after which a densify + prune pass runs.
bool is_densify_iteration(const TrainConfig& config, long iter);

/// Optimizes `map` against the reference images of `cameras`.
TrainResult train(GaussianMap map, std::span<const CameraView> cameras, const TrainConfig& config,
                  const TrainHooks& hooks = {});

/// `iter,pho_loss,geo_loss,total_loss,n_splats` header plus one line per record.
std::string format_metrics_log(std::span<const IterationRecord> log);

}  // namespace geogs
