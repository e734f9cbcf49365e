#include "geogs/trainer.hpp"

#include "geogs/error.hpp"
#include "geogs/losses.hpp"
#include "geogs/optimizer.hpp"
#include "geogs/rasterizer.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace geogs {

namespace {

class CameraSchedule {
public:
    CameraSchedule(std::size_t n, std::uint64_t seed) : order_(n), rng_(mix_seed(seed, 0xCA3E7A)), pos_(n) {}

    std::size_t next() {
        if (pos_ == order_.size()) {
            std::iota(order_.begin(), order_.end(), std::size_t{0});
            std::shuffle(order_.begin(), order_.end(), rng_);
            pos_ = 0;
        }
        return order_[pos_++];
    }

private:
    std::vector<std::size_t> order_;
    std::mt19937_64 rng_;
    std::size_t pos_;
};

PruneEvent prune_stats(const GaussianMap& map, double floor, long iter) {
    PruneEvent e;
    e.iter = iter;
    e.floor = floor;
    for (const GaussianSplat& s : map.splats) {
        const double a = activated_opacity(s);
        if (a < floor) {
            e.max_removed_opacity = std::max(e.max_removed_opacity, a);
        } else {
            e.min_kept_opacity = std::min(e.min_kept_opacity, a);
        }
    }
    return e;
}

}  // namespace

double scene_extent(const GaussianMap& map) {
    if (map.empty()) {
        return 0.0;
    }
    Vec3 c = Vec3::Zero();
    for (const GaussianSplat& s : map.splats) {
        c += s.position;
    }
    c /= static_cast<double>(map.size());
    double r = 0.0;
    for (const GaussianSplat& s : map.splats) {
        r = std::max(r, (s.position - c).norm());
    }
    return r;
}

bool is_refresh_iteration(const TrainConfig& config, long iter) {
    if (iter < config.knn_refresh_switch) {
        return iter % config.knn_refresh_early == 0;
    }
    return (iter - config.knn_refresh_switch) % config.knn_refresh_late == 0;
}

bool is_densify_iteration(const TrainConfig& config, long iter) {
    return iter < config.densify_until && (iter + 1) % config.densify_interval == 0;
}

TrainResult train(GaussianMap map, std::span<const CameraView> cameras, const TrainConfig& config,
                  const TrainHooks& hooks) {
    config.validate();
    TrainResult result;
    if (config.total_iters == 0) {
        result.map = std::move(map);
        return result;
    }
    if (cameras.empty()) {
        throw InputError("train: at least one camera is required");
    }
    for (const CameraView& cam : cameras) {
        cam.validate();
        if (cam.reference.width != cam.intrinsics.width || cam.reference.height != cam.intrinsics.height) {
            throw InputError("train: camera '" + cam.id + "' has no reference image of matching size");
        }
    }
    if (map.empty()) {
        throw InputError("train: empty map");
    }
    if (map.neighbor_lists.size() != map.size()) {
        map.neighbor_lists.resize(map.size());
        map.neighbors_stale = true;
    }

    const RenderSettings rs = config.render_settings();
    DensifyOptions dopts;
    dopts.grad_threshold = config.grad_threshold;
    dopts.size_threshold = config.size_threshold_factor * scene_extent(map);
    dopts.tangent_space = config.geo;

    AdamOptimizer optimizer(
        LearningRates{config.learning_rate, config.lr_scale, config.lr_rotation, config.lr_sh, config.lr_opacity});
    optimizer.reset(map);
    GrowthStats stats;
    stats.resize(map.size());
    CameraSchedule schedule(cameras.size(), config.seed);
    const double dssim = config.use_dssim ? config.lambda_dssim : 0.0;
    result.log.reserve(static_cast<std::size_t>(config.total_iters));

    long iter = 0;
    try {
        for (; iter < config.total_iters; ++iter) {
            if (config.geo && is_refresh_iteration(config, iter)) {
                refresh_neighbors(map, config.neighbor_angle_filter, static_cast<std::size_t>(config.neighbors_m));
                if (hooks.observer) {
                    hooks.observer->on_neighbor_refresh(iter, map);
                }
            }

            IterationEvent event;
            event.iter = iter;
            event.camera = schedule.next();
            const CameraView& cam = cameras[event.camera];

            const RenderOutput frame = render(map, cam, rs);
            PhotometricResult pho = photometric_loss(frame.image, cam.reference, dssim);
            for (double& g : pho.gradient.data) {
                g *= config.lambda_pho;
            }
            SplatGradients grads = render_backward(map, cam, pho.gradient, rs);
            if (iter < config.densify_until) {
                stats.accumulate(grads, config.learning_rate);
            }

            double geo = 0.0;
            event.geo_weight = geo_weight(config, iter);
            if (event.geo_weight > 0.0) {
                const auto view = select_view_thin(map, cam, rs);
                event.view_thin = view.size();
                const GeometricLossResult g = geometric_loss(map, view);
                geo = g.loss;
                for (std::size_t i = 0; i < map.size(); ++i) {
                    const Vec3 dp = event.geo_weight * g.d_position[i];
                    const Quat dq = event.geo_weight * g.d_rotation[i];
                    grads.position[i] += dp;
                    grads.rotation[i] += dq;
                    event.geo_grad_max =
                        std::max({event.geo_grad_max, dp.cwiseAbs().maxCoeff(), dq.cwiseAbs().maxCoeff()});
                }
            }

            optimizer.step(map, grads);

            IterationRecord record;
            record.iter = iter;
            record.pho_loss = pho.loss;
            record.geo_loss = geo;
            record.total_loss = combined_loss(pho.loss, geo, config, iter);

            if (is_densify_iteration(config, iter)) {
                DensifyReport report;
                report.iteration = iter;
                const Lineage grown = densify_pass(map, stats, dopts, mix_seed(config.seed, iter), report);
                optimizer.remap(grown);
                if (hooks.observer) {
                    hooks.observer->on_lineage(iter, grown, map);
                }
                const PruneEvent pe = prune_stats(map, config.opacity_floor, iter);
                std::size_t removed = 0;
                const Lineage kept = prune(map, config.opacity_floor, removed);
                optimizer.remap(kept);
                if (hooks.observer) {
                    hooks.observer->on_lineage(iter, kept, map);
                }
                stats.resize(map.size());
                report.pruned = removed;
                report.total = map.size();
                if (hooks.diagnostics) {
                    *hooks.diagnostics << report.line() << '\n';
                }
                if (hooks.observer) {
                    PruneEvent done = pe;
                    done.removed = removed;
                    hooks.observer->on_densify(report);
                    hooks.observer->on_prune(done);
                }
            }

            record.n_splats = map.size();
            result.log.push_back(record);
            if (hooks.observer) {
                hooks.observer->on_iteration(event, record);
            }
            if (hooks.checkpoint && (iter + 1) % config.checkpoint_interval == 0) {
                hooks.checkpoint(iter + 1, map);
            }
        }
    } catch (const Error&) {
        if (hooks.checkpoint) {
            hooks.checkpoint(iter, map);
        }
        throw;
    }
    result.map = std::move(map);
    return result;
}

std::string format_metrics_log(std::span<const IterationRecord> log) {
    std::ostringstream os;
    os << "iter,pho_loss,geo_loss,total_loss,n_splats\n";
    char buf[160];
    for (const IterationRecord& r : log) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%zu\n", r.iter, r.pho_loss, r.geo_loss, r.total_loss,
                      r.n_splats);
        os << buf;
    }
    return os.str();
}

}  // namespace geogs
