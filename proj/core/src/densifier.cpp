#include "geogs/densifier.hpp"

#include "geogs/error.hpp"
#include "geogs/transforms.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace geogs {

namespace {

constexpr double kSplitScaleFactor = 1.6;

// Rebuilds neighbor lists after an edit: survivors keep neighbors that survived, new splats start empty.
void remap_neighbors(GaussianMap& map, const std::vector<std::vector<std::size_t>>& old_lists,
                     const std::vector<std::size_t>& survivor_of_old) {
    constexpr std::size_t kGone = static_cast<std::size_t>(-1);
    std::vector<std::vector<std::size_t>> lists(map.size());
    for (std::size_t old = 0; old < old_lists.size() && old < survivor_of_old.size(); ++old) {
        const std::size_t now = survivor_of_old[old];
        if (now == kGone) {
            continue;
        }
        for (const std::size_t nb : old_lists[old]) {
            const std::size_t mapped = nb < survivor_of_old.size() ? survivor_of_old[nb] : kGone;
            if (mapped != kGone && map.splats[mapped].is_thin() && mapped != now) {
                lists[now].push_back(mapped);
            }
        }
    }
    map.neighbor_lists = std::move(lists);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over the combined words.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void GrowthStats::resize(std::size_t n) {
    accum_grad.assign(n, 0.0);
    accum_count.assign(n, 0);
    accum_step.assign(n, Vec3::Zero());
}

void GrowthStats::reset() { resize(size()); }

void GrowthStats::accumulate(const SplatGradients& grads, double position_lr) {
    if (grads.size() != size()) {
        throw InputError("GrowthStats: gradient count does not match tracked splats");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (!grads.visible[i]) {
            continue;
        }
        accum_grad[i] += grads.position[i].norm();
        accum_count[i] += 1;
        accum_step[i] -= position_lr * grads.position[i];
    }
}

Vec3 GrowthStats::mean_step(std::size_t i) const {
    return accum_count[i] == 0 ? Vec3::Zero() : Vec3(accum_step[i] / static_cast<double>(accum_count[i]));
}

GaussianSplat tangent_clone(const GaussianSplat& splat, const Vec3& step) {
    if (!splat.is_thin()) {
        throw ContractError("tangent_clone: requires a Thin splat");
    }
    const Vec3 n = normal_of(splat);
    GaussianSplat clone = splat;
    clone.position = splat.position + (step - n * n.dot(step));
    return clone;
}

std::pair<GaussianSplat, GaussianSplat> coplanar_split(const GaussianSplat& splat, std::uint64_t seed) {
    if (!splat.is_thin()) {
        throw ContractError("coplanar_split: requires a Thin splat");
    }
    const Mat3 rot = rotation_matrix(splat.rotation);
    const Vec3 scales = activated_scales(splat);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto child = [&] {
        GaussianSplat c = splat;
        const double u = normal(rng) * scales.x();
        const double v = normal(rng) * scales.y();
        c.position = splat.position + rot.col(0) * u + rot.col(1) * v;
        c.log_scales.x() -= std::log(kSplitScaleFactor);
        c.log_scales.y() -= std::log(kSplitScaleFactor);
        return c;
    };
    GaussianSplat first = child();
    GaussianSplat second = child();
    return {std::move(first), std::move(second)};
}

FreeDensifyResult free_split_clone(const GaussianSplat& splat, const Vec3& step, double size_threshold,
                                   std::uint64_t seed) {
    FreeDensifyResult out;
    const Vec3 scales = activated_scales(splat);
    if (scales.maxCoeff() > size_threshold) {
        out.split = true;
        const Mat3 rot = rotation_matrix(splat.rotation);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int k = 0; k < 2; ++k) {
            GaussianSplat c = splat;
            const Vec3 z(normal(rng), normal(rng), normal(rng));
            c.position = splat.position + rot * scales.cwiseProduct(z);
            c.log_scales.array() -= std::log(kSplitScaleFactor);
            if (c.is_thin()) {
                c.log_scales.z() = splat.log_scales.z();
            }
            out.created.push_back(std::move(c));
        }
    } else {
        GaussianSplat c = splat;
        c.position = splat.position + step;
        out.created.push_back(std::move(c));
    }
    return out;
}

std::string DensifyReport::line() const {
    std::ostringstream os;
    os << "iter=" << iteration << " cloned_thin=" << cloned_thin << " split_thin=" << split_thin
       << " cloned_free=" << cloned_free << " split_free=" << split_free << " pruned=" << pruned
       << " total=" << total;
    return os.str();
}

Lineage densify_pass(GaussianMap& map, GrowthStats& stats, const DensifyOptions& options, std::uint64_t seed,
                     DensifyReport& report) {
    const std::size_t n = map.size();
    if (stats.size() != n) {
        throw InputError("densify_pass: growth statistics do not cover the map");
    }
    constexpr std::size_t kGone = static_cast<std::size_t>(-1);
    std::vector<GaussianSplat> kept;
    std::vector<GaussianSplat> added;
    Lineage kept_lineage;
    Lineage added_lineage;
    std::vector<std::size_t> survivor_of_old(n, kGone);
    kept.reserve(n);

    auto keep = [&](std::size_t i) {
        survivor_of_old[i] = kept.size();
        kept.push_back(map.splats[i]);
        kept_lineage.parent.push_back(i);
        kept_lineage.fresh.push_back(0);
    };
    auto add = [&](GaussianSplat s, std::size_t parent, bool fresh) {
        added.push_back(std::move(s));
        added_lineage.parent.push_back(parent);
        added_lineage.fresh.push_back(fresh ? 1 : 0);
    };

    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t count = stats.accum_count[i];
        if (count == 0 || !(stats.accum_grad[i] / count > options.grad_threshold)) {
            keep(i);
            continue;
        }
        const GaussianSplat& s = map.splats[i];
        const Vec3 step = stats.mean_step(i);
        const std::uint64_t item_seed = mix_seed(seed, i);
        if (s.is_thin() && options.tangent_space) {
            const Vec3 scales = activated_scales(s);
            if (std::max(scales.x(), scales.y()) <= options.size_threshold) {
                keep(i);
                add(tangent_clone(s, step), i, false);
                ++report.cloned_thin;
            } else {
                auto [a, b] = coplanar_split(s, item_seed);
                add(std::move(a), i, true);
                add(std::move(b), i, true);
                ++report.split_thin;
            }
        } else {
            FreeDensifyResult r = free_split_clone(s, step, options.size_threshold, item_seed);
            if (r.split) {
                for (auto& c : r.created) {
                    add(std::move(c), i, true);
                }
                ++report.split_free;
            } else {
                keep(i);
                add(std::move(r.created.front()), i, false);
                ++report.cloned_free;
            }
        }
    }

    const auto old_lists = std::move(map.neighbor_lists);
    const std::size_t survivors = kept.size();
    map.splats = std::move(kept);
    map.splats.insert(map.splats.end(), std::make_move_iterator(added.begin()), std::make_move_iterator(added.end()));
    remap_neighbors(map, old_lists, survivor_of_old);
    if (!added.empty() || survivors != n) {
        map.neighbors_stale = true;
    }

    Lineage lineage = std::move(kept_lineage);
    lineage.parent.insert(lineage.parent.end(), added_lineage.parent.begin(), added_lineage.parent.end());
    lineage.fresh.insert(lineage.fresh.end(), added_lineage.fresh.begin(), added_lineage.fresh.end());

    report.total = map.size();
    stats.resize(map.size());
    return lineage;
}

Lineage prune(GaussianMap& map, double opacity_floor, std::size_t& removed) {
    if (!(opacity_floor > 0.0 && opacity_floor < 1.0)) {
        throw ConfigError("prune: opacity floor must lie in (0,1)");
    }
    constexpr std::size_t kGone = static_cast<std::size_t>(-1);
    const std::size_t n = map.size();
    std::vector<std::size_t> survivor_of_old(n, kGone);
    std::vector<GaussianSplat> kept;
    Lineage lineage;
    kept.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (activated_opacity(map.splats[i]) < opacity_floor) {
            continue;
        }
        survivor_of_old[i] = kept.size();
        kept.push_back(map.splats[i]);
        lineage.parent.push_back(i);
        lineage.fresh.push_back(0);
    }
    removed = n - kept.size();
    const auto old_lists = std::move(map.neighbor_lists);
    map.splats = std::move(kept);
    remap_neighbors(map, old_lists, survivor_of_old);
    if (removed > 0) {
        map.neighbors_stale = true;
    }
    return lineage;
}

}  // namespace geogs
