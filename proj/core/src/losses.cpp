#include "geogs/losses.hpp"

#include "geogs/error.hpp"
#include "geogs/knn.hpp"
#include "geogs/metrics.hpp"
#include "geogs/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace geogs {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

PhotometricResult photometric_loss(const Image& rendered, const Image& reference) {
    if (!rendered.same_shape(reference) || rendered.empty()) {
        throw InputError("photometric_loss: image dimensions differ");
    }
    PhotometricResult out;
    out.gradient = Image(rendered.width, rendered.height);
    const double inv = 1.0 / static_cast<double>(rendered.data.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < rendered.data.size(); ++i) {
        const double d = rendered.data[i] - reference.data[i];
        sum += std::abs(d);
        out.gradient.data[i] = sign_of(d) * inv;
    }
    out.loss = sum * inv;
    return out;
}

PhotometricResult photometric_loss(const Image& rendered, const Image& reference, double dssim_weight) {
    PhotometricResult l1 = photometric_loss(rendered, reference);
    if (dssim_weight == 0.0) {
        return l1;
    }
    const SsimResult s = ssim_with_gradient(rendered, reference);
    PhotometricResult out;
    out.loss = (1.0 - dssim_weight) * l1.loss + dssim_weight * 0.5 * (1.0 - s.value);
    out.gradient = Image(rendered.width, rendered.height);
    for (std::size_t i = 0; i < out.gradient.data.size(); ++i) {
        out.gradient.data[i] = (1.0 - dssim_weight) * l1.gradient.data[i] - dssim_weight * 0.5 * s.gradient.data[i];
    }
    return out;
}

std::vector<std::size_t> select_view_thin(const GaussianMap& map, const CameraView& camera,
                                          const RenderSettings& settings) {
    std::vector<std::size_t> out;
    const int w = camera.intrinsics.width;
    const int h = camera.intrinsics.height;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const GaussianSplat& s = map.splats[i];
        if (!s.is_thin()) {
            continue;
        }
        const auto p = project(s, camera, settings, i);
        if (!p) {
            continue;
        }
        const auto conic = conic_of(p->cov2d);
        if (!conic) {
            continue;
        }
        // Pixel centers inside the ellipse d^T cov^-1 d <= 4, scanned over its bounding box.
        const double ex = 2.0 * std::sqrt(p->cov2d(0, 0));
        const double ey = 2.0 * std::sqrt(p->cov2d(1, 1));
        const int x0 = std::max(0, static_cast<int>(std::ceil(p->mean2d.x() - ex)));
        const int x1 = std::min(w - 1, static_cast<int>(std::floor(p->mean2d.x() + ex)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(p->mean2d.y() - ey)));
        const int y1 = std::min(h - 1, static_cast<int>(std::floor(p->mean2d.y() + ey)));
        bool covered = false;
        for (int y = y0; y <= y1 && !covered; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - p->mean2d.x();
                const double dy = y - p->mean2d.y();
                const double m = (*conic)[0] * dx * dx + 2.0 * (*conic)[1] * dx * dy + (*conic)[2] * dy * dy;
                if (m <= 4.0) {
                    covered = true;
                    break;
                }
            }
        }
        if (covered) {
            out.push_back(i);
        }
    }
    return out;
}

void refresh_neighbors(GaussianMap& map, double angle_filter, std::size_t max_neighbors) {
    map.neighbor_lists.assign(map.size(), {});
    std::vector<std::size_t> thin_ids;
    std::vector<Vec3> thin_points;
    std::vector<Vec3> normals;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (map.splats[i].is_thin()) {
            thin_ids.push_back(i);
            thin_points.push_back(map.splats[i].position);
            normals.push_back(normal_of(map.splats[i]));
        }
    }
    map.neighbors_stale = false;
    if (thin_ids.size() < 2) {
        return;
    }
    const std::size_t k = std::min(max_neighbors, thin_ids.size() - 1);
    const KdTree tree(thin_points);
    for (std::size_t t = 0; t < thin_ids.size(); ++t) {
        auto& list = map.neighbor_lists[thin_ids[t]];
        for (const Neighbor& nb : tree.knn(thin_points[t], k, t)) {
            // Signed comparison: a flipped normal counts as a large deviation.
            const double c = std::clamp(normals[t].dot(normals[nb.id]), -1.0, 1.0);
            if (std::acos(c) <= angle_filter) {
                list.push_back(thin_ids[nb.id]);
            }
        }
    }
}

GeometricLossResult geometric_loss(const GaussianMap& map, std::span<const std::size_t> view_set) {
    GeometricLossResult out;
    out.d_position.assign(map.size(), Vec3::Zero());
    out.d_rotation.assign(map.size(), Quat::Zero());
    if (view_set.empty()) {
        return out;
    }
    std::vector<Vec3> d_normal(map.size(), Vec3::Zero());
    const double inv_set = 1.0 / static_cast<double>(view_set.size());
    double total = 0.0;
    for (const std::size_t i : view_set) {
        if (i >= map.size() || i >= map.neighbor_lists.size()) {
            throw InputError("geometric_loss: view set refers to an unknown splat");
        }
        const auto& list = map.neighbor_lists[i];
        if (list.empty()) {
            continue;
        }
        ++out.active;
        const GaussianSplat& si = map.splats[i];
        const Vec3 ni = normal_of(si);
        const double inv_m = 1.0 / static_cast<double>(list.size());
        double mean_offset = 0.0;
        for (const std::size_t j : list) {
            mean_offset += normal_of(map.splats[j]).dot(map.splats[j].position);
        }
        mean_offset *= inv_m;
        const double e = ni.dot(si.position) - mean_offset;
        const double s = sign_of(e) * inv_set;
        double e_normal = 0.0;
        out.d_position[i] += s * ni;
        d_normal[i] += s * si.position;
        for (const std::size_t j : list) {
            const Vec3 nj = normal_of(map.splats[j]);
            out.d_position[j] -= s * inv_m * nj;
            d_normal[j] -= s * inv_m * map.splats[j].position;
            const Vec3 diff = nj - ni;
            const double len = diff.norm();
            e_normal += len;
            if (len > 0.0) {
                const Vec3 g = diff * (inv_set * inv_m / len);
                d_normal[j] += g;
                d_normal[i] -= g;
            }
        }
        total += std::abs(e) + e_normal * inv_m;
    }
    out.loss = total * inv_set;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (d_normal[i] != Vec3::Zero()) {
            out.d_rotation[i] = rotation_normal_backward(map.splats[i].rotation, d_normal[i]);
        }
    }
    return out;
}

double geo_weight(const TrainConfig& config, long iter) {
    return (config.geo && iter >= config.warmup_iters) ? config.lambda_geo : 0.0;
}

double combined_loss(double pho, double geo, const TrainConfig& config, long iter) {
    const double w = geo_weight(config, iter);
    return w == 0.0 ? config.lambda_pho * pho : config.lambda_pho * pho + w * geo;
}

}  // namespace geogs
