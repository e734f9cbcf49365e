#include "geogs/rasterizer.hpp"

#include "geogs/error.hpp"
#include "geogs/sh.hpp"
#include "geogs/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace geogs {

namespace {

using Mat23 = Eigen::Matrix<double, 2, 3>;

Mat23 projection_jacobian(const Intrinsics& in, const Vec3& t) {
    const double iz = 1.0 / t.z();
    const double iz2 = iz * iz;
    Mat23 j;
    j << in.fx * iz, 0.0, -in.fx * t.x() * iz2,
         0.0, in.fy * iz, -in.fy * t.y() * iz2;
    return j;
}

struct Prepared {
    ProjectedSplat proj;
    Eigen::Vector3d conic;
};

// Everything the forward and backward passes share for one view.
struct Frame {
    std::vector<Prepared> splats;  // sorted by (depth, source_id)
    std::vector<std::vector<std::uint32_t>> tiles;
    int tiles_x = 0;
    int tiles_y = 0;
    int skipped_singular = 0;
};

double influence_radius(const ProjectedSplat& p, double min_alpha) {
    if (min_alpha <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double ratio = p.alpha / min_alpha;
    if (!(ratio >= 1.0)) {
        return -1.0;  // can never reach the skip threshold
    }
    const Mat2& c = p.cov2d;
    const double mid = 0.5 * (c(0, 0) + c(1, 1));
    const double half = 0.5 * (c(0, 0) - c(1, 1));
    const double lambda_max = mid + std::sqrt(half * half + c(0, 1) * c(0, 1));
    const double r = std::sqrt(2.0 * lambda_max * std::log(ratio));
    return r * (1.0 + 1e-6) + 1e-6;
}

Frame prepare_frame(const GaussianMap& map, const CameraView& camera, const RenderSettings& settings) {
    camera.validate();
    if (settings.tile_size <= 0) {
        throw ConfigError("render: tile size must be positive");
    }
    const int w = camera.intrinsics.width;
    const int h = camera.intrinsics.height;
    Frame frame;
    frame.tiles_x = (w + settings.tile_size - 1) / settings.tile_size;
    frame.tiles_y = (h + settings.tile_size - 1) / settings.tile_size;
    frame.tiles.resize(static_cast<std::size_t>(frame.tiles_x) * frame.tiles_y);

    frame.splats.reserve(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
        auto p = project(map.splats[i], camera, settings, i);
        if (!p) {
            continue;
        }
        auto conic = conic_of(p->cov2d);
        if (!conic) {
            ++frame.skipped_singular;
            continue;
        }
        frame.splats.push_back({*p, *conic});
    }
    std::sort(frame.splats.begin(), frame.splats.end(), [](const Prepared& a, const Prepared& b) {
        return a.proj.depth < b.proj.depth || (a.proj.depth == b.proj.depth && a.proj.source_id < b.proj.source_id);
    });

    const int ts = settings.tile_size;
    for (std::size_t k = 0; k < frame.splats.size(); ++k) {
        const ProjectedSplat& p = frame.splats[k].proj;
        const double r = influence_radius(p, settings.min_alpha);
        if (r < 0.0) {
            continue;
        }
        int tx0 = 0, tx1 = frame.tiles_x - 1, ty0 = 0, ty1 = frame.tiles_y - 1;
        if (std::isfinite(r)) {
            const double x0 = std::ceil(p.mean2d.x() - r), x1 = std::floor(p.mean2d.x() + r);
            const double y0 = std::ceil(p.mean2d.y() - r), y1 = std::floor(p.mean2d.y() + r);
            if (x1 < 0.0 || y1 < 0.0 || x0 > w - 1 || y0 > h - 1 || x0 > x1 || y0 > y1) {
                continue;
            }
            tx0 = static_cast<int>(std::max(0.0, x0)) / ts;
            tx1 = static_cast<int>(std::min<double>(w - 1, x1)) / ts;
            ty0 = static_cast<int>(std::max(0.0, y0)) / ts;
            ty1 = static_cast<int>(std::min<double>(h - 1, y1)) / ts;
        }
        for (int ty = ty0; ty <= ty1; ++ty) {
            for (int tx = tx0; tx <= tx1; ++tx) {
                frame.tiles[static_cast<std::size_t>(ty) * frame.tiles_x + tx].push_back(static_cast<std::uint32_t>(k));
            }
        }
    }
    return frame;
}

struct Contribution {
    std::uint32_t splat = 0;
    double alpha = 0.0;        // effective alpha at the pixel
    double falloff = 0.0;      // exp(power)
    double transmittance = 0.0;  // before this contributor
};

// Front-to-back compositing of one pixel. Calls visit(contribution) for every blended splat
// and returns the final transmittance.
template <class Visit>
double composite_pixel(const Frame& frame, const std::vector<std::uint32_t>& list, double px, double py,
                       const RenderSettings& settings, Visit&& visit) {
    double t = 1.0;
    for (const std::uint32_t k : list) {
        const Prepared& s = frame.splats[k];
        const double a = effective_alpha(s.proj, s.conic, px, py);
        if (a < settings.min_alpha) {
            continue;
        }
        visit(Contribution{k, a, s.proj.alpha > 0.0 ? a / s.proj.alpha : 0.0, t});
        t *= (1.0 - a);
        if (t < settings.transmittance_floor) {
            break;
        }
    }
    return t;
}

}  // namespace

std::optional<Eigen::Vector3d> conic_of(const Mat2& cov) {
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(0, 1);
    if (!(det > 0.0) || !std::isfinite(det)) {
        return std::nullopt;
    }
    return Eigen::Vector3d(cov(1, 1) / det, -cov(0, 1) / det, cov(0, 0) / det);
}

std::optional<ProjectedSplat> project(const GaussianSplat& splat, const CameraView& camera,
                                      const RenderSettings& settings, std::size_t source_id) {
    const Intrinsics& in = camera.intrinsics;
    const Vec3 t = camera.pose_cw.apply(splat.position);
    if (!(t.z() > settings.near_plane)) {
        return std::nullopt;
    }
    ProjectedSplat p;
    p.mean2d = Vec2(in.fx * t.x() / t.z() + in.cx, in.fy * t.y() / t.z() + in.cy);
    const double half_w = 0.5 * in.width;
    const double half_h = 0.5 * in.height;
    if (std::abs(p.mean2d.x() - half_w) > settings.frustum_margin * half_w ||
        std::abs(p.mean2d.y() - half_h) > settings.frustum_margin * half_h) {
        return std::nullopt;
    }
    const Mat23 jw = projection_jacobian(in, t) * camera.pose_cw.rotation;
    p.cov2d = jw * splat_covariance(splat) * jw.transpose();
    p.cov2d(0, 0) += settings.dilation;
    p.cov2d(1, 1) += settings.dilation;
    p.depth = t.z();
    p.cam_point = t;
    p.view_dir = (splat.position - camera.pose_cw.center()).normalized();
    p.color = eval_sh_color(splat.sh, p.view_dir);
    p.alpha = activated_opacity(splat);
    p.source_id = source_id;
    return p;
}

RenderOutput render(const GaussianMap& map, const CameraView& camera, const RenderSettings& settings) {
    const Frame frame = prepare_frame(map, camera, settings);
    const int w = camera.intrinsics.width;
    const int h = camera.intrinsics.height;
    RenderOutput out;
    out.image = Image(w, h);
    out.transmittance.assign(static_cast<std::size_t>(w) * h, 1.0);
    out.contributor_counts.assign(static_cast<std::size_t>(w) * h, 0);
    out.skipped_singular = frame.skipped_singular;

    const int ts = settings.tile_size;
    for (int ty = 0; ty < frame.tiles_y; ++ty) {
        for (int tx = 0; tx < frame.tiles_x; ++tx) {
            const auto& list = frame.tiles[static_cast<std::size_t>(ty) * frame.tiles_x + tx];
            for (int y = ty * ts; y < std::min(h, (ty + 1) * ts); ++y) {
                for (int x = tx * ts; x < std::min(w, (tx + 1) * ts); ++x) {
                    Vec3 c = Vec3::Zero();
                    int count = 0;
                    const double t = composite_pixel(frame, list, x, y, settings, [&](const Contribution& k) {
                        c += frame.splats[k.splat].proj.color * (k.alpha * k.transmittance);
                        ++count;
                    });
                    c += t * settings.background;
                    const std::size_t pix = static_cast<std::size_t>(y) * w + x;
                    out.image.set_pixel(x, y, c);
                    out.transmittance[pix] = t;
                    out.contributor_counts[pix] = count;
                }
            }
        }
    }
    return out;
}

SplatGradients render_backward(const GaussianMap& map, const CameraView& camera, const Image& upstream,
                               const RenderSettings& settings) {
    const int w = camera.intrinsics.width;
    const int h = camera.intrinsics.height;
    if (upstream.width != w || upstream.height != h) {
        throw InputError("render_backward: upstream gradient is " + std::to_string(upstream.width) + "x" +
                         std::to_string(upstream.height) + ", camera is " + std::to_string(w) + "x" +
                         std::to_string(h));
    }
    const Frame frame = prepare_frame(map, camera, settings);
    const std::size_t n = frame.splats.size();

    // Image-space gradients per prepared splat.
    std::vector<Vec2> d_mean(n, Vec2::Zero());
    std::vector<Eigen::Vector3d> d_conic(n, Eigen::Vector3d::Zero());
    std::vector<Vec3> d_color(n, Vec3::Zero());
    std::vector<double> d_alpha(n, 0.0);
    std::vector<std::uint8_t> touched(n, 0);

    std::vector<Contribution> stack;
    const int ts = settings.tile_size;
    for (int ty = 0; ty < frame.tiles_y; ++ty) {
        for (int tx = 0; tx < frame.tiles_x; ++tx) {
            const auto& list = frame.tiles[static_cast<std::size_t>(ty) * frame.tiles_x + tx];
            if (list.empty()) {
                continue;
            }
            for (int y = ty * ts; y < std::min(h, (ty + 1) * ts); ++y) {
                for (int x = tx * ts; x < std::min(w, (tx + 1) * ts); ++x) {
                    const Vec3 g = upstream.pixel(x, y);
                    stack.clear();
                    composite_pixel(frame, list, x, y, settings, [&](const Contribution& k) { stack.push_back(k); });
                    // Back to front: behind = color seen through the current contributor.
                    double behind = g.dot(settings.background);
                    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                        const Prepared& s = frame.splats[it->splat];
                        const double gc = g.dot(s.proj.color);
                        touched[it->splat] = 1;
                        d_color[it->splat] += g * (it->alpha * it->transmittance);
                        const double d_eff = it->transmittance * (gc - behind);
                        behind = gc * it->alpha + (1.0 - it->alpha) * behind;

                        d_alpha[it->splat] += d_eff * it->falloff;
                        const double d_power = d_eff * it->alpha;
                        const double dx = x - s.proj.mean2d.x();
                        const double dy = y - s.proj.mean2d.y();
                        const Eigen::Vector3d& q = s.conic;
                        d_mean[it->splat] += d_power * Vec2(q[0] * dx + q[1] * dy, q[1] * dx + q[2] * dy);
                        d_conic[it->splat] += d_power * Eigen::Vector3d(-0.5 * dx * dx, -dx * dy, -0.5 * dy * dy);
                    }
                }
            }
        }
    }

    SplatGradients grads = SplatGradients::zeros(map);
    const Intrinsics& in = camera.intrinsics;
    const Mat3& rot_cw = camera.pose_cw.rotation;
    const Vec3 center = camera.pose_cw.center();
    for (std::size_t k = 0; k < n; ++k) {
        if (!touched[k]) {
            continue;
        }
        const Prepared& s = frame.splats[k];
        const std::size_t id = s.proj.source_id;
        const GaussianSplat& splat = map.splats[id];
        grads.visible[id] = 1;

        // conic -> 2D covariance entries (p, q, r).
        const Mat2& cov = s.proj.cov2d;
        const double p = cov(0, 0), q = cov(0, 1), r = cov(1, 1);
        const double det = p * r - q * q;
        const double det2 = det * det;
        const Eigen::Vector3d& dc = d_conic[k];
        const double dp = dc[0] * (-r * r / det2) + dc[1] * (q * r / det2) + dc[2] * (1.0 / det - p * r / det2);
        const double dq = dc[0] * (2.0 * q * r / det2) + dc[1] * (-1.0 / det - 2.0 * q * q / det2) +
                          dc[2] * (2.0 * p * q / det2);
        const double dr = dc[0] * (1.0 / det - r * p / det2) + dc[1] * (q * p / det2) + dc[2] * (-p * p / det2);
        Mat2 g2;
        g2 << dp, 0.5 * dq, 0.5 * dq, dr;

        // 2D covariance -> world covariance and projection Jacobian.
        const Vec3& t = s.proj.cam_point;
        const Mat23 jac = projection_jacobian(in, t);
        const Mat23 jw = jac * rot_cw;
        const Vec3 scales = activated_scales(splat);
        const Mat3 rot = rotation_matrix(splat.rotation);
        const Mat3 m = rot * scales.asDiagonal();
        const Mat3 sigma = m * m.transpose();
        const Mat3 d_sigma = jw.transpose() * g2 * jw;
        const Mat23 d_jw = 2.0 * g2 * jw * sigma;
        const Mat23 d_j = d_jw * rot_cw.transpose();

        const double iz = 1.0 / t.z();
        const double iz2 = iz * iz;
        const double iz3 = iz2 * iz;
        Vec3 d_t = Vec3::Zero();
        d_t.x() += d_j(0, 2) * (-in.fx * iz2);
        d_t.y() += d_j(1, 2) * (-in.fy * iz2);
        d_t.z() += d_j(0, 0) * (-in.fx * iz2) + d_j(0, 2) * (2.0 * in.fx * t.x() * iz3) +
                   d_j(1, 1) * (-in.fy * iz2) + d_j(1, 2) * (2.0 * in.fy * t.y() * iz3);
        const Vec2& dm = d_mean[k];
        d_t.x() += dm.x() * in.fx * iz;
        d_t.y() += dm.y() * in.fy * iz;
        d_t.z() += dm.x() * (-in.fx * t.x() * iz2) + dm.y() * (-in.fy * t.y() * iz2);

        Vec3 d_pos = rot_cw.transpose() * d_t;

        // Color through spherical harmonics and the view direction.
        const ShColorGrad shg = eval_sh_color_backward(splat.sh, s.proj.view_dir, d_color[k]);
        grads.sh[id] = shg.d_coeffs;
        const Vec3 offset = splat.position - center;
        const double dist = offset.norm();
        const Vec3& dir = s.proj.view_dir;
        d_pos += (shg.d_dir - dir * dir.dot(shg.d_dir)) / dist;
        grads.position[id] = d_pos;

        // World covariance -> scales and rotation.
        const Mat3 d_m = 2.0 * d_sigma * m;
        Mat3 d_rot;
        Vec3 d_log_scales;
        for (int col = 0; col < 3; ++col) {
            d_rot.col(col) = d_m.col(col) * scales[col];
            d_log_scales[col] = d_m.col(col).dot(rot.col(col)) * scales[col];
        }
        if (splat.is_thin()) {
            d_log_scales.z() = 0.0;
        }
        grads.log_scales[id] = d_log_scales;
        grads.rotation[id] = rotation_matrix_backward(splat.rotation, d_rot);

        const double alpha = s.proj.alpha;
        grads.opacity_logit[id] = d_alpha[k] * alpha * (1.0 - alpha);
    }
    return grads;
}

}  // namespace geogs
