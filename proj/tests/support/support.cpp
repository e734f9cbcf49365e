#include "support.hpp"

#include "geogs/geometry.hpp"
#include "geogs/initializer.hpp"
#include "geogs/synth.hpp"
#include "geogs/sh.hpp"
#include "geogs/transforms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unistd.h>

namespace geogs::testing {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec3 random_unit(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v;
    do {
        v = Vec3(n(rng), n(rng), n(rng));
    } while (v.norm() < 1e-6);
    return v.normalized();
}

Quat random_quat(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Quat q;
    do {
        q = Quat(n(rng), n(rng), n(rng), n(rng));
    } while (q.norm() < 1e-3);
    return q.normalized();
}

Mat3 random_rotation(Rng& rng) { return rotation_matrix(random_quat(rng)); }

CameraView make_camera(int w, int h, const Pose& pose) {
    CameraView cam;
    cam.id = "cam";
    cam.intrinsics.width = w;
    cam.intrinsics.height = h;
    cam.intrinsics.fx = 0.8 * w;
    cam.intrinsics.fy = 0.8 * w;
    cam.intrinsics.cx = w / 2.0;
    cam.intrinsics.cy = h / 2.0;
    cam.pose_cw = pose;
    return cam;
}

GaussianSplat random_splat(Rng& rng, SplatKind kind, int sh_degree, const SceneOptions& o) {
    GaussianSplat s;
    s.kind = kind;
    const double z = uniform(rng, o.min_depth, o.max_depth);
    const double half = 0.5 / 0.8 * z;
    s.position = Vec3(uniform(rng, -half, half), uniform(rng, -half, half), z);
    for (int k = 0; k < 3; ++k) {
        s.log_scales[k] = std::log(uniform(rng, o.min_scale, o.max_scale));
    }
    if (s.is_thin()) {
        s.log_scales.z() = std::log(kThinThickness);
    }
    s.rotation = random_quat(rng) * uniform(rng, 0.7, 1.4);
    const int rows = sh_coeff_count(sh_degree);
    s.sh = ShCoeffs::Zero(rows, 3);
    for (int c = 0; c < 3; ++c) {
        s.sh(0, c) = (uniform(rng, 0.25, 0.75) - 0.5) / kShC0;
        for (int r = 1; r < rows; ++r) {
            s.sh(r, c) = uniform(rng, -0.08, 0.08);
        }
    }
    s.opacity_logit = logit(uniform(rng, o.min_opacity, o.max_opacity));
    return s;
}

GaussianMap random_scene(Rng& rng, int /*w*/, const SceneOptions& o) {
    GaussianMap map;
    map.sh_degree = o.sh_degree;
    for (std::size_t i = 0; i < o.splats; ++i) {
        const bool thin = uniform(rng, 0.0, 1.0) < o.thin_fraction;
        map.push_back(random_splat(rng, thin ? SplatKind::Thin : SplatKind::Free, o.sh_degree, o));
    }
    return map;
}

Image random_image(Rng& rng, int w, int h, double lo, double hi) {
    Image img(w, h);
    for (double& v : img.data) {
        v = uniform(rng, lo, hi);
    }
    return img;
}

RenderOutput oracle_render(const GaussianMap& map, const CameraView& camera, const RenderSettings& settings) {
    struct Item {
        ProjectedSplat p;
        Eigen::Vector3d conic;
    };
    std::vector<Item> items;
    int singular = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const auto p = project(map.splats[i], camera, settings, i);
        if (!p) continue;
        const auto c = conic_of(p->cov2d);
        if (!c) {
            ++singular;
            continue;
        }
        items.push_back({*p, *c});
    }
    const int w = camera.intrinsics.width;
    const int h = camera.intrinsics.height;
    RenderOutput out;
    out.image = Image(w, h);
    out.transmittance.assign(static_cast<std::size_t>(w) * h, 1.0);
    out.contributor_counts.assign(static_cast<std::size_t>(w) * h, 0);
    out.skipped_singular = singular;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::vector<const Item*> order;
            for (const Item& it : items) order.push_back(&it);
            std::stable_sort(order.begin(), order.end(), [](const Item* a, const Item* b) {
                if (a->p.depth != b->p.depth) return a->p.depth < b->p.depth;
                return a->p.source_id < b->p.source_id;
            });
            Vec3 c = Vec3::Zero();
            double t = 1.0;
            int count = 0;
            for (const Item* it : order) {
                const double a = effective_alpha(it->p, it->conic, x, y);
                if (a < settings.min_alpha) continue;
                c += it->p.color * (a * t);
                ++count;
                t *= (1.0 - a);
                if (t < settings.transmittance_floor) break;
            }
            c += t * settings.background;
            out.image.set_pixel(x, y, c);
            out.transmittance[static_cast<std::size_t>(y) * w + x] = t;
            out.contributor_counts[static_cast<std::size_t>(y) * w + x] = count;
        }
    }
    return out;
}

double image_objective(const GaussianMap& map, const CameraView& camera, const Image& upstream,
                       const RenderSettings& settings) {
    const Image img = render(map, camera, settings).image;
    double s = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        s += upstream.data[i] * img.data[i];
    }
    return s;
}

std::string ParamRef::name() const {
    static const char* names[] = {"position", "log_scale", "rotation", "sh", "opacity"};
    return std::string(names[group]) + "[" + std::to_string(index) + "] of splat " + std::to_string(splat);
}

double& param(GaussianMap& map, const ParamRef& r) {
    GaussianSplat& s = map.splats[r.splat];
    switch (r.group) {
        case ParamRef::Position: return s.position[r.index];
        case ParamRef::LogScale: return s.log_scales[r.index];
        case ParamRef::Rotation: return s.rotation[r.index];
        case ParamRef::Sh: return s.sh(r.index / 3, r.index % 3);
        case ParamRef::Opacity: return s.opacity_logit;
    }
    return s.opacity_logit;
}

double analytic(const SplatGradients& g, const ParamRef& r) {
    switch (r.group) {
        case ParamRef::Position: return g.position[r.splat][r.index];
        case ParamRef::LogScale: return g.log_scales[r.splat][r.index];
        case ParamRef::Rotation: return g.rotation[r.splat][r.index];
        case ParamRef::Sh: return g.sh[r.splat](r.index / 3, r.index % 3);
        case ParamRef::Opacity: return g.opacity_logit[r.splat];
    }
    return 0.0;
}

std::vector<ParamRef> all_params(const GaussianMap& map) {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < map.size(); ++i) {
        for (int k = 0; k < 3; ++k) out.push_back({i, ParamRef::Position, k});
        for (int k = 0; k < 3; ++k) out.push_back({i, ParamRef::LogScale, k});
        for (int k = 0; k < 4; ++k) out.push_back({i, ParamRef::Rotation, k});
        for (int k = 0; k < map.splats[i].sh.rows() * 3; ++k) out.push_back({i, ParamRef::Sh, k});
        out.push_back({i, ParamRef::Opacity, 0});
    }
    return out;
}

double central_difference(GaussianMap map, const ParamRef& ref, double h,
                          const std::function<double(const GaussianMap&)>& f) {
    double& p = param(map, ref);
    const double x = p;
    p = x + h;
    const double fp = f(map);
    p = x - h;
    const double fm = f(map);
    p = x;
    return (fp - fm) / (2.0 * h);
}

PlaneScene make_plane_scene(std::uint64_t seed, std::size_t n_cameras, int image_size, std::size_t n_points,
                            double camera_distance) {
    PlaneScene out;
    Mat3 frame;
    frame << Vec3::UnitX(), Vec3::UnitZ(), out.normal;
    const Quat wall_q = quaternion_from_matrix(frame);
    auto checker = [](double x, double z) {
        const bool odd = (static_cast<int>(std::floor(x / 0.25)) + static_cast<int>(std::floor(z / 0.25))) % 2 != 0;
        return odd ? Vec3(0.9, 0.3, 0.2) : Vec3(0.2, 0.5, 0.8);
    };
    const int side = 60;
    const double cell = 3.0 / side;
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
            const double x = -1.5 + (i + 0.5) * cell, z = -1.5 + (j + 0.5) * cell;
            GaussianSplat s;
            s.kind = SplatKind::Thin;
            s.position = Vec3(x, 2, z);
            s.rotation = wall_q;
            s.log_scales = Vec3(std::log(0.6 * cell), std::log(0.6 * cell), std::log(kThinThickness));
            s.sh = sh_from_color(checker(x, z), 0);
            s.opacity_logit = logit(0.95);
            out.gt.push_back(s);
        }
    }
    Rng rng(seed);
    for (std::size_t k = 0; k < n_cameras; ++k) {
        const Vec3 c(uniform(rng, -0.5, 0.5), 2.0 - camera_distance, uniform(rng, -0.5, 0.5));
        CameraView cam = make_camera(image_size, image_size,
                                     look_along(c, Vec3(uniform(rng, -0.2, 0.2), 1, uniform(rng, -0.2, 0.2))));
        cam.id = std::to_string(k);
        cam.reference = render(out.gt, cam).image;
        out.cameras.push_back(std::move(cam));
    }
    std::vector<Vec3> pts, colors;
    for (std::size_t k = 0; k < n_points; ++k) {
        const double x = uniform(rng, -1.5, 1.5), z = uniform(rng, -1.5, 1.5);
        pts.emplace_back(x, 2.0, z);
        colors.push_back(checker(x, z));
    }
    const auto normals = estimate_normals(pts, 10, Vec3(0, 2.0 - camera_distance, 0));
    out.init = init_map(classify_points(pts, colors, normals), {0.1, 0, 0.01});
    return out;
}

double relative_error(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

GradientCheck check_render_gradients(const GaussianMap& map, const CameraView& camera, const Image& upstream,
                                     const RenderSettings& settings, double h, double floor,
                                     bool exclude_discontinuities) {
    const SplatGradients g = render_backward(map, camera, upstream, settings);
    const auto base_counts = render(map, camera, settings).contributor_counts;
    const auto f = [&](const GaussianMap& m) { return image_objective(m, camera, upstream, settings); };
    GradientCheck out;
    for (const ParamRef& ref : all_params(map)) {
        if (exclude_discontinuities) {
            bool changed = false;
            for (double sign : {1.0, -1.0}) {
                GaussianMap m = map;
                param(m, ref) += sign * h;
                changed = changed || render(m, camera, settings).contributor_counts != base_counts;
            }
            if (changed) {
                ++out.excluded;
                continue;
            }
        }
        const double a = analytic(g, ref);
        const double n = central_difference(map, ref, h, f);
        if (std::max(std::abs(a), std::abs(n)) <= floor) continue;
        ++out.checked;
        const double e = relative_error(a, n);
        if (e > out.worst) {
            out.worst = e;
            out.worst_name = ref.name();
        }
    }
    return out;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("geogs_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace geogs::testing
