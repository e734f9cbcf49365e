#include "geogs/synth.hpp"

#include "geogs/densifier.hpp"
#include "geogs/error.hpp"
#include "geogs/initializer.hpp"
#include "geogs/rasterizer.hpp"
#include "geogs/transforms.hpp"

#include <array>
#include <cmath>
#include <random>

namespace geogs {

namespace {

constexpr double kGtOpacity = 0.95;
constexpr double kGtTangentScale = 0.6;
constexpr double kJitter = 0.25;

// Rotations of the cube whose quaternion components are exact in binary floating point.
std::vector<Quat> exact_rotations() {
    std::vector<Quat> out = {Quat(1, 0, 0, 0), Quat(0, 1, 0, 0), Quat(0, 0, 1, 0), Quat(0, 0, 0, 1)};
    for (int sx : {1, -1}) {
        for (int sy : {1, -1}) {
            for (int sz : {1, -1}) {
                out.emplace_back(0.5, 0.5 * sx, 0.5 * sy, 0.5 * sz);
            }
        }
    }
    return out;
}

std::vector<RoomFace> build_faces(const Vec3& extent) {
    const Vec3 half = extent / 2.0;
    const auto rotations = exact_rotations();
    std::vector<RoomFace> faces;
    for (int axis = 0; axis < 3; ++axis) {
        for (int side : {-1, 1}) {
            Vec3 normal = Vec3::Zero();
            normal[axis] = -side;
            RoomFace f;
            bool found = false;
            for (const Quat& q : rotations) {
                const Mat3 r = rotation_matrix(q);
                if (r.col(2) == normal) {
                    f.rotation = q;
                    f.patch.u_axis = r.col(0);
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw Error("synth: no exact frame for wall normal");
            }
            f.patch.center = Vec3::Zero();
            f.patch.center[axis] = side * half[axis];
            f.patch.normal = normal;
            f.patch.half_u = f.patch.u_axis.cwiseAbs().dot(half);
            f.patch.half_v = f.patch.v_axis().cwiseAbs().dot(half);
            faces.push_back(f);
        }
    }
    return faces;
}

std::uint64_t hash_cell(std::uint64_t seed, int face, std::int64_t i, std::int64_t j, int channel) {
    std::uint64_t h = mix_seed(seed, static_cast<std::uint64_t>(face) * 4 + channel);
    h = mix_seed(h, static_cast<std::uint64_t>(i) * 0x9E3779B1ULL);
    return mix_seed(h, static_cast<std::uint64_t>(j));
}

double unit_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

const std::array<Vec3, 6>& face_palette() {
    static const std::array<Vec3, 6> p = {Vec3(0.85, 0.35, 0.25), Vec3(0.25, 0.65, 0.35), Vec3(0.3, 0.4, 0.85),
                                          Vec3(0.85, 0.75, 0.3),  Vec3(0.6, 0.3, 0.7),   Vec3(0.35, 0.75, 0.8)};
    return p;
}

CameraView make_camera(const std::string& id, const Pose& pose, const TrajectoryOptions& o) {
    CameraView cam;
    cam.id = id;
    cam.intrinsics.width = o.width;
    cam.intrinsics.height = o.height;
    cam.intrinsics.fx = 0.8 * o.width;
    cam.intrinsics.fy = 0.8 * o.width;
    cam.intrinsics.cx = o.width / 2.0;
    cam.intrinsics.cy = o.height / 2.0;
    cam.pose_cw = pose;
    return cam;
}

}  // namespace

Texture parse_texture(const std::string& name) {
    if (name == "checker") return Texture::Checker;
    if (name == "perlin") return Texture::Perlin;
    if (name == "flat") return Texture::Flat;
    throw ConfigError("unknown texture '" + name + "'; expected checker, perlin or flat");
}

TrajectoryPattern parse_pattern(const std::string& name) {
    if (name == "orbit") return TrajectoryPattern::Orbit;
    if (name == "lawnmower") return TrajectoryPattern::Lawnmower;
    throw ConfigError("unknown trajectory pattern '" + name + "'; expected orbit or lawnmower");
}

std::string to_string(Texture texture) {
    switch (texture) {
        case Texture::Checker: return "checker";
        case Texture::Perlin: return "perlin";
        case Texture::Flat: return "flat";
    }
    return "unknown";
}

double checker_cell(const Vec3& extent) { return extent.minCoeff() / 4.0; }

Vec3 texture_color(Texture texture, int face, double u, double v, const Vec3& extent, std::uint64_t seed) {
    const Vec3 base = face_palette()[static_cast<std::size_t>(face) % 6];
    switch (texture) {
        case Texture::Flat:
            return base;
        case Texture::Checker: {
            const double cell = checker_cell(extent);
            const auto i = static_cast<std::int64_t>(std::floor(u / cell));
            const auto j = static_cast<std::int64_t>(std::floor(v / cell));
            return ((i + j) % 2 == 0) ? base : Vec3(Vec3::Constant(1.0) - base * 0.8);
        }
        case Texture::Perlin: {
            const double cell = extent.minCoeff() / 6.0;
            const double fu = u / cell;
            const double fv = v / cell;
            const auto i = static_cast<std::int64_t>(std::floor(fu));
            const auto j = static_cast<std::int64_t>(std::floor(fv));
            const double tu = smooth(fu - static_cast<double>(i));
            const double tv = smooth(fv - static_cast<double>(j));
            Vec3 out;
            for (int c = 0; c < 3; ++c) {
                const double v00 = unit_hash(hash_cell(seed, face, i, j, c));
                const double v10 = unit_hash(hash_cell(seed, face, i + 1, j, c));
                const double v01 = unit_hash(hash_cell(seed, face, i, j + 1, c));
                const double v11 = unit_hash(hash_cell(seed, face, i + 1, j + 1, c));
                const double a = v00 + (v10 - v00) * tu;
                const double b = v01 + (v11 - v01) * tu;
                out[c] = 0.15 + 0.7 * (a + (b - a) * tv);
            }
            return 0.5 * out + 0.5 * base;
        }
    }
    return base;
}

SyntheticScene make_box_room(const Vec3& extent, Texture texture, std::size_t n_per_face, std::uint64_t seed) {
    if (!extent.allFinite() || extent.minCoeff() <= 0.0) {
        throw InputError("make_box_room: extent must be positive and finite");
    }
    if (n_per_face < 16) {
        throw InputError("make_box_room: need at least 16 splats per face");
    }
    SyntheticScene scene;
    scene.extent = extent;
    scene.texture = texture;
    scene.seed = seed;
    scene.faces = build_faces(extent);
    for (const RoomFace& f : scene.faces) {
        scene.surfaces.emplace_back(f.patch);
    }
    scene.gt_splats.sh_degree = 0;
    std::mt19937_64 rng(mix_seed(seed, 1));
    std::uniform_real_distribution<double> jitter(-kJitter, kJitter);
    for (int fi = 0; fi < 6; ++fi) {
        const RoomFace& f = scene.faces[static_cast<std::size_t>(fi)];
        const double lu = 2.0 * f.patch.half_u;
        const double lv = 2.0 * f.patch.half_v;
        auto gu = static_cast<std::size_t>(std::max(1.0, std::round(std::sqrt(n_per_face * lu / lv))));
        gu = std::min(gu, n_per_face);
        const std::size_t gv = (n_per_face + gu - 1) / gu;
        const double cu = lu / static_cast<double>(gu);
        const double cv = lv / static_cast<double>(gv);
        // Cells beyond n_per_face are skipped at evenly spaced positions.
        const std::size_t cells = gu * gv;
        const std::size_t extra = cells - n_per_face;
        std::size_t skipped = 0;
        for (std::size_t c = 0; c < cells; ++c) {
            if (skipped < extra && (c + 1) * extra / cells > skipped) {
                ++skipped;
                continue;
            }
            const std::size_t iu = c % gu;
            const std::size_t iv = c / gu;
            const double u = std::clamp(-f.patch.half_u + (iu + 0.5 + jitter(rng)) * cu, -f.patch.half_u, f.patch.half_u);
            const double v = std::clamp(-f.patch.half_v + (iv + 0.5 + jitter(rng)) * cv, -f.patch.half_v, f.patch.half_v);
            GaussianSplat s;
            s.kind = SplatKind::Thin;
            s.position = f.patch.center + u * f.patch.u_axis + v * f.patch.v_axis();
            s.position[static_cast<int>(fi / 2)] = f.patch.center[fi / 2];
            s.rotation = f.rotation;
            s.log_scales = Vec3(std::log(kGtTangentScale * cu), std::log(kGtTangentScale * cv), std::log(kThinThickness));
            s.sh = sh_from_color(texture_color(texture, fi, u, v, extent, seed), 0);
            s.opacity_logit = logit(kGtOpacity);
            scene.gt_splats.push_back(std::move(s));
            scene.gt_face.push_back(fi);
        }
    }
    return scene;
}

Pose look_along(const Vec3& center, const Vec3& forward) {
    const Vec3 f = forward.normalized();
    Vec3 right = f.cross(Vec3::UnitZ());
    if (right.norm() < 1e-9) {
        right = f.cross(Vec3::UnitY());
    }
    right.normalize();
    const Vec3 down = f.cross(right);
    Mat3 r_wc;
    r_wc.col(0) = right;
    r_wc.col(1) = down;
    r_wc.col(2) = f;
    Pose p;
    p.rotation = r_wc.transpose();
    p.translation = -p.rotation * center;
    return p;
}

void make_trajectory(SyntheticScene& scene, std::size_t n_views, TrajectoryPattern pattern, std::uint64_t seed,
                     const TrajectoryOptions& options) {
    if (n_views < 5) {
        throw InputError("make_trajectory: need at least 5 views");
    }
    if (options.width < 1 || options.height < 1) {
        throw InputError("make_trajectory: image size must be positive");
    }
    const double r = options.radius_fraction * scene.extent.minCoeff();
    const Vec3 half = scene.extent / 2.0;
    std::mt19937_64 rng(mix_seed(seed, 2));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::pair<Vec3, Vec3>> poses;
    if (pattern == TrajectoryPattern::Orbit) {
        for (std::size_t k = 0; k < n_views; ++k) {
            const double yaw = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n_views);
            const Vec3 dir(std::cos(yaw), std::sin(yaw), 0.0);
            poses.emplace_back(r * dir, dir);
        }
    } else {
        const auto rows = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_views))));
        const std::size_t per_row = (n_views + rows - 1) / rows;
        for (std::size_t k = 0; k < n_views; ++k) {
            const std::size_t row = k / per_row;
            std::size_t col = k % per_row;
            const bool reverse = row % 2 == 1;
            if (reverse) {
                col = per_row - 1 - col;
            }
            const double fx = per_row > 1 ? static_cast<double>(col) / static_cast<double>(per_row - 1) : 0.5;
            const double fy = rows > 1 ? static_cast<double>(row) / static_cast<double>(rows - 1) : 0.5;
            Vec3 c((2.0 * fx - 1.0) * r, (2.0 * fy - 1.0) * r, 0.05 * r * unit(rng));
            const double yaw = (reverse ? M_PI : 0.0) + 0.35 * unit(rng);
            const double pitch = 0.2 * unit(rng);
            const Vec3 dir(std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch), std::sin(pitch));
            poses.emplace_back(c, dir);
        }
    }
    const RenderSettings rs;
    const std::size_t first = scene.cameras.size();
    for (std::size_t k = 0; k < poses.size(); ++k) {
        const Vec3& c = poses[k].first;
        if (((c.cwiseAbs() - half).array() >= -rs.near_plane).any()) {
            throw InputError("make_trajectory: camera " + std::to_string(k) + " lies outside the room");
        }
        CameraView cam = make_camera(std::to_string(first + k), look_along(c, poses[k].second), options);
        cam.reference = render(scene.gt_splats, cam, rs).image;
        scene.cameras.push_back(std::move(cam));
    }
}

const PointCloud& sample_cloud(SyntheticScene& scene, std::size_t n_points, double noise_sigma, std::uint64_t seed) {
    if (n_points < 100) {
        throw InputError("sample_cloud: need at least 100 points");
    }
    if (!(noise_sigma >= 0.0)) {
        throw InputError("sample_cloud: noise sigma must be non-negative");
    }
    std::vector<double> areas;
    for (const RoomFace& f : scene.faces) {
        areas.push_back(4.0 * f.patch.half_u * f.patch.half_v);
    }
    std::mt19937_64 rng(mix_seed(seed, 3));
    std::discrete_distribution<int> pick(areas.begin(), areas.end());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    PointCloud& cloud = scene.point_cloud;
    cloud = PointCloud{};
    cloud.positions.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const int fi = pick(rng);
        const RoomFace& f = scene.faces[static_cast<std::size_t>(fi)];
        const double u = unit(rng) * f.patch.half_u;
        const double v = unit(rng) * f.patch.half_v;
        Vec3 p = f.patch.center + u * f.patch.u_axis + v * f.patch.v_axis();
        p[fi / 2] = f.patch.center[fi / 2];
        const Vec3 n(noise(rng), noise(rng), noise(rng));
        cloud.positions.push_back(p + noise_sigma * n);
        cloud.colors.push_back(texture_color(scene.texture, fi, u, v, scene.extent, scene.seed));
        cloud.surface_index.push_back(fi);
    }
    return cloud;
}

}  // namespace geogs
