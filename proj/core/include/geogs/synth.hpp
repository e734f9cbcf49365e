#pragma once

#include "geogs/geometry.hpp"
#include "geogs/surfaces.hpp"
#include "geogs/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace geogs {

enum class Texture { Checker, Perlin, Flat };
enum class TrajectoryPattern { Orbit, Lawnmower };

Texture parse_texture(const std::string& name);
TrajectoryPattern parse_pattern(const std::string& name);
std::string to_string(Texture texture);

/// One wall of the box room, seen from inside.
struct RoomFace {
    PlanarPatch patch;
    /// Rotation whose columns are (u_axis, v_axis, normal); exact for axis-aligned walls.
    Quat rotation;
};

struct SyntheticScene {
    Vec3 extent = Vec3::Ones();
    Texture texture = Texture::Checker;
    std::uint64_t seed = 0;
    std::vector<RoomFace> faces;
    std::vector<Surface> surfaces;
    GaussianMap gt_splats;
    /// Wall index of every gt splat.
    std::vector<int> gt_face;
    std::vector<CameraView> cameras;
    PointCloud point_cloud;
};

/// Texture color of wall `face` at in-plane coordinates (u, v) measured from the wall center.
Vec3 texture_color(Texture texture, int face, double u, double v, const Vec3& extent, std::uint64_t seed);

/// Edge length of a checker cell for a room of the given extent.
double checker_cell(const Vec3& extent);

/// Box room centered at the origin (+z up) whose six walls carry Thin gt splats facing inward.
SyntheticScene make_box_room(const Vec3& extent, Texture texture, std::size_t n_splats_per_face,
                             std::uint64_t seed);

struct TrajectoryOptions {
    int width = 64;
    int height = 64;
    /// Orbit radius, or half width of the lawnmower area, as a fraction of the smallest extent.
    double radius_fraction = 0.3;
};

/// Appends n_views cameras and renders their references from the gt splats.
void make_trajectory(SyntheticScene& scene, std::size_t n_views, TrajectoryPattern pattern, std::uint64_t seed,
                     const TrajectoryOptions& options = {});

/// Uniform surface samples with isotropic noise; colors come from the unperturbed location.
/// Fills scene.point_cloud (including surface_index) and returns it.
const PointCloud& sample_cloud(SyntheticScene& scene, std::size_t n_points, double noise_sigma,
                               std::uint64_t seed);

/// World-to-camera pose of a camera at `center` looking along `forward` with +z as up.
Pose look_along(const Vec3& center, const Vec3& forward);

}  // namespace geogs
