#pragma once

#include "geogs/rasterizer.hpp"
#include "geogs/types.hpp"

#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace geogs::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
Vec3 random_unit(Rng& rng);
Quat random_quat(Rng& rng);
Mat3 random_rotation(Rng& rng);

/// Pinhole camera with fx = fy = 0.8 w and the principal point at the image center.
CameraView make_camera(int w, int h, const Pose& pose = {});

struct SceneOptions {
    std::size_t splats = 20;
    int sh_degree = 1;
    double thin_fraction = 0.5;
    double min_scale = 0.08;
    double max_scale = 0.35;
    double min_depth = 2.0;
    double max_depth = 5.0;
    double min_opacity = 0.3;
    double max_opacity = 0.9;
};

GaussianSplat random_splat(Rng& rng, SplatKind kind, int sh_degree, const SceneOptions& o = {});

/// Splats spread over the view of the identity camera (looking down +z).
GaussianMap random_scene(Rng& rng, int w, const SceneOptions& o = {});

Image random_image(Rng& rng, int w, int h, double lo = 0.0, double hi = 1.0);

/// Per-pixel sort-and-blend without tiles: every projected splat is tested at every pixel.
RenderOutput oracle_render(const GaussianMap& map, const CameraView& camera, const RenderSettings& settings = {});

/// sum(upstream . render(map).image)
double image_objective(const GaussianMap& map, const CameraView& camera, const Image& upstream,
                       const RenderSettings& settings = {});

/// One scalar parameter of a splat, addressed for finite differences.
struct ParamRef {
    std::size_t splat = 0;
    enum Group { Position, LogScale, Rotation, Sh, Opacity } group = Position;
    int index = 0;  // component; for Sh: row * 3 + channel
    std::string name() const;
};

double& param(GaussianMap& map, const ParamRef& ref);
double analytic(const SplatGradients& grads, const ParamRef& ref);
std::vector<ParamRef> all_params(const GaussianMap& map);

/// Central difference of f around the parameter.
double central_difference(GaussianMap map, const ParamRef& ref, double h, const std::function<double(const GaussianMap&)>& f);

/// Checkered wall y = 2 (normal -y, facing the origin) rendered by cameras near the origin,
/// with a sparse point sample initialized through the geometry-aware path.
struct PlaneScene {
    GaussianMap gt;
    std::vector<CameraView> cameras;
    GaussianMap init;
    Vec3 normal = -Vec3::UnitY();
};
PlaneScene make_plane_scene(std::uint64_t seed, std::size_t n_cameras = 20, int image_size = 32,
                            std::size_t n_points = 150, double camera_distance = 2.0);

/// |a - b| / max(|a|, |b|), or 0 when both are 0.
double relative_error(double a, double b);

struct GradientCheck {
    std::size_t checked = 0;
    std::size_t excluded = 0;  // entries whose perturbation changed a pixel's contributor set
    double worst = 0.0;
    std::string worst_name;
};

/// Compares render_backward against central differences of image_objective on every parameter
/// whose analytic or numeric gradient exceeds `floor`. With exclude_discontinuities, entries whose
/// +-h perturbation changes any pixel's contributor count are skipped and counted.
GradientCheck check_render_gradients(const GaussianMap& map, const CameraView& camera, const Image& upstream,
                                     const RenderSettings& settings, double h = 1e-5, double floor = 1e-8,
                                     bool exclude_discontinuities = false);

/// Directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace geogs::testing
