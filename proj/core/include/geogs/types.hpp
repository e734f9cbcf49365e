#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace geogs {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Quaternion stored as (w, x, y, z). Need not be normalized; every consumer normalizes.
using Quat = Eigen::Vector4d;

inline constexpr int kMaxShDegree = 3;
inline constexpr int kMaxShCoeffs = (kMaxShDegree + 1) * (kMaxShDegree + 1);

/// Spherical-harmonics coefficients, one row per basis function, one column per color channel.
using ShCoeffs = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::ColMajor, kMaxShCoeffs, 3>;

/// Thickness of surface-aligned splats along their normal, in world units. Never optimized.
inline constexpr double kThinThickness = 0.001;

enum class SplatKind : std::uint8_t { Free = 0, Thin = 1 };

struct GaussianSplat {
    Vec3 position = Vec3::Zero();
    Vec3 log_scales = Vec3::Zero();
    Quat rotation = Quat(1.0, 0.0, 0.0, 0.0);
    ShCoeffs sh = ShCoeffs::Zero(1, 3);
    double opacity_logit = 0.0;
    SplatKind kind = SplatKind::Free;

    bool is_thin() const noexcept { return kind == SplatKind::Thin; }
};

double sigmoid(double x) noexcept;
double logit(double p);

/// exp(log_scales), except that the third axis of a Thin splat is exactly kThinThickness.
Vec3 activated_scales(const GaussianSplat& splat) noexcept;
double activated_opacity(const GaussianSplat& splat) noexcept;

/// Degree m such that (m+1)^2 == coefficient count; throws ConfigError otherwise.
int sh_degree_of(const ShCoeffs& sh);
int sh_coeff_count(int degree);

/// Linear RGB image, row-major, interleaved channels.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0);

    double& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    Vec3 pixel(int x, int y) const;
    void set_pixel(int x, int y, const Vec3& rgb);
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width) * height; }
    bool same_shape(const Image& other) const noexcept { return width == other.width && height == other.height; }
    bool empty() const noexcept { return data.empty(); }
};

struct Intrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;
};

/// Rigid world-to-camera transform: x_cam = rotation * x_world + translation.
struct Pose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& world) const { return rotation * world + translation; }
    /// Camera center in world coordinates.
    Vec3 center() const { return -rotation.transpose() * translation; }
};

struct CameraView {
    std::string id;
    Intrinsics intrinsics;
    Pose pose_cw;
    Image reference;

    /// Throws InputError when the intrinsics or pose are invalid.
    void validate() const;
};

struct GaussianMap {
    int sh_degree = 0;
    std::vector<GaussianSplat> splats;
    /// Per-splat neighbor identifiers; always empty for Free splats.
    std::vector<std::vector<std::size_t>> neighbor_lists;
    /// Set whenever the splat set changed since the last neighbor refresh.
    bool neighbors_stale = true;

    std::size_t size() const noexcept { return splats.size(); }
    bool empty() const noexcept { return splats.empty(); }
    std::size_t count(SplatKind kind) const noexcept;
    /// Appends a splat with an empty neighbor list.
    void push_back(GaussianSplat splat);
};

}  // namespace geogs
