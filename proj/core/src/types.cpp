#include "geogs/types.hpp"

#include "geogs/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace geogs {

double sigmoid(double x) noexcept {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InputError("logit: probability must lie in (0,1), got " + std::to_string(p));
    }
    return std::log(p / (1.0 - p));
}

Vec3 activated_scales(const GaussianSplat& splat) noexcept {
    Vec3 s = splat.log_scales.array().exp();
    if (splat.is_thin()) {
        s.z() = kThinThickness;
    }
    return s;
}

double activated_opacity(const GaussianSplat& splat) noexcept { return sigmoid(splat.opacity_logit); }

int sh_coeff_count(int degree) {
    if (degree < 0 || degree > kMaxShDegree) {
        throw ConfigError("spherical-harmonics degree must be in [0," + std::to_string(kMaxShDegree) + "], got " +
                          std::to_string(degree));
    }
    return (degree + 1) * (degree + 1);
}

int sh_degree_of(const ShCoeffs& sh) {
    for (int m = 0; m <= kMaxShDegree; ++m) {
        if (sh.rows() == (m + 1) * (m + 1)) {
            return m;
        }
    }
    throw ConfigError("invalid spherical-harmonics coefficient count " + std::to_string(sh.rows()));
}

Image::Image(int w, int h, double fill) : width(w), height(h) {
    if (w < 0 || h < 0) {
        throw InputError("image dimensions must be non-negative");
    }
    data.assign(static_cast<std::size_t>(w) * h * 3, fill);
}

Vec3 Image::pixel(int x, int y) const { return {at(x, y, 0), at(x, y, 1), at(x, y, 2)}; }

void Image::set_pixel(int x, int y, const Vec3& rgb) {
    for (int c = 0; c < 3; ++c) {
        at(x, y, c) = rgb[c];
    }
}

void CameraView::validate() const {
    const auto& in = intrinsics;
    if (!(in.fx > 0.0 && in.fy > 0.0)) {
        throw InputError("camera " + id + ": focal lengths must be positive");
    }
    if (in.width <= 0 || in.height <= 0) {
        throw InputError("camera " + id + ": image size must be positive");
    }
    if (!(in.cx >= 0.0 && in.cx < in.width && in.cy >= 0.0 && in.cy < in.height)) {
        throw InputError("camera " + id + ": principal point outside the image");
    }
    const Mat3& r = pose_cw.rotation;
    if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 || std::abs(r.determinant() - 1.0) > 1e-9) {
        throw InputError("camera " + id + ": pose rotation is not a proper rotation");
    }
    if (!reference.empty() && (reference.width != in.width || reference.height != in.height)) {
        throw InputError("camera " + id + ": reference image size does not match intrinsics");
    }
}

std::size_t GaussianMap::count(SplatKind kind) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(splats.begin(), splats.end(), [kind](const GaussianSplat& s) { return s.kind == kind; }));
}

void GaussianMap::push_back(GaussianSplat splat) {
    splats.push_back(std::move(splat));
    neighbor_lists.emplace_back();
    neighbors_stale = true;
}

}  // namespace geogs
