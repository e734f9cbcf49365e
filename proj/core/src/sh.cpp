#include "geogs/sh.hpp"

#include "geogs/error.hpp"

#include <algorithm>

namespace geogs {

namespace {

constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005, -1.0925484305920792,
                          0.5462742152960396};
constexpr double kC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658, 0.3731763325901154,
                          -0.4570457994644658, 1.445305721320277, -0.5900435899266435};

// Forward-mode dual with a 3-component tangent, enough to differentiate the basis w.r.t. direction.
struct Dual {
    double v = 0.0;
    Vec3 d = Vec3::Zero();
};
inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + b.d * a.v}; }
inline Dual operator*(double s, const Dual& a) { return {s * a.v, s * a.d}; }
inline Dual constant(double c) { return {c, Vec3::Zero()}; }
inline double constant_of(double c, double) { return c; }
inline Dual constant_of(double c, const Dual&) { return constant(c); }

template <class T>
void basis(int degree, const T& x, const T& y, const T& z, T* out) {
    out[0] = constant_of(kShC0, x);
    if (degree < 1) {
        return;
    }
    out[1] = (-kC1) * y;
    out[2] = kC1 * z;
    out[3] = (-kC1) * x;
    if (degree < 2) {
        return;
    }
    const T xx = x * x, yy = y * y, zz = z * z;
    const T xy = x * y, yz = y * z, xz = x * z;
    out[4] = kC2[0] * xy;
    out[5] = kC2[1] * yz;
    out[6] = kC2[2] * (2.0 * zz - xx - yy);
    out[7] = kC2[3] * xz;
    out[8] = kC2[4] * (xx - yy);
    if (degree < 3) {
        return;
    }
    out[9] = kC3[0] * (y * (3.0 * xx - yy));
    out[10] = kC3[1] * (xy * z);
    out[11] = kC3[2] * (y * (4.0 * zz - xx - yy));
    out[12] = kC3[3] * (z * (2.0 * zz - 3.0 * xx - 3.0 * yy));
    out[13] = kC3[4] * (x * (4.0 * zz - xx - yy));
    out[14] = kC3[5] * (z * (xx - yy));
    out[15] = kC3[6] * (x * (xx - 3.0 * yy));
}

}  // namespace

void sh_basis(int degree, const Vec3& dir, std::array<double, kMaxShCoeffs>& out) {
    sh_coeff_count(degree);
    basis(degree, dir.x(), dir.y(), dir.z(), out.data());
}

Vec3 eval_sh_color(const ShCoeffs& sh, const Vec3& dir) {
    const int degree = sh_degree_of(sh);
    std::array<double, kMaxShCoeffs> y{};
    basis(degree, dir.x(), dir.y(), dir.z(), y.data());
    Vec3 rgb = Vec3::Constant(0.5);
    for (Eigen::Index k = 0; k < sh.rows(); ++k) {
        rgb += y[k] * sh.row(k).transpose();
    }
    return rgb.cwiseMax(0.0);
}

ShColorGrad eval_sh_color_backward(const ShCoeffs& sh, const Vec3& dir, const Vec3& d_color) {
    const int degree = sh_degree_of(sh);
    std::array<Dual, kMaxShCoeffs> y{};
    basis(degree, Dual{dir.x(), Vec3::UnitX()}, Dual{dir.y(), Vec3::UnitY()}, Dual{dir.z(), Vec3::UnitZ()}, y.data());

    Vec3 raw = Vec3::Constant(0.5);
    for (Eigen::Index k = 0; k < sh.rows(); ++k) {
        raw += y[k].v * sh.row(k).transpose();
    }
    Vec3 g = d_color;
    for (int c = 0; c < 3; ++c) {
        if (raw[c] < 0.0) {
            g[c] = 0.0;
        }
    }

    ShColorGrad out;
    out.d_coeffs = ShCoeffs::Zero(sh.rows(), 3);
    for (Eigen::Index k = 0; k < sh.rows(); ++k) {
        out.d_coeffs.row(k) = y[k].v * g.transpose();
        out.d_dir += y[k].d * sh.row(k).dot(g.transpose());
    }
    return out;
}

}  // namespace geogs
