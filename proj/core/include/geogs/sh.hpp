#pragma once

#include "geogs/types.hpp"

#include <array>

namespace geogs {

/// Real SH basis values (Condon-Shortley phase, 3DGS ordering) for a unit direction.
/// Writes sh_coeff_count(degree) values.
void sh_basis(int degree, const Vec3& dir, std::array<double, kMaxShCoeffs>& out);

/// Radiance for a view direction: sum_lm C_lm Y_lm(dir) + 0.5, clamped to >= 0 per channel.
Vec3 eval_sh_color(const ShCoeffs& sh, const Vec3& dir);

struct ShColorGrad {
    ShCoeffs d_coeffs;
    Vec3 d_dir = Vec3::Zero();
};

/// Gradient of eval_sh_color given dL/dcolor. Clamped channels receive no gradient.
ShColorGrad eval_sh_color_backward(const ShCoeffs& sh, const Vec3& dir, const Vec3& d_color);

/// Coefficient for the constant band: color = kShC0 * c00 + 0.5 at degree 0.
inline constexpr double kShC0 = 0.28209479177387814;

}  // namespace geogs
