#include "geogs/gradients.hpp"

#include <algorithm>
#include <cmath>

namespace geogs {

SplatGradients SplatGradients::zeros(const GaussianMap& map) {
    const std::size_t n = map.size();
    SplatGradients g;
    g.position.assign(n, Vec3::Zero());
    g.log_scales.assign(n, Vec3::Zero());
    g.rotation.assign(n, Quat::Zero());
    g.sh.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.sh[i] = ShCoeffs::Zero(map.splats[i].sh.rows(), 3);
    }
    g.opacity_logit.assign(n, 0.0);
    g.visible.assign(n, 0);
    return g;
}

void SplatGradients::add_scaled(const SplatGradients& other, double s) {
    for (std::size_t i = 0; i < position.size(); ++i) {
        position[i] += s * other.position[i];
        log_scales[i] += s * other.log_scales[i];
        rotation[i] += s * other.rotation[i];
        sh[i] += s * other.sh[i];
        opacity_logit[i] += s * other.opacity_logit[i];
        visible[i] = visible[i] | other.visible[i];
    }
}

void SplatGradients::scale(double factor) {
    for (std::size_t i = 0; i < position.size(); ++i) {
        position[i] *= factor;
        log_scales[i] *= factor;
        rotation[i] *= factor;
        sh[i] *= factor;
        opacity_logit[i] *= factor;
    }
}

bool SplatGradients::all_finite() const {
    for (std::size_t i = 0; i < position.size(); ++i) {
        if (!position[i].allFinite() || !log_scales[i].allFinite() || !rotation[i].allFinite() ||
            !sh[i].allFinite() || !std::isfinite(opacity_logit[i])) {
            return false;
        }
    }
    return true;
}

double SplatGradients::max_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < position.size(); ++i) {
        m = std::max({m, position[i].cwiseAbs().maxCoeff(), log_scales[i].cwiseAbs().maxCoeff(),
                      rotation[i].cwiseAbs().maxCoeff(), sh[i].cwiseAbs().maxCoeff(), std::abs(opacity_logit[i])});
    }
    return m;
}

}  // namespace geogs
