#include "geogs/optimizer.hpp"

#include "geogs/error.hpp"
#include "geogs/transforms.hpp"

#include <cmath>

namespace geogs {

namespace {

struct AdamStep {
    double beta1, beta2, eps, c1, c2;

    template <class P, class G, class M>
    void apply(P& param, const G& grad, M& m, M& v, double lr) const {
        for (Eigen::Index k = 0; k < grad.size(); ++k) {
            const double g = grad.data()[k];
            double& mk = m.data()[k];
            double& vk = v.data()[k];
            mk = beta1 * mk + (1.0 - beta1) * g;
            vk = beta2 * vk + (1.0 - beta2) * g * g;
            const double m_hat = mk / c1;
            const double v_hat = vk / c2;
            param.data()[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }

    void apply_scalar(double& param, double g, double& m, double& v, double lr) const {
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        param -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
    }
};

}  // namespace

AdamOptimizer::AdamOptimizer(LearningRates rates, AdamParams params) : rates_(rates), params_(params) {}

AdamOptimizer::Moments AdamOptimizer::zero_moments(const GaussianSplat& splat) const {
    Moments m;
    m.m_sh = ShCoeffs::Zero(splat.sh.rows(), 3);
    m.v_sh = ShCoeffs::Zero(splat.sh.rows(), 3);
    return m;
}

void AdamOptimizer::reset(const GaussianMap& map) {
    state_.clear();
    state_.reserve(map.size());
    for (const GaussianSplat& s : map.splats) {
        state_.push_back(zero_moments(s));
    }
    t_ = 0;
}

void AdamOptimizer::step(GaussianMap& map, const SplatGradients& grads) {
    if (grads.size() != map.size()) {
        throw InputError("optimizer: gradient slots do not match the map");
    }
    if (state_.size() != map.size()) {
        throw InputError("optimizer: state does not match the map; call reset or remap");
    }
    if (!grads.all_finite()) {
        throw NumericError("optimizer: non-finite gradient at step " + std::to_string(t_ + 1) +
                           "; update skipped");
    }
    ++t_;
    const AdamStep adam{params_.beta1, params_.beta2, params_.epsilon,
                        1.0 - std::pow(params_.beta1, static_cast<double>(t_)),
                        1.0 - std::pow(params_.beta2, static_cast<double>(t_))};
    for (std::size_t i = 0; i < map.size(); ++i) {
        GaussianSplat& s = map.splats[i];
        Moments& st = state_[i];
        adam.apply(s.position, grads.position[i], st.m_pos, st.v_pos, rates_.position);
        Vec3 g_scale = grads.log_scales[i];
        const double thickness = s.log_scales.z();
        if (s.is_thin()) {
            g_scale.z() = 0.0;
        }
        adam.apply(s.log_scales, g_scale, st.m_scale, st.v_scale, rates_.log_scales);
        if (s.is_thin()) {
            s.log_scales.z() = thickness;
        }
        const Quat before = s.rotation;
        adam.apply(s.rotation, grads.rotation[i], st.m_rot, st.v_rot, rates_.rotation);
        if (s.rotation != before) {
            s.rotation = normalized(s.rotation);
        }
        adam.apply(s.sh, grads.sh[i], st.m_sh, st.v_sh, rates_.sh);
        adam.apply_scalar(s.opacity_logit, grads.opacity_logit[i], st.m_op, st.v_op, rates_.opacity);
    }
}

void AdamOptimizer::remap(const Lineage& lineage) {
    std::vector<Moments> next;
    next.reserve(lineage.size());
    for (std::size_t i = 0; i < lineage.size(); ++i) {
        const std::size_t parent = lineage.parent[i];
        if (parent >= state_.size()) {
            throw InputError("optimizer: lineage refers to an unknown splat");
        }
        if (lineage.fresh[i]) {
            Moments m;
            m.m_sh = ShCoeffs::Zero(state_[parent].m_sh.rows(), 3);
            m.v_sh = m.m_sh;
            next.push_back(std::move(m));
        } else {
            next.push_back(state_[parent]);
        }
    }
    state_ = std::move(next);
}

}  // namespace geogs
