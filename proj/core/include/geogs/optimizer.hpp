#pragma once

#include "geogs/densifier.hpp"
#include "geogs/gradients.hpp"
#include "geogs/types.hpp"

#include <vector>

namespace geogs {

struct LearningRates {
    double position = 0.0002;
    double log_scales = 0.005;
    double rotation = 0.001;
    double sh = 0.0025;
    double opacity = 0.05;
};

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-15;
};

/// Adam over every splat parameter group, with per-splat moment state that follows
/// structural edits through a Lineage.
class AdamOptimizer {
public:
    explicit AdamOptimizer(LearningRates rates = {}, AdamParams params = {});

    /// Zero moments for every splat of `map` and a fresh step counter.
    void reset(const GaussianMap& map);

    /// One update. Thin thickness gradients are ignored and quaternions renormalized afterwards.
    /// Throws NumericError on a non-finite gradient, leaving map and state untouched.
    void step(GaussianMap& map, const SplatGradients& grads);

    /// Carries state across densify or prune: copied from the parent, or zeroed when fresh.
    void remap(const Lineage& lineage);

    long steps() const noexcept { return t_; }
    std::size_t size() const noexcept { return state_.size(); }
    const LearningRates& rates() const noexcept { return rates_; }

private:
    struct Moments {
        Vec3 m_pos = Vec3::Zero(), v_pos = Vec3::Zero();
        Vec3 m_scale = Vec3::Zero(), v_scale = Vec3::Zero();
        Quat m_rot = Quat::Zero(), v_rot = Quat::Zero();
        ShCoeffs m_sh, v_sh;
        double m_op = 0.0, v_op = 0.0;
    };

    Moments zero_moments(const GaussianSplat& splat) const;

    LearningRates rates_;
    AdamParams params_;
    std::vector<Moments> state_;
    long t_ = 0;
};

}  // namespace geogs
