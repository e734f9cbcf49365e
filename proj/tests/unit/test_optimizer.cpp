#include "support.hpp"

#include "geogs/error.hpp"
#include "geogs/optimizer.hpp"
#include "geogs/transforms.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace geogs;
using namespace geogs::testing;

namespace {

bool same_map(const GaussianMap& a, const GaussianMap& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto &x = a.splats[i], &y = b.splats[i];
        if (x.position != y.position || x.log_scales != y.log_scales || x.rotation != y.rotation || x.sh != y.sh ||
            x.opacity_logit != y.opacity_logit)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("zero gradients leave the map unchanged") {
    Rng rng(71);
    GaussianMap m = random_scene(rng, 32);
    const GaussianMap before = m;
    AdamOptimizer opt;
    opt.reset(m);
    for (int k = 0; k < 5; ++k) opt.step(m, SplatGradients::zeros(m));
    CHECK(same_map(m, before));
    CHECK(opt.steps() == 5);
}

TEST_CASE("first Adam step moves by the learning rate against the gradient sign") {
    GaussianMap m;
    m.push_back(GaussianSplat{});
    AdamOptimizer opt;
    opt.reset(m);
    SplatGradients g = SplatGradients::zeros(m);
    g.position[0] = Vec3(3.0, -0.5, 0.0);
    g.opacity_logit[0] = 2.0;
    opt.step(m, g);
    const double lr = 0.0002;
    CHECK(m.splats[0].position.x() == doctest::Approx(-lr * 3.0 / (3.0 + 1e-15)).epsilon(1e-12));
    CHECK(m.splats[0].position.y() == doctest::Approx(lr).epsilon(1e-12));
    CHECK(m.splats[0].position.z() == 0.0);
    CHECK(m.splats[0].opacity_logit == doctest::Approx(-0.05).epsilon(1e-12));
}

TEST_CASE("quadratic objective converges") {
    GaussianMap m;
    m.push_back(GaussianSplat{});
    const Vec3 target(0.05, -0.08, 0.1);
    AdamOptimizer opt;
    opt.reset(m);
    for (int k = 0; k < 2000; ++k) {
        SplatGradients g = SplatGradients::zeros(m);
        g.position[0] = m.splats[0].position - target;
        opt.step(m, g);
    }
    CHECK((m.splats[0].position - target).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("non-finite gradients abort without touching the map") {
    Rng rng(72);
    GaussianMap m = random_scene(rng, 32);
    AdamOptimizer opt;
    opt.reset(m);
    SplatGradients g = SplatGradients::zeros(m);
    for (auto& p : g.position) p = Vec3::Ones();
    opt.step(m, g);
    const GaussianMap before = m;
    g.sh[3](0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(opt.step(m, g), NumericError);
    CHECK(same_map(m, before));
    CHECK(opt.steps() == 1);
    g.sh[3](0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(opt.step(m, g), NumericError);
}

TEST_CASE("thin thickness is frozen and quaternions stay unit") {
    Rng rng(73);
    SceneOptions o;
    o.thin_fraction = 1.0;
    GaussianMap m = random_scene(rng, 32, o);
    for (auto& s : m.splats) s.log_scales.z() = 0.7;  // stored value is ignored but kept
    AdamOptimizer opt;
    opt.reset(m);
    for (int k = 0; k < 10; ++k) {
        SplatGradients g = SplatGradients::zeros(m);
        for (std::size_t i = 0; i < m.size(); ++i) {
            g.log_scales[i] = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), 5.0);
            g.rotation[i] = Quat(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        }
        opt.step(m, g);
    }
    for (const auto& s : m.splats) {
        CHECK(s.log_scales.z() == 0.7);
        CHECK(activated_scales(s).z() == kThinThickness);
        CHECK(std::abs(s.rotation.norm() - 1.0) < 1e-15);
    }
}

TEST_CASE("remap copies moments for survivors and zeroes them for fresh splats") {
    GaussianMap m;
    m.push_back(GaussianSplat{});
    m.push_back(GaussianSplat{});
    AdamOptimizer opt;
    opt.reset(m);
    SplatGradients g = SplatGradients::zeros(m);
    g.position[0] = Vec3(1, 0, 0);
    g.position[1] = Vec3(1, 0, 0);
    opt.step(m, g);

    // New map: [copy of 0, fresh child of 1].
    GaussianMap n;
    n.push_back(m.splats[0]);
    n.push_back(m.splats[1]);
    Lineage lin;
    lin.parent = {0, 1};
    lin.fresh = {0, 1};
    opt.remap(lin);
    CHECK(opt.size() == 2);
    const GaussianMap before = n;
    opt.step(n, SplatGradients::zeros(n));
    CHECK(n.splats[0].position.x() < before.splats[0].position.x());  // momentum carried
    CHECK(n.splats[1].position == before.splats[1].position);          // fresh state

    Lineage bad;
    bad.parent = {5};
    bad.fresh = {0};
    CHECK_THROWS_AS(opt.remap(bad), InputError);
    GaussianMap three = n;
    three.push_back(GaussianSplat{});
    CHECK_THROWS_AS(opt.step(three, SplatGradients::zeros(three)), InputError);
}
