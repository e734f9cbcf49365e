#include "geogs/initializer.hpp"

#include "geogs/error.hpp"
#include "geogs/sh.hpp"
#include "geogs/transforms.hpp"

#include <cmath>

namespace geogs {

std::pair<Vec3, Vec3> tangent_basis(const Vec3& normal) {
    const double len = normal.norm();
    if (!(len > 1e-12) || !std::isfinite(len)) {
        throw InputError("tangent_basis: normal must be a non-zero finite vector");
    }
    const Vec3 n = normal / len;
    int axis = 0;
    n.cwiseAbs().minCoeff(&axis);
    const Vec3 b2 = n.cross(Vec3::Unit(axis)).normalized();
    const Vec3 b1 = b2.cross(n);
    return {b1, b2};
}

ShCoeffs sh_from_color(const Vec3& rgb, int degree) {
    ShCoeffs sh = ShCoeffs::Zero(sh_coeff_count(degree), 3);
    sh.row(0) = ((rgb.array() - 0.5) / kShC0).matrix().transpose();
    return sh;
}

GaussianMap init_map(const ClassifiedCloud& cloud, const InitOptions& options, std::vector<std::string>* warnings) {
    if (cloud.size() == 0) {
        throw InputError("init_map: empty classified cloud");
    }
    sh_coeff_count(options.sh_degree);
    const double opacity_logit = logit(options.initial_opacity);

    std::vector<Vec3> all;
    all.reserve(cloud.size());
    for (const auto& p : cloud.co_points) {
        all.push_back(p.position);
    }
    for (const auto& p : cloud.ind_points) {
        all.push_back(p.position);
    }
    const std::vector<double> nn = nearest_neighbor_distances(all);
    auto scale_for = [&](std::size_t i) {
        double d = nn[i];
        if (!std::isfinite(d)) {
            if (warnings) {
                warnings->push_back("point " + std::to_string(i) + " has no neighbor; using fallback scale " +
                                    std::to_string(options.fallback_scale));
            }
            d = options.fallback_scale;
        }
        // Coincident points would give log(0).
        return std::max(d, 1e-7);
    };

    GaussianMap map;
    map.sh_degree = options.sh_degree;
    map.splats.reserve(cloud.size());
    std::size_t i = 0;
    for (const auto& p : cloud.co_points) {
        const auto [b1, b2] = tangent_basis(p.normal);
        Mat3 frame;
        frame.col(0) = b1;
        frame.col(1) = b2;
        frame.col(2) = p.normal.normalized();
        GaussianSplat s;
        s.kind = SplatKind::Thin;
        s.position = p.position;
        const double d = std::log(scale_for(i++));
        s.log_scales = Vec3(d, d, std::log(kThinThickness));
        s.rotation = quaternion_from_matrix(frame);
        s.sh = sh_from_color(p.color, options.sh_degree);
        s.opacity_logit = opacity_logit;
        map.push_back(std::move(s));
    }
    for (const auto& p : cloud.ind_points) {
        GaussianSplat s;
        s.kind = SplatKind::Free;
        s.position = p.position;
        s.log_scales = Vec3::Constant(std::log(scale_for(i++)));
        s.rotation = Quat(1.0, 0.0, 0.0, 0.0);
        s.sh = sh_from_color(p.color, options.sh_degree);
        s.opacity_logit = opacity_logit;
        map.push_back(std::move(s));
    }
    return map;
}

}  // namespace geogs
