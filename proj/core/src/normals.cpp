#include "geogs/error.hpp"
#include "geogs/geometry.hpp"
#include "geogs/knn.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace geogs {

namespace {

Vec3 orient(Vec3 n, const Vec3& point, const std::optional<Vec3>& viewpoint) {
    double side = 0.0;
    if (viewpoint) {
        side = n.dot(*viewpoint - point);
    }
    if (side == 0.0) {
        // Fall back to a fixed hemisphere: +z, then +x, then +y on exact ties.
        side = n.z() != 0.0 ? n.z() : (n.x() != 0.0 ? n.x() : n.y());
    }
    return side < 0.0 ? Vec3(-n) : n;
}

}  // namespace

std::vector<Vec3> estimate_normals(std::span<const Vec3> points, std::size_t k, std::optional<Vec3> viewpoint) {
    if (k < 3) {
        throw InputError("estimate_normals: k must be at least 3");
    }
    if (points.size() < k + 1) {
        throw InputError("estimate_normals: need at least k+1 = " + std::to_string(k + 1) + " points, got " +
                         std::to_string(points.size()));
    }
    const KdTree tree(std::vector<Vec3>(points.begin(), points.end()));
    std::vector<Vec3> normals(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto nbrs = tree.knn(points[i], k, i);
        Vec3 mean = Vec3::Zero();
        for (const Neighbor& n : nbrs) {
            mean += points[n.id];
        }
        mean /= static_cast<double>(nbrs.size());
        Mat3 cov = Mat3::Zero();
        for (const Neighbor& n : nbrs) {
            const Vec3 d = points[n.id] - mean;
            cov += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
        normals[i] = orient(solver.eigenvectors().col(0).normalized(), points[i], viewpoint);
    }
    return normals;
}

std::vector<double> nearest_neighbor_distances(std::span<const Vec3> points) {
    std::vector<double> d(points.size(), std::numeric_limits<double>::infinity());
    if (points.size() < 2) {
        return d;
    }
    const KdTree tree(std::vector<Vec3>(points.begin(), points.end()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        d[i] = std::sqrt(tree.knn(points[i], 1, i).front().distance_sq);
    }
    return d;
}

double axis_angle_between(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(std::abs(a.dot(b)), 0.0, 1.0));
}

ClassifiedCloud classify_points(std::span<const Vec3> points, std::span<const Vec3> colors,
                                std::span<const Vec3> normals, const ClassifyOptions& options) {
    if (points.empty()) {
        throw InputError("classify_points: empty point cloud");
    }
    if (colors.size() != points.size() || normals.size() != points.size()) {
        throw InputError("classify_points: points, colors and normals differ in length");
    }
    if (!(options.dist_factor > 0.0)) {
        throw ConfigError("classify_points: dist_factor must be positive");
    }
    if (!(options.angle_thresh > 0.0 && options.angle_thresh < M_PI / 2)) {
        throw ConfigError("classify_points: angle_thresh must lie in (0, pi/2)");
    }

    const std::size_t n = points.size();
    const std::vector<double> nn = nearest_neighbor_distances(points);
    std::vector<bool> isolated(n, true);
    if (n >= 2) {
        std::vector<double> sorted = nn;
        std::sort(sorted.begin(), sorted.end());
        const double median =
            n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        for (std::size_t i = 0; i < n; ++i) {
            isolated[i] = nn[i] > options.dist_factor * median;
        }

        const KdTree tree(std::vector<Vec3>(points.begin(), points.end()));
        std::vector<bool> ind = isolated;
        for (std::size_t i = 0; i < n; ++i) {
            if (ind[i]) {
                continue;
            }
            for (const Neighbor& nb : tree.radius_search(points[i], median, i)) {
                if (!isolated[nb.id] && axis_angle_between(normals[i], normals[nb.id]) > options.angle_thresh) {
                    ind[i] = true;
                    break;
                }
            }
        }
        isolated = std::move(ind);
    }

    ClassifiedCloud out;
    for (std::size_t i = 0; i < n; ++i) {
        if (isolated[i]) {
            out.ind_points.push_back({points[i], colors[i], i});
        } else {
            out.co_points.push_back({points[i], colors[i], normals[i].normalized(), i});
        }
    }
    return out;
}

ClassifiedCloud all_individual(std::span<const Vec3> points, std::span<const Vec3> colors) {
    if (colors.size() != points.size()) {
        throw InputError("all_individual: points and colors differ in length");
    }
    ClassifiedCloud out;
    out.ind_points.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.ind_points.push_back({points[i], colors[i], i});
    }
    return out;
}

}  // namespace geogs
