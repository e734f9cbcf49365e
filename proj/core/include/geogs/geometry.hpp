#pragma once

#include "geogs/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace geogs {

/// Raw input observations. surface_index is filled only by the synthetic generator.
struct PointCloud {
    std::vector<Vec3> positions;
    std::vector<Vec3> colors;
    std::vector<int> surface_index;

    std::size_t size() const noexcept { return positions.size(); }
};

struct SurfacePoint {
    Vec3 position;
    Vec3 color;
    Vec3 normal;
    std::size_t source = 0;  // index in the input cloud
};

struct IndividualPoint {
    Vec3 position;
    Vec3 color;
    std::size_t source = 0;
};

/// Input cloud partitioned into smooth-surface points (with normals) and individual points.
struct ClassifiedCloud {
    std::vector<SurfacePoint> co_points;
    std::vector<IndividualPoint> ind_points;

    std::size_t size() const noexcept { return co_points.size() + ind_points.size(); }
};

struct ClassifyOptions {
    /// Rule 1: nearest-neighbor distance above dist_factor x median marks a point as isolated.
    double dist_factor = 3.0;
    /// Rule 2: a neighbor (within the median nearest-neighbor distance) whose normal deviates
    /// by more than this angle marks the point as unreliable. The radius is a guess; the
    /// source method names no threshold.
    double angle_thresh = 0.349;
};

/// PCA normals from the k nearest neighbors of each point (the point itself excluded).
/// Normals face `viewpoint` when given, otherwise the +z half space.
std::vector<Vec3> estimate_normals(std::span<const Vec3> points, std::size_t k = 10,
                                   std::optional<Vec3> viewpoint = std::nullopt);

/// Splits the cloud into co (smooth surface) and ind (individual) points.
ClassifiedCloud classify_points(std::span<const Vec3> points, std::span<const Vec3> colors,
                                std::span<const Vec3> normals, const ClassifyOptions& options = {});

/// Every point as an individual point (the plain 3DGS initialization path).
ClassifiedCloud all_individual(std::span<const Vec3> points, std::span<const Vec3> colors);

/// Distance from each point to its nearest other point; +inf for a singleton.
std::vector<double> nearest_neighbor_distances(std::span<const Vec3> points);

/// Unsigned angle between two unit directions, in radians.
double axis_angle_between(const Vec3& a, const Vec3& b);

}  // namespace geogs
