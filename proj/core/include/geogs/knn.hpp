#pragma once

#include "geogs/types.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace geogs {

struct Neighbor {
    std::size_t id = 0;
    double distance_sq = 0.0;
};

/// Exact kd-tree over a fixed point set. Identifiers are indices into the input vector.
/// Ties in distance are broken by lower identifier, so results are identical to a linear scan.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(std::vector<Vec3> points);

    std::size_t size() const noexcept { return points_.size(); }
    const Vec3& point(std::size_t id) const { return points_[id]; }

    /// k nearest points sorted by (distance, id). Throws InputError if k exceeds the searchable population.
    std::vector<Neighbor> knn(const Vec3& query, std::size_t k,
                              std::optional<std::size_t> exclude = std::nullopt) const;

    /// All points with distance <= radius, sorted by (distance, id).
    std::vector<Neighbor> radius_search(const Vec3& query, double radius,
                                        std::optional<std::size_t> exclude = std::nullopt) const;

private:
    struct Node {
        std::size_t begin = 0;
        std::size_t end = 0;
        int axis = -1;  // -1 marks a leaf
        double split = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end);
    void search_knn(std::size_t node, const Vec3& q, std::size_t k, std::optional<std::size_t> exclude,
                    std::vector<Neighbor>& heap) const;
    void search_radius(std::size_t node, const Vec3& q, double r2, std::optional<std::size_t> exclude,
                       std::vector<Neighbor>& out) const;

    std::vector<Vec3> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

/// knn_query(index, query, k): the k nearest identifiers sorted by distance.
std::vector<std::size_t> knn_query(const KdTree& index, const Vec3& query, std::size_t k);

}  // namespace geogs
