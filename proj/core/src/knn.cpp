#include "geogs/knn.hpp"

#include "geogs/error.hpp"

#include <algorithm>
#include <numeric>

namespace geogs {

namespace {

constexpr std::size_t kLeafSize = 8;

bool closer(const Neighbor& a, const Neighbor& b) {
    return a.distance_sq < b.distance_sq || (a.distance_sq == b.distance_sq && a.id < b.id);
}

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        build(0, points_.size());
    }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
    const std::size_t index = nodes_.size();
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) {
        return index;
    }
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                         return points_[a][axis] < points_[b][axis];
                     });
    const double split = points_[order_[mid]][axis];
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    Node& node = nodes_[index];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return index;
}

void KdTree::search_knn(std::size_t node_id, const Vec3& q, std::size_t k, std::optional<std::size_t> exclude,
                        std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (std::size_t i = node.begin; i < node.end; ++i) {
            const std::size_t id = order_[i];
            if (exclude && *exclude == id) {
                continue;
            }
            const Neighbor cand{id, (points_[id] - q).squaredNorm()};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end(), closer);
            } else if (closer(cand, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), closer);
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end(), closer);
            }
        }
        return;
    }
    const double diff = q[node.axis] - node.split;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    search_knn(near, q, k, exclude, heap);
    // Points equal to the split value may sit on either side, so only prune on a strict bound.
    if (heap.size() < k || diff * diff <= heap.front().distance_sq) {
        search_knn(far, q, k, exclude, heap);
    }
}

std::vector<Neighbor> KdTree::knn(const Vec3& query, std::size_t k, std::optional<std::size_t> exclude) const {
    const std::size_t population = points_.size() - ((exclude && *exclude < points_.size()) ? 1 : 0);
    if (k > population) {
        throw InputError("knn: requested " + std::to_string(k) + " neighbors from a population of " +
                         std::to_string(population));
    }
    std::vector<Neighbor> heap;
    heap.reserve(k + 1);
    if (k > 0) {
        search_knn(0, query, k, exclude, heap);
    }
    std::sort(heap.begin(), heap.end(), closer);
    return heap;
}

void KdTree::search_radius(std::size_t node_id, const Vec3& q, double r2, std::optional<std::size_t> exclude,
                           std::vector<Neighbor>& out) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (std::size_t i = node.begin; i < node.end; ++i) {
            const std::size_t id = order_[i];
            if (exclude && *exclude == id) {
                continue;
            }
            const double d2 = (points_[id] - q).squaredNorm();
            if (d2 <= r2) {
                out.push_back({id, d2});
            }
        }
        return;
    }
    const double diff = q[node.axis] - node.split;
    if (diff <= 0.0 || diff * diff <= r2) {
        search_radius(node.left, q, r2, exclude, out);
    }
    if (diff >= 0.0 || diff * diff <= r2) {
        search_radius(node.right, q, r2, exclude, out);
    }
}

std::vector<Neighbor> KdTree::radius_search(const Vec3& query, double radius,
                                            std::optional<std::size_t> exclude) const {
    std::vector<Neighbor> out;
    if (!points_.empty() && radius >= 0.0) {
        search_radius(0, query, radius * radius, exclude, out);
    }
    std::sort(out.begin(), out.end(), closer);
    return out;
}

std::vector<std::size_t> knn_query(const KdTree& index, const Vec3& query, std::size_t k) {
    std::vector<std::size_t> ids;
    for (const Neighbor& n : index.knn(query, k)) {
        ids.push_back(n.id);
    }
    return ids;
}

}  // namespace geogs
