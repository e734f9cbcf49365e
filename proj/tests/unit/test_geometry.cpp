#include "support.hpp"

#include "geogs/error.hpp"
#include "geogs/geometry.hpp"
#include "geogs/knn.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace geogs;
using namespace geogs::testing;

namespace {

std::vector<std::size_t> linear_knn(const std::vector<Vec3>& pts, const Vec3& q, std::size_t k) {
    std::vector<std::size_t> ids(pts.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        const double da = (pts[a] - q).squaredNorm(), db = (pts[b] - q).squaredNorm();
        return da < db || (da == db && a < b);
    });
    ids.resize(k);
    return ids;
}

// Jittered grid on z = 0; n must be a square.
std::vector<Vec3> plane_points(Rng& rng, std::size_t n) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    const double step = 2.0 / side;
    std::vector<Vec3> pts;
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j)
            pts.emplace_back(-1 + (i + 0.5 + uniform(rng, -0.2, 0.2)) * step,
                             -1 + (j + 0.5 + uniform(rng, -0.2, 0.2)) * step, 0.0);
    return pts;
}

}  // namespace

TEST_CASE("knn_query: integer grid") {
    std::vector<Vec3> pts;
    for (int x = -2; x <= 2; ++x)
        for (int y = -2; y <= 2; ++y)
            for (int z = -2; z <= 2; ++z) pts.emplace_back(x, y, z);
    const KdTree tree(pts);
    const auto r = knn_query(tree, Vec3(0.1, 0, 0), 1);
    REQUIRE(r.size() == 1);
    CHECK(pts[r[0]] == Vec3(0, 0, 0));
}

TEST_CASE("knn_query: equidistant points resolve to the lower id") {
    std::vector<Vec3> pts(10, Vec3(10, 10, 10));
    pts[3] = Vec3(1, 0, 0);
    pts[7] = Vec3(-1, 0, 0);
    const KdTree tree(pts);
    const auto r = knn_query(tree, Vec3::Zero(), 2);
    CHECK(r == std::vector<std::size_t>{3, 7});
}

TEST_CASE("knn_query matches a linear scan") {
    Rng rng(21);
    std::vector<Vec3> pts;
    for (int i = 0; i < 1000; ++i) pts.emplace_back(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    // Duplicates exercise the tie-break.
    for (int i = 0; i < 50; ++i) pts.push_back(pts[static_cast<std::size_t>(i) * 7]);
    const KdTree tree(pts);
    for (int q = 0; q < 500; ++q) {
        const Vec3 query = q < 50 ? pts[static_cast<std::size_t>(q)] : Vec3(uniform(rng, -1.2, 1.2), uniform(rng, -1.2, 1.2), uniform(rng, -1.2, 1.2));
        CHECK(knn_query(tree, query, 8) == linear_knn(pts, query, 8));
    }
}

TEST_CASE("KdTree: exclusion, radius search, and population checks") {
    Rng rng(22);
    std::vector<Vec3> pts;
    for (int i = 0; i < 300; ++i) pts.emplace_back(uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1));
    const KdTree tree(pts);
    for (std::size_t i = 0; i < 50; ++i) {
        for (const Neighbor& nb : tree.knn(pts[i], 5, i)) CHECK(nb.id != i);
        const auto found = tree.radius_search(pts[i], 0.2, i);
        std::size_t brute = 0;
        for (std::size_t j = 0; j < pts.size(); ++j) brute += (j != i && (pts[j] - pts[i]).norm() <= 0.2) ? 1 : 0;
        CHECK(found.size() == brute);
        CHECK(std::is_sorted(found.begin(), found.end(), [](const Neighbor& a, const Neighbor& b) {
            return a.distance_sq < b.distance_sq || (a.distance_sq == b.distance_sq && a.id < b.id);
        }));
    }
    CHECK_THROWS_AS(tree.knn(Vec3::Zero(), 301), InputError);
    CHECK_THROWS_AS(tree.knn(Vec3::Zero(), 300, std::size_t{0}), InputError);
}

TEST_CASE("estimate_normals: plane") {
    Rng rng(23);
    const auto pts = plane_points(rng, 100);
    const auto normals = estimate_normals(pts, 10);
    for (const Vec3& n : normals) {
        CHECK(std::abs(n.norm() - 1.0) < 1e-9);
        CHECK(axis_angle_between(n, Vec3::UnitZ()) < 1e-3);
        CHECK(n.z() > 0.0);  // +z hemisphere without a viewpoint
    }
    const auto down = estimate_normals(pts, 10, Vec3(0, 0, -5));
    for (const Vec3& n : down) CHECK(n.z() < 0.0);
}

TEST_CASE("estimate_normals: cube corners with k=3 match the neighbor-plane cross product") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    // Break distance ties deterministically with a tiny shear so neighbor sets are unique.
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] += Vec3(0.01 * i, 0.003 * i * i, 0.0);
    const auto normals = estimate_normals(pts, 3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<std::size_t> ids(pts.size());
        std::iota(ids.begin(), ids.end(), 0);
        ids.erase(ids.begin() + static_cast<long>(i));
        std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
            return (pts[a] - pts[i]).squaredNorm() < (pts[b] - pts[i]).squaredNorm();
        });
        const Vec3 oracle = (pts[ids[1]] - pts[ids[0]]).cross(pts[ids[2]] - pts[ids[0]]).normalized();
        CHECK(axis_angle_between(normals[i], oracle) < 1e-6);
    }
}

TEST_CASE("estimate_normals: sphere normals are radial") {
    Rng rng(24);
    std::vector<Vec3> pts;
    for (int i = 0; i < 4000; ++i) pts.push_back(random_unit(rng));
    const auto normals = estimate_normals(pts, 10, Vec3::Zero());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(axis_angle_between(normals[i], pts[i]) < 5.0 * M_PI / 180.0);
        CHECK(normals[i].dot(pts[i]) < 0.0);  // faces the center viewpoint
    }
}

TEST_CASE("estimate_normals is scale-equivariant") {
    Rng rng(25);
    std::vector<Vec3> pts;
    for (int i = 0; i < 300; ++i) pts.emplace_back(uniform(rng, -1, 1), uniform(rng, -1, 1), 0.2 * uniform(rng, -1, 1));
    const auto a = estimate_normals(pts, 10);
    for (double s : {0.01, 3.0, 250.0}) {
        std::vector<Vec3> scaled;
        for (const Vec3& p : pts) scaled.push_back(p * s);
        const auto b = estimate_normals(scaled, 10);
        for (std::size_t i = 0; i < pts.size(); ++i) CHECK(axis_angle_between(a[i], b[i]) < 1e-9 * 1e3);
    }
}

TEST_CASE("estimate_normals: input validation") {
    std::vector<Vec3> pts(5, Vec3::Zero());
    CHECK_THROWS_AS(estimate_normals(pts, 10), InputError);
    CHECK_THROWS_AS(estimate_normals(pts, 2), InputError);
}

TEST_CASE("classify_points: dense plane is all co") {
    Rng rng(26);
    const auto pts = plane_points(rng, 400);
    const std::vector<Vec3> colors(pts.size(), Vec3::Constant(0.5));
    const auto normals = estimate_normals(pts, 10);
    const ClassifiedCloud c = classify_points(pts, colors, normals);
    CHECK(c.co_points.size() == 400);
    CHECK(c.ind_points.empty());
    for (const SurfacePoint& p : c.co_points) CHECK(std::abs(p.normal.norm() - 1.0) < 1e-9);
}

TEST_CASE("classify_points: a far outlier is the only individual point") {
    Rng rng(27);
    auto pts = plane_points(rng, 400);
    const auto nn = nearest_neighbor_distances(pts);
    std::vector<double> sorted = nn;
    std::sort(sorted.begin(), sorted.end());
    pts.emplace_back(0.0, 0.0, 100.0 * sorted[sorted.size() / 2] + 1.0);
    const std::vector<Vec3> colors(pts.size(), Vec3::Constant(0.5));
    std::vector<Vec3> normals(pts.size(), Vec3::UnitZ());
    const ClassifiedCloud c = classify_points(pts, colors, normals);
    REQUIRE(c.ind_points.size() == 1);
    CHECK(c.ind_points[0].source == 400);
    CHECK(c.size() == pts.size());
}

TEST_CASE("classify_points: crease between two planes matches a brute-force classifier") {
    Rng rng(28);
    std::vector<Vec3> pts;
    for (int i = 0; i < 600; ++i) pts.emplace_back(uniform(rng, 0, 1), uniform(rng, -1, 1), 0.0);
    for (int i = 0; i < 600; ++i) pts.emplace_back(0.0, uniform(rng, -1, 1), uniform(rng, 0.001, 1));
    const std::vector<Vec3> colors(pts.size(), Vec3::Constant(0.5));
    const auto normals = estimate_normals(pts, 10, Vec3(1, 0, 1));
    const double thresh = 20.0 * M_PI / 180.0;
    const ClassifiedCloud c = classify_points(pts, colors, normals, {3.0, thresh});

    // O(n^2) oracle.
    const std::size_t n = pts.size();
    std::vector<double> nn(n, 1e300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) nn[i] = std::min(nn[i], (pts[i] - pts[j]).norm());
    std::vector<double> sorted = nn;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::vector<bool> iso(n);
    for (std::size_t i = 0; i < n; ++i) iso[i] = nn[i] > 3.0 * median;
    std::size_t expected_ind = 0;
    std::size_t near_crease = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool ind = iso[i];
        for (std::size_t j = 0; j < n && !ind; ++j) {
            if (j != i && !iso[j] && (pts[i] - pts[j]).norm() <= median) {
                const double a = std::acos(std::min(1.0, std::abs(normals[i].dot(normals[j]))));
                ind = a > thresh;
            }
        }
        expected_ind += ind ? 1 : 0;
        near_crease += (ind && std::min(pts[i].x(), pts[i].z()) < 0.3) ? 1 : 0;
    }
    CHECK(c.ind_points.size() == expected_ind);
    CHECK(expected_ind > 0);
    CHECK(near_crease == expected_ind);  // individual points concentrate at the crease
}

TEST_CASE("classify_points is permutation-equivariant") {
    Rng rng(29);
    std::vector<Vec3> pts;
    for (int i = 0; i < 300; ++i) pts.emplace_back(uniform(rng, 0, 1), uniform(rng, -1, 1), 0.0);
    for (int i = 0; i < 300; ++i) pts.emplace_back(0.0, uniform(rng, -1, 1), uniform(rng, 0.001, 1));
    std::vector<Vec3> colors(pts.size(), Vec3::Constant(0.5));
    const auto normals = estimate_normals(pts, 10, Vec3(1, 0, 1));
    const ClassifiedCloud a = classify_points(pts, colors, normals);
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vec3> p2, n2;
    for (std::size_t i : perm) {
        p2.push_back(pts[i]);
        n2.push_back(normals[i]);
    }
    const ClassifiedCloud b = classify_points(p2, colors, n2);
    std::vector<std::size_t> ia, ib;
    for (const auto& p : a.ind_points) ia.push_back(p.source);
    for (const auto& p : b.ind_points) ib.push_back(perm[p.source]);
    std::sort(ia.begin(), ia.end());
    std::sort(ib.begin(), ib.end());
    CHECK(ia == ib);
}

TEST_CASE("classify_points: partition and validation") {
    Rng rng(30);
    const auto pts = plane_points(rng, 49);
    const std::vector<Vec3> colors(pts.size(), Vec3::Constant(0.5));
    const auto normals = estimate_normals(pts, 10);
    const ClassifiedCloud c = classify_points(pts, colors, normals);
    std::vector<std::size_t> all;
    for (const auto& p : c.co_points) all.push_back(p.source);
    for (const auto& p : c.ind_points) all.push_back(p.source);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    CHECK(all.size() == pts.size());
    CHECK_THROWS_AS(classify_points(pts, std::vector<Vec3>(3), normals), InputError);
    CHECK_THROWS_AS(classify_points(pts, colors, normals, {3.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(classify_points(std::vector<Vec3>{}, {}, {}), InputError);
}
