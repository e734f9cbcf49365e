#include "geogs/knn.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace geogs;

namespace {

std::vector<Vec3> cloud(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> pts(n);
    for (Vec3& p : pts) p = Vec3(u(rng), u(rng), u(rng));
    return pts;
}

void BM_Build(benchmark::State& state) {
    const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        KdTree tree(pts);
        benchmark::DoNotOptimize(tree.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Build)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Knn(benchmark::State& state) {
    const auto pts = cloud(100000);
    const KdTree tree(pts);
    const auto k = static_cast<std::size_t>(state.range(0));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree.knn(pts[i], k, i));
        i = (i + 7919) % pts.size();
    }
}
BENCHMARK(BM_Knn)->Arg(8)->Arg(10)->Arg(32);

void BM_Radius(benchmark::State& state) {
    const auto pts = cloud(100000);
    const KdTree tree(pts);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree.radius_search(pts[i], 0.05));
        i = (i + 7919) % pts.size();
    }
}
BENCHMARK(BM_Radius);

}  // namespace

BENCHMARK_MAIN();
