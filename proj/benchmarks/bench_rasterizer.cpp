#include "geogs/rasterizer.hpp"
#include "geogs/sh.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace geogs;

namespace {

GaussianMap random_map(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GaussianMap map;
    map.sh_degree = 2;
    for (std::size_t i = 0; i < n; ++i) {
        GaussianSplat s;
        const double z = 2.0 + 3.0 * u(rng);
        s.position = Vec3((u(rng) - 0.5) * z, (u(rng) - 0.5) * z, z);
        s.log_scales = Vec3::Constant(std::log(0.02 + 0.08 * u(rng)));
        s.rotation = Quat(u(rng) + 0.1, u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
        s.sh = ShCoeffs::Zero(sh_coeff_count(2), 3);
        for (int c = 0; c < 3; ++c) s.sh(0, c) = (u(rng) - 0.5) / kShC0;
        s.opacity_logit = 2.0 * u(rng) - 1.0;
        if (i % 2 == 0) {
            s.kind = SplatKind::Thin;
            s.log_scales.z() = std::log(kThinThickness);
        }
        map.push_back(s);
    }
    return map;
}

CameraView camera(int size) {
    CameraView cam;
    cam.id = "bench";
    cam.intrinsics = Intrinsics{0.8 * size, 0.8 * size, size / 2.0, size / 2.0, size, size};
    return cam;
}

void BM_Render(benchmark::State& state) {
    const GaussianMap map = random_map(static_cast<std::size_t>(state.range(0)), 1);
    const CameraView cam = camera(static_cast<int>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(render(map, cam));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Render)->Args({1000, 64})->Args({10000, 64})->Args({10000, 128})->Unit(benchmark::kMillisecond);

void BM_RenderBackward(benchmark::State& state) {
    const GaussianMap map = random_map(static_cast<std::size_t>(state.range(0)), 2);
    const CameraView cam = camera(static_cast<int>(state.range(1)));
    const Image upstream(cam.intrinsics.width, cam.intrinsics.height, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_backward(map, cam, upstream));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenderBackward)->Args({1000, 64})->Args({10000, 64})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
