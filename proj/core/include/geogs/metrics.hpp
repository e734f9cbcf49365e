#pragma once

#include "geogs/surfaces.hpp"
#include "geogs/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace geogs {

/// 10 log10(peak^2 / MSE); +inf for identical images.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5), averaged over channels.
double ssim(const Image& a, const Image& b);

struct SsimResult {
    double value = 0.0;
    /// d ssim / d a
    Image gradient;
};
SsimResult ssim_with_gradient(const Image& a, const Image& b);

/// Normalized 11x11 Gaussian window used by ssim, row-major.
const std::vector<double>& ssim_window();

struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> eval;
};

/// Every 5th index is held out for evaluation; the remainder is subsampled with a fixed stride
/// for the supported fractions 100, 50, 25, 16.6, 12.5 and 10 percent.
DatasetSplit split_dataset(std::size_t n_cameras, double train_fraction);

/// Stride applied to the training remainder for a supported fraction; ConfigError otherwise.
std::size_t train_stride(double train_fraction);

struct ReconstructionError {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n_samples = 0;
};

/// Draws 3 seeded samples from every splat's Gaussian and measures their distance to the
/// nearest surface. std is the population standard deviation.
ReconstructionError reconstruction_error(const GaussianMap& map, std::span<const Surface> surfaces,
                                         std::uint64_t seed = 0);

}  // namespace geogs
