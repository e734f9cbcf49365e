#pragma once

#include "geogs/config.hpp"
#include "geogs/dataset.hpp"
#include "geogs/metrics.hpp"
#include "geogs/synth.hpp"
#include "geogs/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace geogs {

struct SynthOptions {
    Vec3 room = Vec3(2.0, 2.0, 2.0);
    std::size_t views = 50;
    std::size_t points = 5000;
    double noise = 0.005;
    std::uint64_t seed = 0;
    Texture texture = Texture::Checker;
    TrajectoryPattern pattern = TrajectoryPattern::Lawnmower;
    int image_size = 64;
    std::size_t splats_per_face = 900;
};

/// Generates a synthetic scene and exports it to `out`.
SyntheticScene run_synth(const SynthOptions& options, const std::filesystem::path& out);

struct TrainOptions {
    std::filesystem::path data;
    std::filesystem::path out;
    std::optional<std::filesystem::path> config_file;
    std::optional<bool> geo;
    std::optional<long> iters;
    std::optional<double> split_fraction;
    std::optional<std::uint64_t> seed;
};

/// Resolves the effective configuration: defaults (rescaled when the iteration count differs from
/// the default), then the config file, then command-line overrides.
TrainConfig resolve_config(const TrainOptions& options);

/// Initial map for a cloud: normals facing `viewpoint`, co/ind classification when `config.geo`.
GaussianMap initialize_map(const PointCloud& cloud, const std::optional<Vec3>& viewpoint, const TrainConfig& config,
                           std::vector<std::string>* warnings = nullptr);

struct TrainSummary {
    TrainConfig config;
    std::size_t initial_splats = 0;
    std::size_t final_splats = 0;
    std::size_t train_views = 0;
    double final_pho = 0.0;
};

/// Full training run. Writes init.ply, model.ply, metrics.csv, growth.log, config.txt and
/// checkpoints/iter_<n>.ply under options.out.
TrainSummary run_train(const TrainOptions& options, std::ostream& log);

/// Renders `model` for every camera of `cameras_file` into out/<id>.png.
std::size_t run_render(const std::filesystem::path& model, const std::filesystem::path& cameras_file,
                       const std::filesystem::path& out);

struct ViewScore {
    std::string id;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct EvalReport {
    std::vector<ViewScore> views;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    /// `view_id,psnr,ssim` rows followed by a `mean,<psnr>,<ssim>` summary line.
    std::string text() const;
};

/// Scores the model on the held-out views of a dataset (all views when fewer than 5).
EvalReport evaluate(const GaussianMap& model, const std::vector<CameraView>& cameras, double split_fraction = 100.0);
EvalReport run_eval(const std::filesystem::path& model, const std::filesystem::path& data, double split_fraction);

/// `mean,std,n_samples` header plus one row.
std::string format_recon_report(const ReconstructionError& err);
ReconstructionError run_recon_error(const std::filesystem::path& model, const std::filesystem::path& scene,
                                    std::uint64_t seed = 0);

/// Counts, kind histogram and scale statistics of a model.
std::string inspect_report(const GaussianMap& map);

std::string format_number(double v);

}  // namespace geogs
