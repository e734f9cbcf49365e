#include "geogs/pipeline.hpp"

#include "geogs/error.hpp"
#include "geogs/image_io.hpp"
#include "geogs/initializer.hpp"
#include "geogs/ply.hpp"
#include "geogs/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace geogs {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

SyntheticScene run_synth(const SynthOptions& o, const fs::path& out) {
    SyntheticScene scene = make_box_room(o.room, o.texture, o.splats_per_face, o.seed);
    TrajectoryOptions topts;
    topts.width = o.image_size;
    topts.height = o.image_size;
    make_trajectory(scene, o.views, o.pattern, o.seed, topts);
    sample_cloud(scene, o.points, o.noise, o.seed);
    export_dataset(scene, out);
    return scene;
}

TrainConfig resolve_config(const TrainOptions& o) {
    std::string text;
    if (o.config_file) {
        text = read_file(*o.config_file);
    }
    TrainConfig probe;
    apply_config_text(probe, text);
    const long total = o.iters.value_or(probe.total_iters);
    TrainConfig cfg = total == TrainConfig{}.total_iters ? TrainConfig{} : TrainConfig::scaled_to(total);
    apply_config_text(cfg, text);
    cfg.total_iters = total;
    if (o.geo) {
        cfg.geo = *o.geo;
    }
    if (o.split_fraction) {
        cfg.train_fraction = *o.split_fraction;
    }
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    cfg.validate();
    return cfg;
}

GaussianMap initialize_map(const PointCloud& cloud, const std::optional<Vec3>& viewpoint, const TrainConfig& cfg,
                           std::vector<std::string>* warnings) {
    if (cloud.size() == 0) {
        throw InputError("initialize_map: empty point cloud");
    }
    ClassifiedCloud classified;
    if (cfg.geo && cloud.size() > static_cast<std::size_t>(cfg.normal_k)) {
        const auto normals = estimate_normals(cloud.positions, static_cast<std::size_t>(cfg.normal_k), viewpoint);
        ClassifyOptions copts;
        copts.dist_factor = cfg.dist_factor;
        copts.angle_thresh = cfg.angle_thresh;
        classified = classify_points(cloud.positions, cloud.colors, normals, copts);
    } else {
        classified = all_individual(cloud.positions, cloud.colors);
    }
    InitOptions iopts;
    iopts.initial_opacity = cfg.initial_opacity;
    iopts.sh_degree = cfg.sh_degree;
    return init_map(classified, iopts, warnings);
}

TrainSummary run_train(const TrainOptions& o, std::ostream& log) {
    TrainSummary summary;
    summary.config = resolve_config(o);
    const TrainConfig& cfg = summary.config;
    Dataset ds = load_dataset(o.data);

    std::vector<CameraView> train_views;
    if (ds.cameras.size() >= 5) {
        for (const std::size_t i : split_dataset(ds.cameras.size(), cfg.train_fraction).train) {
            train_views.push_back(ds.cameras[i]);
        }
    } else {
        log << "warning: fewer than 5 views; training on all of them\n";
        train_views = ds.cameras;
    }
    summary.train_views = train_views.size();

    std::error_code ec;
    fs::create_directories(o.out / "checkpoints", ec);
    if (ec) {
        throw IoError("cannot create output directory '" + o.out.string() + "': " + ec.message());
    }
    std::vector<std::string> warnings;
    const std::optional<Vec3> viewpoint =
        ds.cameras.empty() ? std::nullopt : std::optional<Vec3>(ds.cameras.front().pose_cw.center());
    GaussianMap map = initialize_map(ds.cloud, viewpoint, cfg, &warnings);
    for (const std::string& w : warnings) {
        log << "warning: " << w << '\n';
    }
    summary.initial_splats = map.size();
    write_ply(map, o.out / "init.ply");
    write_file(o.out / "config.txt", to_config_text(cfg));
    log << "initialized " << map.size() << " splats (" << map.count(SplatKind::Thin) << " thin, "
        << map.count(SplatKind::Free) << " free) from " << ds.cloud.size() << " points; training on "
        << train_views.size() << " views for " << cfg.total_iters << " iterations\n";

    std::ofstream growth(o.out / "growth.log", std::ios::trunc);
    TrainHooks hooks;
    hooks.diagnostics = &growth;
    hooks.checkpoint = [&](long iter, const GaussianMap& m) {
        write_ply(m, o.out / "checkpoints" / ("iter_" + std::to_string(iter) + ".ply"));
    };
    const TrainResult result = train(std::move(map), train_views, cfg, hooks);
    write_ply(result.map, o.out / "model.ply");
    if (cfg.total_iters > 0) {
        hooks.checkpoint(cfg.total_iters, result.map);
    }
    write_file(o.out / "metrics.csv", format_metrics_log(result.log));
    summary.final_splats = result.map.size();
    summary.final_pho = result.log.empty() ? 0.0 : result.log.back().pho_loss;
    log << "trained model has " << summary.final_splats << " splats; final photometric loss "
        << format_number(summary.final_pho) << '\n';
    return summary;
}

std::size_t run_render(const fs::path& model, const fs::path& cameras_file, const fs::path& out) {
    const GaussianMap map = read_ply(model);
    const auto cameras = read_cameras(cameras_file);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());
    }
    for (const CameraView& cam : cameras) {
        write_png(render(map, cam).image, out / (cam.id + ".png"));
    }
    return cameras.size();
}

std::string EvalReport::text() const {
    std::ostringstream os;
    os << "view_id,psnr,ssim\n";
    for (const ViewScore& v : views) {
        os << v.id << ',' << format_number(v.psnr) << ',' << format_number(v.ssim) << '\n';
    }
    os << "mean," << format_number(mean_psnr) << ',' << format_number(mean_ssim) << '\n';
    return os.str();
}

EvalReport evaluate(const GaussianMap& model, const std::vector<CameraView>& cameras, double split_fraction) {
    std::vector<std::size_t> ids;
    if (cameras.size() >= 5) {
        ids = split_dataset(cameras.size(), split_fraction).eval;
    } else {
        train_stride(split_fraction);
        for (std::size_t i = 0; i < cameras.size(); ++i) ids.push_back(i);
    }
    EvalReport report;
    for (const std::size_t i : ids) {
        const CameraView& cam = cameras[i];
        const Image img = render(model, cam).image;
        report.views.push_back({cam.id, psnr(img, cam.reference), ssim(img, cam.reference)});
    }
    for (const ViewScore& v : report.views) {
        report.mean_psnr += v.psnr;
        report.mean_ssim += v.ssim;
    }
    if (!report.views.empty()) {
        report.mean_psnr /= static_cast<double>(report.views.size());
        report.mean_ssim /= static_cast<double>(report.views.size());
    }
    return report;
}

EvalReport run_eval(const fs::path& model, const fs::path& data, double split_fraction) {
    const GaussianMap map = read_ply(model);
    const Dataset ds = load_dataset(data);
    return evaluate(map, ds.cameras, split_fraction);
}

std::string format_recon_report(const ReconstructionError& err) {
    std::ostringstream os;
    os << "mean,std,n_samples\n" << format_number(err.mean) << ',' << format_number(err.std) << ',' << err.n_samples
       << '\n';
    return os.str();
}

ReconstructionError run_recon_error(const fs::path& model, const fs::path& scene, std::uint64_t seed) {
    const GaussianMap map = read_ply(model);
    const auto surfaces = read_scene(scene);
    return reconstruction_error(map, surfaces, seed);
}

std::string inspect_report(const GaussianMap& map) {
    std::ostringstream os;
    os << "splats " << map.size() << '\n';
    os << "sh_degree " << map.sh_degree << '\n';
    os << "kind_free " << map.count(SplatKind::Free) << '\n';
    os << "kind_thin " << map.count(SplatKind::Thin) << '\n';
    if (map.empty()) {
        return os.str();
    }
    std::vector<double> largest;
    double opacity_sum = 0.0;
    for (const GaussianSplat& s : map.splats) {
        largest.push_back(activated_scales(s).maxCoeff());
        opacity_sum += activated_opacity(s);
    }
    std::sort(largest.begin(), largest.end());
    double mean = 0.0;
    for (const double v : largest) mean += v;
    mean /= static_cast<double>(largest.size());
    os << "scale_max_min " << format_number(largest.front()) << '\n';
    os << "scale_max_median " << format_number(largest[largest.size() / 2]) << '\n';
    os << "scale_max_mean " << format_number(mean) << '\n';
    os << "scale_max_max " << format_number(largest.back()) << '\n';
    os << "opacity_mean " << format_number(opacity_sum / static_cast<double>(map.size())) << '\n';
    return os.str();
}

}  // namespace geogs
