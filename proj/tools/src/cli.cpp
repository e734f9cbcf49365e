#include "geogs_cli/cli.hpp"

#include "geogs/error.hpp"
#include "geogs/pipeline.hpp"
#include "geogs/ply.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <regex>

namespace geogs::cli {

namespace {

Vec3 parse_room(const std::string& text) {
    static const std::regex pattern(R"(^\s*([0-9.eE+-]+)x([0-9.eE+-]+)x([0-9.eE+-]+)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) {
        throw CLI::ValidationError("--room", "expected WxHxD, e.g. 2x2x2");
    }
    try {
        return Vec3(std::stod(m[1]), std::stod(m[2]), std::stod(m[3]));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--room", "expected WxHxD, e.g. 2x2x2");
    }
}

std::optional<bool> parse_on_off(const std::string& text) {
    if (text.empty()) return std::nullopt;
    if (text == "on") return true;
    if (text == "off") return false;
    throw CLI::ValidationError("--geo", "expected on or off");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Geometry-aware Gaussian splatting on the CPU", "geogs"};
    app.require_subcommand(1);

    SynthOptions synth;
    std::string room = "2x2x2";
    std::string texture = "checker";
    std::string pattern = "lawnmower";
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic box-room dataset");
    synth_cmd->add_option("--out", synth_out, "Output dataset directory")->required();
    synth_cmd->add_option("--room", room, "Room extent WxHxD")->capture_default_str();
    synth_cmd->add_option("--views", synth.views, "Number of camera views")->capture_default_str();
    synth_cmd->add_option("--points", synth.points, "Number of cloud points")->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise, "Point noise sigma (world units)")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--texture", texture, "checker, perlin or flat")->capture_default_str();
    synth_cmd->add_option("--pattern", pattern, "orbit or lawnmower")->capture_default_str();
    synth_cmd->add_option("--size", synth.image_size, "Image width and height")->capture_default_str();
    synth_cmd->add_option("--splats-per-face", synth.splats_per_face, "Ground-truth splats per wall")
        ->capture_default_str();

    TrainOptions train;
    std::string train_data, train_out, config_file, geo;
    long iters = -1;
    double split_fraction = 100.0;
    std::uint64_t seed = 0;
    auto* train_cmd = app.add_subcommand("train", "Train a model on a dataset directory");
    train_cmd->add_option("--data", train_data, "Dataset directory")->required();
    train_cmd->add_option("--out", train_out, "Output directory")->required();
    auto* config_opt = train_cmd->add_option("--config", config_file, "key=value configuration file");
    train_cmd->add_option("--geo", geo, "on: geometry-aware training, off: plain baseline");
    auto* iters_opt = train_cmd->add_option("--iters", iters, "Total iterations (schedule rescaled)");
    auto* split_opt = train_cmd->add_option("--split-fraction", split_fraction, "Training subset percentage");
    auto* seed_opt = train_cmd->add_option("--seed", seed, "Random seed");

    std::string model, cameras, render_out;
    auto* render_cmd = app.add_subcommand("render", "Render a model for every camera of a cameras file");
    render_cmd->add_option("--model", model, "Model PLY")->required();
    render_cmd->add_option("--cameras", cameras, "cameras.txt")->required();
    render_cmd->add_option("--out", render_out, "Output image directory")->required();

    std::string eval_data;
    double eval_fraction = 100.0;
    auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM of a model on held-out views");
    eval_cmd->add_option("--model", model, "Model PLY")->required();
    eval_cmd->add_option("--data", eval_data, "Dataset directory")->required();
    eval_cmd->add_option("--split-fraction", eval_fraction, "Training subset percentage")->capture_default_str();

    std::string scene;
    std::uint64_t recon_seed = 0;
    auto* recon_cmd = app.add_subcommand("recon-error", "Sample-to-surface error against reference surfaces");
    recon_cmd->add_option("--model", model, "Model PLY")->required();
    recon_cmd->add_option("--scene", scene, "scene.txt with reference surfaces")->required();
    recon_cmd->add_option("--seed", recon_seed, "Sampling seed")->capture_default_str();

    auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a model");
    inspect_cmd->add_option("--model", model, "Model PLY")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        synth.room = parse_room(room);
        train.geo = parse_on_off(geo);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (synth_cmd->parsed()) {
            synth.texture = parse_texture(texture);
            synth.pattern = parse_pattern(pattern);
            const SyntheticScene s = run_synth(synth, synth_out);
            out << "wrote " << s.cameras.size() << " views, " << s.point_cloud.size() << " points and "
                << s.gt_splats.size() << " ground-truth splats to " << synth_out << '\n';
        } else if (train_cmd->parsed()) {
            train.data = train_data;
            train.out = train_out;
            if (*config_opt) train.config_file = config_file;
            if (*iters_opt) train.iters = iters;
            if (*split_opt) train.split_fraction = split_fraction;
            if (*seed_opt) train.seed = seed;
            run_train(train, out);
        } else if (render_cmd->parsed()) {
            const std::size_t n = run_render(model, cameras, render_out);
            out << "rendered " << n << " views to " << render_out << '\n';
        } else if (eval_cmd->parsed()) {
            out << run_eval(model, eval_data, eval_fraction).text();
        } else if (recon_cmd->parsed()) {
            out << format_recon_report(run_recon_error(model, scene, recon_seed));
        } else if (inspect_cmd->parsed()) {
            out << inspect_report(read_ply(model));
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace geogs::cli
