#include "geogs/config.hpp"

#include "geogs/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <variant>

namespace geogs {

namespace {

using Field = std::variant<double TrainConfig::*, long TrainConfig::*, int TrainConfig::*, bool TrainConfig::*,
                           std::uint64_t TrainConfig::*>;

struct Entry {
    const char* name;
    Field field;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {"learning_rate", &TrainConfig::learning_rate},
        {"lr_scale", &TrainConfig::lr_scale},
        {"lr_rotation", &TrainConfig::lr_rotation},
        {"lr_sh", &TrainConfig::lr_sh},
        {"lr_opacity", &TrainConfig::lr_opacity},
        {"lambda_pho", &TrainConfig::lambda_pho},
        {"lambda_geo", &TrainConfig::lambda_geo},
        {"use_dssim", &TrainConfig::use_dssim},
        {"lambda_dssim", &TrainConfig::lambda_dssim},
        {"total_iters", &TrainConfig::total_iters},
        {"warmup_iters", &TrainConfig::warmup_iters},
        {"densify_until", &TrainConfig::densify_until},
        {"densify_interval", &TrainConfig::densify_interval},
        {"knn_refresh_early", &TrainConfig::knn_refresh_early},
        {"knn_refresh_late", &TrainConfig::knn_refresh_late},
        {"knn_refresh_switch", &TrainConfig::knn_refresh_switch},
        {"checkpoint_interval", &TrainConfig::checkpoint_interval},
        {"opacity_floor", &TrainConfig::opacity_floor},
        {"grad_threshold", &TrainConfig::grad_threshold},
        {"size_threshold_factor", &TrainConfig::size_threshold_factor},
        {"geo", &TrainConfig::geo},
        {"neighbors_m", &TrainConfig::neighbors_m},
        {"neighbor_angle_filter", &TrainConfig::neighbor_angle_filter},
        {"sh_degree", &TrainConfig::sh_degree},
        {"initial_opacity", &TrainConfig::initial_opacity},
        {"normal_k", &TrainConfig::normal_k},
        {"dist_factor", &TrainConfig::dist_factor},
        {"angle_thresh", &TrainConfig::angle_thresh},
        {"near_plane", &TrainConfig::near_plane},
        {"frustum_margin", &TrainConfig::frustum_margin},
        {"dilation", &TrainConfig::dilation},
        {"train_fraction", &TrainConfig::train_fraction},
        {"seed", &TrainConfig::seed},
    };
    return entries;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") {
        return true;
    }
    if (value == "false" || value == "off" || value == "0") {
        return false;
    }
    throw ConfigError("config key '" + key + "': expected true/false/on/off, got '" + value + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void TrainConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ConfigError("invalid training configuration: " + what);
        }
    };
    for (double lr : {learning_rate, lr_scale, lr_rotation, lr_sh, lr_opacity}) {
        require(lr >= 0.0 && std::isfinite(lr), "learning rates must be finite and non-negative");
    }
    require(lambda_pho >= 0.0 && lambda_geo >= 0.0, "loss weights must be non-negative");
    require(lambda_dssim >= 0.0 && lambda_dssim <= 1.0, "lambda_dssim must lie in [0,1]");
    require(total_iters >= 0, "total_iters must be non-negative");
    require(warmup_iters >= 0, "warmup_iters must be non-negative");
    require(densify_interval > 0, "densify_interval must be positive");
    require(knn_refresh_early > 0 && knn_refresh_late > 0, "neighbor refresh intervals must be positive");
    require(checkpoint_interval > 0, "checkpoint_interval must be positive");
    require(warmup_iters < densify_until, "warmup_iters must be below densify_until");
    require(densify_until < knn_refresh_switch, "densify_until must be below knn_refresh_switch");
    // A zero-length run is always allowed (returns the initial map).
    require(total_iters == 0 || knn_refresh_switch <= total_iters, "knn_refresh_switch must not exceed total_iters");
    require(opacity_floor > 0.0 && opacity_floor < 1.0, "opacity_floor must lie in (0,1)");
    require(grad_threshold >= 0.0, "grad_threshold must be non-negative");
    require(size_threshold_factor > 0.0, "size_threshold_factor must be positive");
    require(neighbors_m >= 1, "neighbors_m must be at least 1");
    require(neighbor_angle_filter > 0.0 && neighbor_angle_filter <= M_PI, "neighbor_angle_filter must lie in (0,pi]");
    require(sh_degree >= 0 && sh_degree <= kMaxShDegree, "sh_degree must lie in [0,3]");
    require(initial_opacity > 0.0 && initial_opacity < 1.0, "initial_opacity must lie in (0,1)");
    require(normal_k >= 3, "normal_k must be at least 3");
    require(dist_factor > 0.0, "dist_factor must be positive");
    require(angle_thresh > 0.0 && angle_thresh < M_PI / 2, "angle_thresh must lie in (0,pi/2)");
    require(near_plane > 0.0 && frustum_margin >= 1.0 && dilation >= 0.0, "rasterizer settings out of range");
}

TrainConfig TrainConfig::scaled_to(long total) {
    TrainConfig c;
    if (total <= 0) {
        c.total_iters = 0;
        return c;
    }
    const double s = static_cast<double>(total) / 30000.0;
    auto scaled = [s](long v) { return std::max<long>(1, std::lround(static_cast<double>(v) * s)); };
    c.total_iters = total;
    c.warmup_iters = scaled(c.warmup_iters);
    c.densify_until = std::max(c.warmup_iters + 1, scaled(c.densify_until));
    c.knn_refresh_switch = std::min(total, std::max(c.densify_until + 1, scaled(c.knn_refresh_switch)));
    c.knn_refresh_early = scaled(c.knn_refresh_early);
    c.knn_refresh_late = scaled(c.knn_refresh_late);
    c.checkpoint_interval = scaled(c.checkpoint_interval);
    return c;
}

RenderSettings TrainConfig::render_settings() const {
    RenderSettings rs;
    rs.near_plane = near_plane;
    rs.frustum_margin = frustum_margin;
    rs.dilation = dilation;
    return rs;
}

const std::vector<std::string>& schedule_keys() {
    static const std::vector<std::string> keys = {"warmup_iters",      "densify_until",      "knn_refresh_switch",
                                                  "knn_refresh_early", "knn_refresh_late", "checkpoint_interval"};
    return keys;
}

std::vector<std::string> apply_config_text(TrainConfig& config, std::string_view text) {
    std::vector<std::string> keys;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const Entry* entry = nullptr;
        for (const Entry& e : registry()) {
            if (key == e.name) {
                entry = &e;
                break;
            }
        }
        if (!entry) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(config.*member)>;
                if constexpr (std::is_same_v<T, double>) {
                    config.*member = parse_double(key, value);
                } else if constexpr (std::is_same_v<T, bool>) {
                    config.*member = parse_bool(key, value);
                } else {
                    config.*member = parse_integer<T>(key, value);
                }
            },
            entry->field);
        keys.push_back(key);
    }
    return keys;
}

std::string to_config_text(const TrainConfig& config) {
    std::ostringstream os;
    for (const Entry& e : registry()) {
        os << e.name << '=';
        std::visit(
            [&](auto member) {
                using T = std::remove_cv_t<std::remove_reference_t<decltype(config.*member)>>;
                if constexpr (std::is_same_v<T, double>) {
                    os << format_double(config.*member);
                } else if constexpr (std::is_same_v<T, bool>) {
                    os << (config.*member ? "true" : "false");
                } else {
                    os << config.*member;
                }
            },
            e.field);
        os << '\n';
    }
    return os.str();
}

}  // namespace geogs
