#include "geogs/metrics.hpp"

#include "geogs/densifier.hpp"
#include "geogs/error.hpp"
#include "geogs/transforms.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace geogs {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::array<double, kWin>& gauss_1d() {
    static const std::array<double, kWin> g = [] {
        std::array<double, kWin> v{};
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i) {
            const double x = i - kWin / 2;
            v[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
            sum += v[i];
        }
        for (double& x : v) {
            x /= sum;
        }
        return v;
    }();
    return g;
}

// Plane of one channel as a dense row-major array.
std::vector<double> channel(const Image& img, int c) {
    std::vector<double> out(img.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = img.data[i * 3 + c];
    }
    return out;
}

// Separable valid-mode correlation: (h - 10) x (w - 10) output.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
    const auto& g = gauss_1d();
    const int ow = w - kWin + 1;
    const int oh = h - kWin + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kWin; ++k) {
                s += g[k] * src[static_cast<std::size_t>(y) * w + x + k];
            }
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kWin; ++k) {
                s += g[k] * tmp[static_cast<std::size_t>(y + k) * ow + x];
            }
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

// Adjoint of filter_valid.
std::vector<double> filter_adjoint(const std::vector<double>& src, int w, int h) {
    const auto& g = gauss_1d();
    const int ow = w - kWin + 1;
    const int oh = h - kWin + 1;
    std::vector<double> tmp(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            const double v = src[static_cast<std::size_t>(y) * ow + x];
            for (int k = 0; k < kWin; ++k) {
                tmp[static_cast<std::size_t>(y + k) * ow + x] += g[k] * v;
            }
        }
    }
    std::vector<double> out(static_cast<std::size_t>(h) * w, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            const double v = tmp[static_cast<std::size_t>(y) * ow + x];
            for (int k = 0; k < kWin; ++k) {
                out[static_cast<std::size_t>(y) * w + x + k] += g[k] * v;
            }
        }
    }
    return out;
}

std::vector<double> product(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] * b[i];
    }
    return out;
}

SsimResult ssim_impl(const Image& a, const Image& b, bool with_gradient) {
    if (!a.same_shape(b)) {
        throw InputError("ssim: image dimensions differ");
    }
    if (a.width < kWin || a.height < kWin) {
        throw InputError("ssim: images must be at least 11x11");
    }
    const int w = a.width;
    const int h = a.height;
    const std::size_t positions = static_cast<std::size_t>(w - kWin + 1) * (h - kWin + 1);
    const double norm = 1.0 / (static_cast<double>(positions) * 3.0);
    SsimResult out;
    if (with_gradient) {
        out.gradient = Image(w, h);
    }
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        const auto pa = channel(a, c);
        const auto pb = channel(b, c);
        const auto mu_a = filter_valid(pa, w, h);
        const auto mu_b = filter_valid(pb, w, h);
        const auto e_aa = filter_valid(product(pa, pa), w, h);
        const auto e_bb = filter_valid(product(pb, pb), w, h);
        const auto e_ab = filter_valid(product(pa, pb), w, h);
        std::vector<double> g_mu(positions), g_aa(positions), g_ab(positions);
        for (std::size_t i = 0; i < positions; ++i) {
            const double ma = mu_a[i];
            const double mb = mu_b[i];
            const double a1 = 2.0 * ma * mb + kC1;
            const double b1 = ma * ma + mb * mb + kC1;
            const double a2 = 2.0 * (e_ab[i] - ma * mb) + kC2;
            const double b2 = (e_aa[i] - ma * ma) + (e_bb[i] - mb * mb) + kC2;
            const double d = b1 * b2;
            const double s = a1 * a2 / d;
            total += s;
            if (with_gradient) {
                g_mu[i] = norm * (2.0 * mb * (a2 - a1) - 2.0 * ma * s * (b2 - b1)) / d;
                g_aa[i] = norm * (-s / b2);
                g_ab[i] = norm * (2.0 * a1 / d);
            }
        }
        if (with_gradient) {
            const auto d_mu = filter_adjoint(g_mu, w, h);
            const auto d_aa = filter_adjoint(g_aa, w, h);
            const auto d_ab = filter_adjoint(g_ab, w, h);
            for (std::size_t p = 0; p < pa.size(); ++p) {
                out.gradient.data[p * 3 + c] = d_mu[p] + 2.0 * pa[p] * d_aa[p] + pb[p] * d_ab[p];
            }
        }
    }
    out.value = total * norm;
    return out;
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
    if (!a.same_shape(b) || a.empty()) {
        throw InputError("psnr: image dimensions differ");
    }
    if (!(peak > 0.0)) {
        throw InputError("psnr: peak must be positive");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        sum += d * d;
    }
    if (sum == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double mse = sum / static_cast<double>(a.data.size());
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& a, const Image& b) { return ssim_impl(a, b, false).value; }

SsimResult ssim_with_gradient(const Image& a, const Image& b) { return ssim_impl(a, b, true); }

const std::vector<double>& ssim_window() {
    static const std::vector<double> window = [] {
        const auto& g = gauss_1d();
        std::vector<double> v(kWin * kWin);
        for (int y = 0; y < kWin; ++y) {
            for (int x = 0; x < kWin; ++x) {
                v[y * kWin + x] = g[y] * g[x];
            }
        }
        return v;
    }();
    return window;
}

std::size_t train_stride(double fraction) {
    for (const std::size_t s : {1, 2, 4, 6, 8, 10}) {
        if (std::abs(fraction - 100.0 / static_cast<double>(s)) <= 0.1) {
            return s;
        }
    }
    throw ConfigError("unsupported train fraction " + std::to_string(fraction) +
                      "; expected one of 100, 50, 25, 16.6, 12.5, 10");
}

DatasetSplit split_dataset(std::size_t n, double fraction) {
    const std::size_t stride = train_stride(fraction);
    if (n < 5) {
        throw InputError("split_dataset: need at least 5 cameras, got " + std::to_string(n));
    }
    DatasetSplit out;
    std::size_t remainder = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 5 == 0) {
            out.eval.push_back(i);
        } else if (remainder++ % stride == 0) {
            out.train.push_back(i);
        }
    }
    return out;
}

ReconstructionError reconstruction_error(const GaussianMap& map, std::span<const Surface> surfaces,
                                         std::uint64_t seed) {
    if (map.empty()) {
        throw InputError("reconstruction_error: empty map");
    }
    if (surfaces.empty()) {
        throw InputError("reconstruction_error: no reference surfaces");
    }
    std::vector<double> distances;
    distances.reserve(map.size() * 3);
    for (std::size_t i = 0; i < map.size(); ++i) {
        const GaussianSplat& s = map.splats[i];
        const Mat3 r = rotation_matrix(s.rotation);
        const Vec3 scales = activated_scales(s);
        std::mt19937_64 rng(mix_seed(seed, i));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int k = 0; k < 3; ++k) {
            const double z0 = normal(rng);
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            const Vec3 p = s.position + r * Vec3(scales.x() * z0, scales.y() * z1, scales.z() * z2);
            distances.push_back(distance_to_nearest(surfaces, p));
        }
    }
    ReconstructionError out;
    out.n_samples = distances.size();
    double sum = 0.0;
    for (const double d : distances) {
        sum += d;
    }
    out.mean = sum / static_cast<double>(distances.size());
    double var = 0.0;
    for (const double d : distances) {
        var += (d - out.mean) * (d - out.mean);
    }
    out.std = std::sqrt(var / static_cast<double>(distances.size()));
    return out;
}

}  // namespace geogs
