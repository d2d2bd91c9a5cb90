#include "mpa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpa {

double psnr(const Vec& x, const Vec& x_adv) {
    if (x.size() != x_adv.size()) throw std::invalid_argument("psnr: shape mismatch");
    const double peak = x.cwiseAbs().maxCoeff();
    if (peak == 0.0) throw std::invalid_argument("psnr: all-zero reference image");
    const double sq = (x_adv - x).squaredNorm();
    if (sq == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(peak) - 10.0 * std::log10(sq) +
           10.0 * std::log10(static_cast<double>(x.size()));
}

namespace {

struct WindowStats {
    double mean_x, mean_y, var_x, var_y, cov;
};

// Population moments over one window with uniform weights.
WindowStats window_stats(const Vec& x, const Vec& y, int width, int r0, int c0, int h, int w) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const double n = static_cast<double>(h) * static_cast<double>(w);
    for (int r = r0; r < r0 + h; ++r) {
        for (int c = c0; c < c0 + w; ++c) {
            const double a = x[r * width + c];
            const double b = y[r * width + c];
            sx += a;
            sy += b;
            sxx += a * a;
            syy += b * b;
            sxy += a * b;
        }
    }
    WindowStats s;
    s.mean_x = sx / n;
    s.mean_y = sy / n;
    s.var_x = sxx / n - s.mean_x * s.mean_x;
    s.var_y = syy / n - s.mean_y * s.mean_y;
    s.cov = sxy / n - s.mean_x * s.mean_y;
    return s;
}

double ssim_of(const WindowStats& s) {
    constexpr double c1 = 0.01 * 0.01;  // (0.01 L)^2 with L = 1
    constexpr double c2 = 0.03 * 0.03;
    return ((2.0 * s.mean_x * s.mean_y + c1) * (2.0 * s.cov + c2)) /
           ((s.mean_x * s.mean_x + s.mean_y * s.mean_y + c1) * (s.var_x + s.var_y + c2));
}

}  // namespace

double ssim(const Vec& x, const Vec& y, int height, int width) {
    if (x.size() != y.size()) throw std::invalid_argument("ssim: shape mismatch");
    if (static_cast<Index>(height) * width != x.size())
        throw std::invalid_argument("ssim: dimensions do not match vector length");
    if (height < 11 || width < 11) return ssim_of(window_stats(x, y, width, 0, 0, height, width));

    constexpr int win = 8;
    double sum = 0.0;
    int count = 0;
    for (int r = 0; r + win <= height; ++r) {
        for (int c = 0; c + win <= width; ++c) {
            sum += ssim_of(window_stats(x, y, width, r, c, win, win));
            ++count;
        }
    }
    return sum / count;
}

namespace {

struct PointMass {
    double row, col;  // grid coordinates scaled to [0,1]
    double mass;
};

std::vector<PointMass> normalized_support(const Vec& plane, int height, int width) {
    const double total = plane.sum();
    if (!(total > 0.0)) throw std::invalid_argument("wasserstein: zero-mass input");
    std::vector<PointMass> pts;
    pts.reserve(static_cast<std::size_t>(plane.size()));
    const double rs = height > 1 ? 1.0 / (height - 1) : 0.0;
    const double cs = width > 1 ? 1.0 / (width - 1) : 0.0;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double m = plane[r * width + c];
            if (m > 0.0) pts.push_back({r * rs, c * cs, m / total});
        }
    }
    return pts;
}

double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double t : v) s += std::exp(t - m);
    return m + std::log(s);
}

double sinkhorn_cost(const std::vector<PointMass>& a, const std::vector<PointMass>& b, double reg,
                     int iterations) {
    const std::size_t na = a.size(), nb = b.size();
    std::vector<double> cost(na * nb);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const double dr = a[i].row - b[j].row;
            const double dc = a[i].col - b[j].col;
            cost[i * nb + j] = dr * dr + dc * dc;
        }
    }
    std::vector<double> f(na, 0.0), g(nb, 0.0), scratch(std::max(na, nb));
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < na; ++i) {
            scratch.resize(nb);
            for (std::size_t j = 0; j < nb; ++j)
                scratch[j] = (g[j] - cost[i * nb + j]) / reg;
            f[i] = reg * (std::log(a[i].mass) - log_sum_exp(scratch));
        }
        for (std::size_t j = 0; j < nb; ++j) {
            scratch.resize(na);
            for (std::size_t i = 0; i < na; ++i)
                scratch[i] = (f[i] - cost[i * nb + j]) / reg;
            g[j] = reg * (std::log(b[j].mass) - log_sum_exp(scratch));
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            total += std::exp((f[i] + g[j] - cost[i * nb + j]) / reg) * cost[i * nb + j];
    return total;
}

}  // namespace

double wasserstein(const Vec& x, const Vec& y, int height, int width, double reg, int iterations,
                   int channels) {
    if (x.size() != y.size()) throw std::invalid_argument("wasserstein: shape mismatch");
    if (channels < 1) throw std::invalid_argument("wasserstein: channels must be >= 1");
    const Index plane = static_cast<Index>(height) * width;
    if (plane * channels != x.size())
        throw std::invalid_argument("wasserstein: dimensions do not match vector length");
    if (reg <= 0.0) throw std::invalid_argument("wasserstein: reg must be positive");
    if ((x.array() < 0.0).any() || (y.array() < 0.0).any())
        throw std::invalid_argument("wasserstein: images must be nonnegative");

    double sum = 0.0;
    for (int ch = 0; ch < channels; ++ch) {
        const Vec xa = x.segment(ch * plane, plane);
        const Vec ya = y.segment(ch * plane, plane);
        sum += sinkhorn_cost(normalized_support(xa, height, width),
                             normalized_support(ya, height, width), reg, iterations);
    }
    return sum / channels;
}

MetricReport filtered_metrics(const MlpModel& model, std::span<const LabeledExample> clean_set,
                              const AttackFn& attack, const MetricsConfig& cfg) {
    if (clean_set.empty()) throw std::invalid_argument("filtered_metrics: empty clean set");
    MetricReport out;
    double psnr_sum = 0, ssim_sum = 0, wd_sum = 0;
    for (const auto& ex : clean_set) {
        if (model.predict(ex.x) != ex.label) continue;  // originally misclassified
        const AttackReport rep = attack(model, ex);
        if (!rep.success) continue;
        psnr_sum += psnr(ex.x, rep.x_adv);
        ssim_sum += ssim(ex.x, rep.x_adv, cfg.height, cfg.width);
        wd_sum += wasserstein(ex.x, rep.x_adv, cfg.height, cfg.width, cfg.wd_reg,
                              cfg.wd_iterations);
        ++out.n_evaluated;
    }
    if (out.n_evaluated > 0) {
        const double n = static_cast<double>(out.n_evaluated);
        out.psnr_mean = psnr_sum / n;
        out.ssim_mean = ssim_sum / n;
        out.wd_mean = wd_sum / n;
    }
    return out;
}

}  // namespace mpa
