#pragma once

#include "mpa/attacks.hpp"
#include "mpa/types.hpp"

#include <functional>
#include <span>

namespace mpa {

/// Peak signal-to-noise ratio in dB:
///   20 log10 ||x||_inf - 10 log10 ||x_adv - x||_2^2 + 10 log10 d.
/// Returns +infinity for an unchanged image; throws for an all-zero x.
double psnr(const Vec& x, const Vec& x_adv);

/// Structural similarity with C1 = (0.01)^2, C2 = (0.03)^2 on [0,1] images.
/// A single global window for images smaller than 11x11, otherwise the mean
/// over 8x8 sliding windows (stride 1, uniform weights).
double ssim(const Vec& x, const Vec& y, int height, int width);

/// Entropic-regularized transport cost between the two images viewed as
/// probability distributions over the pixel grid (coordinates normalized to
/// [0,1]^2, squared-Euclidean ground cost), via log-domain Sinkhorn updates.
/// Multi-channel inputs (planes concatenated) are normalized per channel and
/// averaged. Throws on zero-mass input.
double wasserstein(const Vec& x, const Vec& y, int height, int width, double reg = 0.01,
                   int iterations = 200, int channels = 1);

struct MetricsConfig {
    int height = 8;
    int width = 8;
    double wd_reg = 0.01;
    int wd_iterations = 200;
};

/// Success-filtered metric means. `n_evaluated` counts the examples that were
/// both correctly classified clean and successfully attacked; the means are
/// NaN when that filter is empty.
struct MetricReport {
    std::size_t n_evaluated = 0;
    double psnr_mean = std::numeric_limits<double>::quiet_NaN();
    double ssim_mean = std::numeric_limits<double>::quiet_NaN();
    double wd_mean = std::numeric_limits<double>::quiet_NaN();

    bool empty() const { return n_evaluated == 0; }
};

using AttackFn = std::function<AttackReport(const MlpModel&, const LabeledExample&)>;

/// Runs the attack over the clean set and averages the imperceptibility
/// metrics over examples that pass both filters: originally correctly
/// predicted, and successfully attacked.
MetricReport filtered_metrics(const MlpModel& model, std::span<const LabeledExample> clean_set,
                              const AttackFn& attack, const MetricsConfig& cfg);

}  // namespace mpa
