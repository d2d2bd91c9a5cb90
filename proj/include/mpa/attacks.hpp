#pragma once

#include "mpa/classifier.hpp"
#include "mpa/lp_geometry.hpp"
#include "mpa/types.hpp"

#include <functional>

namespace mpa {

/// Per-example attack outcome.
struct AttackReport {
    bool success = false;
    int iterations_used = 0;
    Vec x_adv;
    /// Pixels assigned to each norm (attack config order) at the final
    /// iteration; sums to d.
    std::vector<Index> assignment_counts;
    double final_loss = 0.0;
};

/// Observes the per-iteration candidate selection of the multi-steepest-descent
/// adversary (candidate losses in config norm order, and the chosen index).
struct MsdHook {
    std::function<void(int iteration, const std::vector<double>& candidate_losses,
                       std::size_t chosen)>
        on_select;
};

/// Observes the adversarial state after every combine/projection step of the
/// mixed attack; `assignment[i]` is the norm index (config order) pixel i used.
struct MpaHook {
    std::function<void(int iteration, const Vec& x_adv, const std::vector<int>& assignment)>
        after_combine;
};

/// Projected gradient ascent under a single norm with early stop on
/// misclassification. `topk` = 0 picks the default l1 sparsity.
AttackReport pgd_attack(const MlpModel& model, const LabeledExample& ex, Norm p, double eps,
                        double step, int iterations, Index topk = 0);

/// Multi-steepest-descent adversary: per iteration, build one candidate per
/// norm and keep the one with the highest loss. No early stop (training-time
/// adversary).
Vec msd_adversary(const MlpModel& model, const LabeledExample& ex, const AttackConfig& cfg,
                  const MsdHook* hook = nullptr);

/// softmax(row / tau) with max-subtraction; tau > 0.
Vec temperature_softmax(const Vec& row, double tau);

/// Row-wise temperature softmax of the coefficient tensor [d x |P|].
Mat softmax_rows(const Mat& c, double tau);

/// Per-pixel soft mixture of the per-norm ascent directions:
/// mix_i = sum_p softmax(c_i/tau)_p * dirs(i, p).
Vec mixed_perturbation(const Mat& c, const Mat& dirs, double tau);

/// One gradient-ascent step on the coefficient tensor, differentiating the
/// loss at x_adv + mixed_perturbation(c, dirs, tau) through the soft mixture.
Mat coefficient_ascent_step(const MlpModel& model, const Vec& x_adv, const LabeledExample& ex,
                            const Mat& c, const Mat& dirs, const AttackConfig& cfg);

/// Hard per-pixel norm choice: argmax over the coefficient row, ties resolved
/// toward the earliest norm in config order.
std::vector<int> norm_assignment(const Mat& c);

/// Adds each norm's direction on its assigned pixel set, projects every
/// sub-perturbation onto its own epsilon-ball, and clips the result to [0,1].
Vec combine_and_project(const Vec& x_adv, const Vec& x, const Mat& c, const Mat& dirs,
                        const AttackConfig& cfg);

/// The mixed-norm attack: per outer iteration, per-norm steepest ascents, an
/// inner coefficient-optimization loop, then the hard combine/projection.
/// Early-stops on misclassification. With a single norm this follows exactly
/// the same arithmetic as pgd_attack.
AttackReport mpa_attack(const MlpModel& model, const LabeledExample& ex, const AttackConfig& cfg,
                        const MpaHook* hook = nullptr);

}  // namespace mpa
