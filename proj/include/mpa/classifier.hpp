#pragma once

#include "mpa/types.hpp"

#include <filesystem>
#include <functional>
#include <random>
#include <span>

namespace mpa {

struct LrPoint {
    double fraction = 0.0;  // position in [0,1] of the training run
    double rate = 0.0;
};

/// Piecewise-linear interpolation through the schedule points.
double learning_rate_at(const std::vector<LrPoint>& schedule, double fraction);

struct TrainConfig {
    int epochs = 50;
    int batch_size = 128;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    // Triangular default: ramp to 0.1 at 40% of the run, then decay to 0.
    std::vector<LrPoint> lr_schedule = {{0.0, 0.0}, {0.4, 0.1}, {1.0, 0.0}};
    std::vector<int> hidden = {64, 64};
    std::uint64_t seed = 0;
};

/// Rectifier MLP with dense layers; the last layer emits raw logits.
class MlpModel {
public:
    struct Layer {
        Mat weight;  // [n_out x n_in]
        Vec bias;    // [n_out]
    };

    MlpModel() = default;

    /// Seeded uniform init in [-sqrt(6/fan_in), +sqrt(6/fan_in)].
    MlpModel(int input_dim, const std::vector<int>& hidden, int class_count,
             std::uint64_t seed);

    Index input_dim() const { return layers_.empty() ? 0 : layers_.front().weight.cols(); }
    Index class_count() const { return layers_.empty() ? 0 : layers_.back().weight.rows(); }

    Vec forward(const Vec& x) const;
    int predict(const Vec& x) const;  // argmax of logits, lowest index on ties

    /// d(loss)/dx at (x, label), exact reverse mode.
    Vec input_gradient(const Vec& x, int label) const;

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

private:
    std::vector<Layer> layers_;
};

/// Softmax cross-entropy with max-subtraction.
double cross_entropy(const Vec& logits, int label);

double mean_loss(const MlpModel& model, std::span<const LabeledExample> batch);

/// Mean gradients of the batch loss with respect to every weight and bias.
std::vector<MlpModel::Layer> param_gradient(const MlpModel& model,
                                            std::span<const LabeledExample> batch);

/// Plain SGD training with momentum and weight decay; deterministic per seed.
MlpModel train_standard(const std::vector<LabeledExample>& data, const TrainConfig& cfg);

/// Called with each adversarial example generated during robust training,
/// in batch order. Used by tests to assert the shared adversary code path.
struct TrainHooks {
    std::function<void(const MlpModel& model, const LabeledExample& clean, const Vec& adversary)>
        on_adversary;
};

/// Adversarial training: every batch is replaced by multi-steepest-descent
/// adversaries before the parameter step. With atk.iterations == 0 this is
/// exactly train_standard.
MlpModel train_msd(const std::vector<LabeledExample>& data, const TrainConfig& cfg,
                   const AttackConfig& atk, const TrainHooks* hooks = nullptr);

/// Checkpoint container: layer shapes, parameters as 64-bit floats, and the
/// training config. save -> load -> save is byte-identical.
void save_checkpoint(const MlpModel& model, const TrainConfig& cfg,
                     const std::filesystem::path& path);
std::pair<MlpModel, TrainConfig> load_checkpoint(const std::filesystem::path& path);

double clean_accuracy(const MlpModel& model, std::span<const LabeledExample> data);

}  // namespace mpa
