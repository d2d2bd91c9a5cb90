#pragma once

#include "mpa/attacks.hpp"
#include "mpa/dataset.hpp"
#include "mpa/metrics.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace mpa {

struct VictimSpec {
    enum class Kind { Standard, Msd };
    std::string name;
    Kind kind = Kind::Standard;
    TrainConfig train;
    AttackConfig adversary;  // inner adversary for Kind::Msd
    std::optional<std::string> checkpoint;
};

struct AttackSpec {
    enum class Kind { Pgd, Mpa };
    std::string name;
    Kind kind = Kind::Mpa;
    AttackConfig config;  // Pgd uses config.norms.front()
};

struct SweepConfig {
    std::string victim = "msd";
    std::vector<double> temperatures = {1.0, 0.01};
    std::vector<int> inner_iterations = {1, 5, 10, 15, 20};
    std::vector<bool> coefficient_reuse = {false, true};
    int n_examples = 0;  // 0 = whole test split
    AttackConfig base;   // norms/budgets/outer iterations of every cell
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    int jobs = 1;
    DatasetConfig dataset;
    std::vector<VictimSpec> victims;
    std::vector<AttackSpec> attacks;
    SweepConfig sweep;
    MetricsConfig metrics;
};

/// Desk-scale defaults: 8x8 synthetic images, the three-norm budget set
/// scaled from the CIFAR settings, victims standard / msd / linf_at.
ExperimentConfig default_config();

/// Desk-scale translation of the CIFAR budgets for an image of d pixels:
/// l1 scales with d, l2 with sqrt(d), linf stays fixed.
std::vector<NormBudget> desk_norm_budgets(int dim);

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

struct TrainedVictim {
    std::string name;
    MlpModel model;
};

/// Loads the victim from its checkpoint when one is configured and present,
/// otherwise trains it from the config.
TrainedVictim prepare_victim(const VictimSpec& spec, const Dataset& data);

struct ResultRow {
    std::string victim;
    std::string attack;
    double clean_accuracy = 0.0;
    double robust_accuracy = 0.0;
    double mean_iterations = 0.0;
    MetricReport metrics;
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

/// Runs one attack spec over the test slice; per-example attack seeds are
/// spec.config.seed + example index.
AttackReport run_attack_on_example(const MlpModel& model, const LabeledExample& ex,
                                   const AttackSpec& spec, std::size_t example_index);

/// Full (victim x attack) robust-accuracy matrix with success-filtered
/// imperceptibility metrics; rows in config order, deterministic for any
/// job count.
ResultTable run_attack_matrix(const ExperimentConfig& cfg, const Dataset& data,
                              const std::vector<TrainedVictim>& victims);

struct SweepRow {
    std::string victim;
    double temperature = 0.0;
    int inner_iterations = 0;
    bool coefficient_reuse = false;
    double robust_accuracy = 0.0;
    std::size_t n_evaluated = 0;
    double psnr_mean = std::numeric_limits<double>::quiet_NaN();
};

/// Hyperparameter grid over (temperature, inner iterations, reuse) on one
/// victim; long-format rows, PSNR success-filtered.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const Dataset& data,
                                const TrainedVictim& victim);

/// Report emission. CSV headers are fixed; floating-point cells use the
/// shortest round-trip decimal form, empty cell for undefined metrics.
void write_matrix_csv(const ResultTable& table, const std::filesystem::path& path);
void write_matrix_json(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_matrix_json(const std::filesystem::path& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
void write_sweep_json(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_number(double v);

/// Deterministic helper: runs fn(0..n-1) on up to `jobs` threads; callers
/// aggregate results by index so the output is independent of the job count.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace mpa
