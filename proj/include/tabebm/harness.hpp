#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tabebm/dataset.hpp"
#include "tabebm/ebm.hpp"
#include "tabebm/generator.hpp"
#include "tabebm/sampler.hpp"

namespace tabebm {

// ---------------------------------------------------------------------------
// Downstream predictors

struct LogisticRegressionSpec {
    double learning_rate = 0.1;
    std::size_t epochs = 500;
    std::size_t patience = 20;
};

struct KnnSpec {
    std::size_t k = 5;
};

using PredictorSpec = std::variant<LogisticRegressionSpec, KnnSpec>;

std::string predictor_name(const PredictorSpec& spec);

/// Multinomial softmax regression; weights are classes x D.
struct LogisticModel {
    Matrix weights;
    Vector bias;
    std::size_t best_epoch = 0;
    std::size_t stopped_epoch = 0;
    double best_validation_accuracy = 0.0;
};

struct KnnModel {
    Matrix points;
    std::vector<std::size_t> labels;
    std::size_t k = 5;
    std::size_t classes = 0;
};

using PredictorModel = std::variant<LogisticModel, KnnModel>;

/// Logistic regression trains by full-batch gradient descent from zero weights
/// and keeps the weights of the epoch with the best validation balanced
/// accuracy, stopping after `patience` epochs without improvement.
PredictorModel fit_predictor(const PredictorSpec& spec, const TabularDataset& train,
                             const TabularDataset& val);

/// Class scores (logits) of a logistic model, rows x classes.
Matrix logistic_scores(const LogisticModel& model, const Matrix& x);

/// Logistic: argmax score, ties to the lower class. k-NN: majority of the k
/// nearest rows, ties to the tied class whose member is nearest.
std::vector<std::size_t> predict_labels(const PredictorModel& model, const Matrix& x);

/// Mean per-class recall over the classes present in y_true.
double balanced_accuracy(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred);

// ---------------------------------------------------------------------------
// Experiments

enum class ExperimentMode { augmentation, sharing };
enum class ValidationSource { real, synthetic };

struct ExperimentConfig {
    std::string dataset_name = "dataset";
    TabularDataset data;  // raw rows; preprocessing is fitted per run
    std::vector<std::size_t> sizes = {20};
    std::size_t n_syn = 500;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
    std::vector<PredictorSpec> predictors = {LogisticRegressionSpec{}, KnnSpec{}};
    ExperimentMode mode = ExperimentMode::augmentation;
    ValidationSource sharing_validation = ValidationSource::real;
    SplitSpec split;
    NegativeSampleConfig negatives;
    BackendConfig backend = RbfConfig{};
    SGLDConfig sgld;
};

struct ExperimentRecord {
    std::string dataset;
    std::size_t size = 0;
    std::uint64_t seed = 0;
    std::string predictor;
    std::string condition;  // "baseline" or "tabebm"
    double balanced_accuracy = 0.0;

    bool operator==(const ExperimentRecord&) const = default;
};

struct ConditionSummary {
    std::size_t size = 0;
    std::string predictor;
    std::string condition;
    std::size_t runs = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double adtm = 0.0;
};

struct ExperimentResult {
    std::string dataset;
    std::vector<ExperimentRecord> records;  // ordered by (size, seed, predictor, condition)
    std::vector<ConditionSummary> summary;
    /// Mean ADTM over sizes, keyed "predictor/condition".
    std::map<std::string, double> adtm_aggregate;
};

/// Training rows of the tabebm condition: real + synthetic when augmenting,
/// synthetic only when sharing.
TabularDataset assemble_training_set(const TabularDataset& real_train, const SyntheticDataset& syn,
                                     ExperimentMode mode);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Affine rescaling of one dataset's scores to [0, 1] between its worst and
/// best condition; all 1.0 when every score is equal.
std::map<std::string, double> adtm_normalize(const std::map<std::string, double>& scores);

/// Mean normalized score per condition across datasets.
std::map<std::string, double> adtm_aggregate(const std::vector<std::map<std::string, double>>& per_dataset);

// ---------------------------------------------------------------------------
// Energy diagnostics

struct ProfileRow {
    double radius = 0.0;
    double mean_f0 = 0.0;
    double mean_f1 = 0.0;
    double mean_max_logit = 0.0;
    double mean_energy = 0.0;
    double mean_relative_density = 0.0;

    bool operator==(const ProfileRow&) const = default;
};

/// Logits and energy at points a fixed distance from real rows, along random
/// directions. Relative density is exp(-(E - E_min)) with E_min taken over the
/// whole table.
std::vector<ProfileRow> energy_distance_profile(const ClassEBM& ebm, const Matrix& class_rows,
                                                std::span<const double> radii,
                                                std::size_t directions_per_radius, std::uint64_t seed);

}  // namespace tabebm
