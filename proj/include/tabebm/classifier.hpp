#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tabebm/matrix.hpp"

namespace tabebm {

/// Positives (label 1) stacked over negatives (label 0).
struct BinaryTaskDataset {
    Matrix inputs;
    std::vector<int> binary_labels;

    std::size_t positive_count() const;
};

BinaryTaskDataset build_surrogate_task(const Matrix& positives, const Matrix& negatives);

/// Logits of the two surrogate classes: f0 for negatives, f1 for real rows.
struct LogitPair {
    double f0 = 0.0;
    double f1 = 0.0;
};

struct LogitGradient {
    Vector d_f0;
    Vector d_f1;
};

inline constexpr double kKernelFloor = 1e-12;
inline constexpr double kMinBandwidth = 0.1;

struct RbfConfig {
    /// Fixed bandwidth; the median heuristic over positives is used when unset.
    std::optional<double> bandwidth;
    double kernel_floor = kKernelFloor;
    double min_bandwidth = kMinBandwidth;
};

struct MlpConfig {
    std::size_t hidden = 32;
    double learning_rate = 0.05;
    std::size_t epochs = 500;
    std::uint64_t seed = 0;
};

using BackendConfig = std::variant<RbfConfig, MlpConfig>;

/// Gaussian kernel-sum classifier: f1 = log(eps + sum_p k(x, p)) and likewise
/// f0 over the negatives, with k(x, p) = exp(-|x - p|^2 / (2 h^2)).
struct RbfModel {
    double bandwidth = 1.0;
    double kernel_floor = kKernelFloor;
    Matrix positives;
    Matrix negatives;
};

struct MlpTrainingRecord {
    std::size_t epochs = 0;
    double final_loss = 0.0;
    double training_accuracy = 0.0;
};

/// One tanh hidden layer followed by two linear outputs (the logits).
struct MlpModel {
    Matrix w1;  // hidden x D
    Vector b1;  // hidden
    Matrix w2;  // 2 x hidden
    Vector b2;  // 2
    std::uint64_t seed = 0;
    double learning_rate = 0.05;
    MlpTrainingRecord record;
};

/// Median pairwise Euclidean distance among rows, floored at `floor`.
double median_heuristic_bandwidth(const Matrix& points, double floor = kMinBandwidth);

class ClassifierModel {
public:
    using Backend = std::variant<RbfModel, MlpModel>;

    ClassifierModel() = default;
    explicit ClassifierModel(Backend backend) : backend_(std::move(backend)) {}

    std::size_t input_dim() const;

    LogitPair logits(std::span<const double> x) const;
    LogitGradient logit_gradient(std::span<const double> x) const;
    /// Logits and their input gradients from a single pass.
    LogitPair logits_with_gradient(std::span<const double> x, LogitGradient& grad) const;

    const Backend& backend() const noexcept { return backend_; }
    bool is_rbf() const noexcept { return std::holds_alternative<RbfModel>(backend_); }

    bool operator==(const ClassifierModel&) const;

private:
    void check_dim(std::span<const double> x) const;
    Backend backend_;
};

/// RBF: training-free, stores the task. MLP: full-batch gradient descent on
/// softmax cross-entropy from a seeded Glorot initialization.
ClassifierModel fit_classifier(const BinaryTaskDataset& task, const BackendConfig& config);

}  // namespace tabebm
