#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tabebm/dataset.hpp"
#include "tabebm/ebm.hpp"
#include "tabebm/sampler.hpp"

namespace tabebm {

struct EmpiricalDistribution {};
struct UniformDistribution {};
struct ExplicitDistribution {
    Vector probabilities;
};
using ClassDistribution = std::variant<EmpiricalDistribution, UniformDistribution, ExplicitDistribution>;

enum class AllocationMode { exact_stratified, sampled };

struct GenerationRequest {
    std::size_t total = 500;
    ClassDistribution distribution = EmpiricalDistribution{};
    AllocationMode mode = AllocationMode::exact_stratified;
    std::uint64_t seed = 0;
};

struct GenerationMetadata {
    std::uint64_t seed = 0;
    AllocationMode mode = AllocationMode::exact_stratified;
    std::string distribution;  // "empirical", "uniform" or "explicit"
    Vector probabilities;
    std::vector<std::size_t> class_counts;
    std::vector<std::uint64_t> class_seeds;
    SGLDConfig sgld;
    bool inverse_transformed = false;
    std::vector<std::string> warnings;
};

/// Generated rows, ordered by class id and then chain index.
struct SyntheticDataset {
    Matrix features;
    std::vector<std::size_t> labels;
    std::vector<std::string> column_names;
    std::vector<std::string> class_names;
    std::string label_name = "label";
    GenerationMetadata metadata;
    /// Per-class energy summaries, filled when the SGLD config records a trace.
    std::vector<std::vector<EnergyTraceRow>> energy_traces;

    std::size_t rows() const noexcept { return features.rows(); }
};

/// Largest-remainder apportionment of `total` rows over a probability vector;
/// remainders that agree within 1e-9 are tied and go to the lower class id.
std::vector<std::size_t> allocate_class_counts(std::span<const double> distribution, std::size_t total);

/// Probability vector for a request against a training set.
Vector resolve_distribution(const ClassDistribution& distribution, const TabularDataset& train);

/// Runs one SGLD pipeline per class over `train` (preprocessed space); class c
/// uses seed req.seed ^ c for its chains.
SyntheticDataset generate(std::span<const ClassEBM> ebms, const TabularDataset& train,
                          const GenerationRequest& req, const SGLDConfig& sgld);

/// Undoes z-scoring. Leave-one-out encoded columns stay numeric, get an
/// "_encoded" suffix and a metadata warning.
SyntheticDataset inverse_transform(const Preprocessor& preprocessor, const SyntheticDataset& syn);

/// View of a synthetic set as an all-numeric TabularDataset.
TabularDataset to_tabular(const SyntheticDataset& syn);

}  // namespace tabebm
