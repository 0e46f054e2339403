#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tabebm/classifier.hpp"
#include "tabebm/ebm.hpp"
#include "tabebm/generator.hpp"
#include "tabebm/harness.hpp"
#include "tabebm/metrics.hpp"
#include "tabebm/sampler.hpp"

namespace tabebm::io {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// Classifier as {backend, ...}; RBF stores bandwidth, kernel floor and the
/// task rows, MLP stores its weights. Doubles round-trip exactly.
Json classifier_to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const Json& j);

Json ebm_to_json(const ClassEBM& ebm);
ClassEBM ebm_from_json(const Json& j);

/// JSON array of per-class objects {class_id, sigma, negatives, classifier}.
Json ebm_bundle_to_json(std::span<const ClassEBM> ebms);
std::vector<ClassEBM> ebm_bundle_from_json(const Json& j);

Json sgld_to_json(const SGLDConfig& cfg);
Json negatives_to_json(const NegativeSampleConfig& cfg);
Json backend_to_json(const BackendConfig& cfg);
Json metadata_to_json(const GenerationMetadata& meta);

Json report_to_json(const MetricReport& report);
/// Flat (metric, feature, value) table; aggregate rows use an empty feature.
std::string report_to_csv(const MetricReport& report);

/// Feature columns followed by the label column, labels written as class names.
std::string synthetic_to_csv(const SyntheticDataset& syn);

/// Columns dataset, size, seed, predictor, condition, balanced_accuracy.
std::string results_to_csv(const ExperimentResult& result);
Json summary_to_json(const ExperimentResult& result);

/// Columns radius, mean_f0, mean_f1, mean_energy, mean_relative_density.
std::string profile_to_csv(const std::vector<ProfileRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace tabebm::io
