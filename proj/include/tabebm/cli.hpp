#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "tabebm/ebm.hpp"
#include "tabebm/sampler.hpp"

namespace tabebm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kRuntimeError = 3 };

/// Fully resolved settings of one invocation. Every field has the documented
/// default; a JSON config file overrides defaults and flags override both.
struct CliConfig {
    std::string command;
    std::string config_path;
    bool print_config = false;
    std::uint64_t seed = 0;
    std::size_t threads = 0;

    std::string input;
    std::string label_col;
    std::string out;
    std::string backend = "rbf";
    std::string sigma_source = "per_class";
    NegativeSampleConfig negatives;
    SGLDConfig sgld;

    // generate
    std::size_t num_samples = 500;
    std::string distribution = "empirical";  // empirical | uniform | JSON array
    std::string allocation = "exact_stratified";
    bool inverse_transform = false;
    std::string energy_trace;

    // evaluate
    std::string real;
    std::string synthetic;
    std::string out_csv;
    std::string space = "preprocessed";
    std::size_t kl_bins = 10;
    std::size_t presence_bins = 2;

    // diagnose
    std::size_t class_id = 0;
    std::vector<double> radii = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t directions = 200;

    // benchmark
    std::string out_dir;
    std::string dataset;
    std::vector<std::size_t> sizes = {20};
    std::size_t repeats = 10;
    std::vector<std::string> predictors = {"logistic_regression", "knn"};
    std::string experiment_mode = "augmentation";
    std::string sharing_validation = "real";
    std::size_t toy_rows_per_class = 500;
    std::size_t toy_dims = 5;
    std::size_t knn_k = 5;
    double lr_learning_rate = 0.1;
    std::size_t lr_epochs = 500;
    std::size_t lr_patience = 20;
};

/// Parses argv (argv[0] is the program name). Throws UsageError for unknown
/// commands or flags and ConfigError for malformed or unknown config entries.
/// Returns a config with command "help" when --help was requested.
CliConfig parse_config(const std::vector<std::string>& args);

nlohmann::json config_to_json(const CliConfig& cfg);

/// Executes a parsed config; library errors propagate as exceptions.
void dispatch(const CliConfig& cfg, std::ostream& out);

/// parse_config + dispatch with errors mapped to exit codes and reported on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tabebm::cli
