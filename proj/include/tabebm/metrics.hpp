#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabebm/dataset.hpp"
#include "tabebm/generator.hpp"
#include "tabebm/matrix.hpp"

namespace tabebm {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// 1 / (1 + KL(real || syn)) between `bins`-bin histograms over [min(real), max(real)].
/// Synthetic values outside the range fall in the edge bins; counts get +1 smoothing.
double inverse_kl(std::span<const double> real, std::span<const double> syn, std::size_t bins = 10);

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value at
/// effective size n1 n2 / (n1 + n2).
TestResult ks_two_sample(std::span<const double> real, std::span<const double> syn);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Pearson chi-squared homogeneity test over the union of categories.
TestResult chi2_test(std::span<const std::string> real, std::span<const std::string> syn);

/// Median (lower middle for even counts) distance from each synthetic row to its
/// nearest real row.
double dcr(const Matrix& real, const Matrix& syn);

/// Nearest real-row distance for every synthetic row.
Vector nearest_real_distances(const Matrix& real, const Matrix& syn);

/// Largest share of synthetic rows falling in one cell that also holds real rows.
/// Cells come from per-dimension quantile cut points of the real data.
double delta_presence(const Matrix& real, const Matrix& syn, std::size_t bins_per_dim = 2);

struct FeatureScore {
    std::string feature;
    double value = 0.0;
};

struct MetricReport {
    std::vector<FeatureScore> inverse_kl;
    double inverse_kl_mean = 0.0;
    std::vector<FeatureScore> ks_pvalue;
    double ks_pvalue_mean = 0.0;
    std::vector<FeatureScore> chi2_pvalue;
    std::optional<double> chi2_pvalue_mean;
    double dcr_median = 0.0;
    double delta_presence = 0.0;
};

struct MetricOptions {
    std::size_t kl_bins = 10;
    std::size_t presence_bins = 2;
};

/// Compares raw real data against synthetic rows in the preprocessed space of
/// `preprocessor`. Numeric columns get inverse KL and KS; categorical columns
/// get chi-squared after mapping each synthetic value to the nearest encoded level.
MetricReport fidelity_report(const Preprocessor& preprocessor, const TabularDataset& real,
                             const SyntheticDataset& syn, const MetricOptions& options = {});

}  // namespace tabebm
