#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabebm/matrix.hpp"

namespace tabebm {

enum class ColumnKind { numeric, categorical };

/// Marker stored in the feature matrix for a missing cell.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
bool is_missing(double v) noexcept;

/// N x D table with dense class labels 0..C-1.
///
/// Categorical cells hold an index into `levels[column]`; numeric columns have
/// an empty level list. Missing cells are NaN until a Preprocessor imputes them.
struct TabularDataset {
    Matrix features;
    std::vector<std::size_t> labels;
    std::vector<ColumnKind> column_kinds;
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> levels;
    std::vector<std::string> class_names;
    std::string label_name = "label";

    std::size_t rows() const noexcept { return features.rows(); }
    std::size_t cols() const noexcept { return features.cols(); }
    std::size_t class_count() const noexcept { return class_names.size(); }

    /// Row subset; schema and class list are kept even if a class drops out.
    TabularDataset select_rows(std::span<const std::size_t> indices) const;

    /// Throws DataError subclasses when the documented invariants do not hold.
    /// `require_all_classes` toggles the "every class appears" check.
    void validate(bool require_all_classes = true) const;

    bool has_missing() const;
    bool all_numeric() const;
};

/// Builds an all-numeric dataset with generic column names x0..x{D-1} and
/// class names "0".."C-1".
TabularDataset make_numeric_dataset(Matrix features, std::vector<std::size_t> labels,
                                    std::size_t class_count);

/// Reads a comma-separated file with a header row. Cells that are empty or
/// the literal "NA" are missing. Columns whose observed cells all parse as
/// decimals are numeric, others categorical, unless overridden by name.
/// Labels are re-indexed densely in order of first appearance.
TabularDataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                        const std::map<std::string, ColumnKind>& kind_overrides = {});

/// Same as load_csv but parses an in-memory CSV document.
TabularDataset parse_csv(const std::string& text, const std::string& label_column,
                         const std::map<std::string, ColumnKind>& kind_overrides = {});

/// Splits one CSV line on commas, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

/// Formats a double with the shortest representation that round-trips.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Preprocessing

inline constexpr double kStdFloor = 1e-6;

struct CategoryStats {
    double label_sum = 0.0;
    std::size_t count = 0;
};

struct ColumnStats {
    ColumnKind kind = ColumnKind::numeric;
    std::string name;
    double impute_value = 0.0;       // numeric columns
    std::string impute_level;        // categorical columns
    double mean = 0.0;
    double stddev = 1.0;
    std::map<std::string, CategoryStats> categories;
    double fallback_mean = 0.0;
};

/// Imputation, leave-one-out target encoding and z-scoring fitted on a
/// training set and applied unchanged to any other split.
class Preprocessor {
public:
    static Preprocessor fit(const TabularDataset& train);

    /// Returns an all-numeric dataset in the standardized space. For training
    /// data each observed categorical cell is encoded leaving its own label out.
    TabularDataset apply(const TabularDataset& ds, bool is_training) const;

    /// Encoded value of a category at test time (no leave-one-out), before scaling.
    double encode_level(std::size_t column, const std::string& level) const;
    double scale(std::size_t column, double value) const;
    double unscale(std::size_t column, double value) const;

    const std::vector<ColumnStats>& columns() const noexcept { return columns_; }
    std::size_t cols() const noexcept { return columns_.size(); }

    /// Throws SchemaMismatch unless names and kinds line up with the fitted schema.
    void check_schema(const TabularDataset& ds) const;

private:
    std::vector<ColumnStats> columns_;
};

// ---------------------------------------------------------------------------
// Splitting

/// Experimental protocol constants.
struct SplitSpec {
    std::size_t max_test_size = 500;
    std::vector<std::size_t> subset_sizes = {20, 50, 100, 200, 500};
    std::size_t train_parts = 4;  // train:validation = 4:1
    std::size_t val_parts = 1;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
};

/// Integer apportionment of `total` proportionally to non-negative integer
/// weights by largest remainder. Ties go to the lower index.
std::vector<std::size_t> largest_remainder(std::span<const std::size_t> weights, std::size_t total);

/// Test size min(floor(N/2), max_test_size), per-class counts by largest remainder.
std::pair<TabularDataset, TabularDataset> stratified_split(const TabularDataset& ds,
                                                           const SplitSpec& spec,
                                                           std::uint64_t seed);

/// Splits into (train, validation) at the spec's train:validation ratio.
std::pair<TabularDataset, TabularDataset> train_validation_split(const TabularDataset& ds,
                                                                 const SplitSpec& spec,
                                                                 std::uint64_t seed);

/// Moves `holdout` rows, stratified by class, into the second returned part.
std::pair<TabularDataset, TabularDataset> stratified_holdout(const TabularDataset& ds,
                                                             std::size_t holdout,
                                                             std::uint64_t seed);

TabularDataset subsample_stratified(const TabularDataset& ds, std::size_t n, std::uint64_t seed);

/// Rows with label c in source order.
Matrix class_partition(const TabularDataset& ds, std::size_t c);

Vector empirical_label_distribution(const TabularDataset& ds);

std::vector<std::size_t> class_counts(std::span<const std::size_t> labels, std::size_t class_count);

}  // namespace tabebm
