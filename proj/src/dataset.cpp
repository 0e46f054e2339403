#include "tabebm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "tabebm/errors.hpp"
#include "tabebm/random.hpp"

namespace tabebm {

bool is_missing(double v) noexcept { return std::isnan(v); }

TabularDataset TabularDataset::select_rows(std::span<const std::size_t> indices) const {
    TabularDataset out;
    out.features = features.select_rows(indices);
    out.labels.reserve(indices.size());
    for (auto i : indices) {
        out.labels.push_back(labels[i]);
    }
    out.column_kinds = column_kinds;
    out.column_names = column_names;
    out.levels = levels;
    out.class_names = class_names;
    out.label_name = label_name;
    return out;
}

void TabularDataset::validate(bool require_all_classes) const {
    if (labels.size() != features.rows()) {
        throw SchemaError("label count does not match row count");
    }
    if (column_kinds.size() != features.cols() || column_names.size() != features.cols() ||
        levels.size() != features.cols()) {
        throw SchemaError("column metadata does not match feature width");
    }
    if (class_names.empty()) {
        throw LabelError("dataset has no classes");
    }
    std::vector<std::size_t> seen(class_count(), 0);
    for (auto y : labels) {
        if (y >= class_count()) {
            throw LabelError("label " + std::to_string(y) + " outside 0.." +
                             std::to_string(class_count() - 1));
        }
        ++seen[y];
    }
    if (require_all_classes) {
        for (std::size_t c = 0; c < seen.size(); ++c) {
            if (seen[c] == 0) {
                throw LabelError("class '" + class_names[c] + "' has no rows");
            }
        }
    }
}

bool TabularDataset::has_missing() const {
    const auto values = features.data();
    return std::any_of(values.begin(), values.end(), [](double v) { return is_missing(v); });
}

bool TabularDataset::all_numeric() const {
    return std::all_of(column_kinds.begin(), column_kinds.end(),
                       [](ColumnKind k) { return k == ColumnKind::numeric; });
}

TabularDataset make_numeric_dataset(Matrix features, std::vector<std::size_t> labels,
                                    std::size_t class_count) {
    TabularDataset ds;
    const std::size_t cols = features.cols();
    ds.features = std::move(features);
    ds.labels = std::move(labels);
    ds.column_kinds.assign(cols, ColumnKind::numeric);
    ds.levels.assign(cols, {});
    for (std::size_t j = 0; j < cols; ++j) {
        ds.column_names.push_back("x" + std::to_string(j));
    }
    for (std::size_t c = 0; c < class_count; ++c) {
        ds.class_names.push_back(std::to_string(c));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

bool is_missing_token(const std::string& s) { return s.empty() || s == "NA"; }

std::optional<double> parse_decimal(const std::string& s) {
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.push_back(trim(current));
    return fields;
}

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

TabularDataset parse_csv(const std::string& text, const std::string& label_column,
                         const std::map<std::string, ColumnKind>& kind_overrides) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (header.empty()) {
            header = split_csv_line(line);
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw SchemaError("row " + std::to_string(rows.size() + 1) + " has " +
                              std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(header.size()));
        }
        rows.push_back(std::move(fields));
    }
    if (header.empty()) {
        throw SchemaError("missing header row");
    }
    const auto label_it = std::find(header.begin(), header.end(), label_column);
    if (label_it == header.end()) {
        throw SchemaError("label column '" + label_column + "' not found");
    }
    if (rows.size() < 2) {
        throw SchemaError("need at least 2 data rows, found " + std::to_string(rows.size()));
    }
    for (const auto& [name, kind] : kind_overrides) {
        if (std::find(header.begin(), header.end(), name) == header.end()) {
            throw SchemaError("kind override for unknown column '" + name + "'");
        }
    }
    const auto label_index = static_cast<std::size_t>(label_it - header.begin());

    TabularDataset ds;
    ds.label_name = label_column;
    std::vector<std::size_t> feature_columns;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_index) {
            feature_columns.push_back(j);
            ds.column_names.push_back(header[j]);
        }
    }
    const std::size_t n = rows.size();
    const std::size_t d = feature_columns.size();
    ds.features = Matrix(n, d);
    ds.column_kinds.resize(d);
    ds.levels.resize(d);

    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t j = feature_columns[k];
        ColumnKind kind = ColumnKind::numeric;
        if (auto it = kind_overrides.find(header[j]); it != kind_overrides.end()) {
            kind = it->second;
        } else {
            for (const auto& row : rows) {
                if (!is_missing_token(row[j]) && !parse_decimal(row[j])) {
                    kind = ColumnKind::categorical;
                    break;
                }
            }
        }
        ds.column_kinds[k] = kind;
        if (kind == ColumnKind::numeric) {
            for (std::size_t i = 0; i < n; ++i) {
                if (is_missing_token(rows[i][j])) {
                    ds.features(i, k) = kMissing;
                    continue;
                }
                auto value = parse_decimal(rows[i][j]);
                if (!value) {
                    throw SchemaError("column '" + header[j] + "' row " + std::to_string(i + 1) +
                                      ": '" + rows[i][j] + "' is not numeric");
                }
                ds.features(i, k) = *value;
            }
        } else {
            std::unordered_map<std::string, std::size_t> codes;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& cell = rows[i][j];
                if (is_missing_token(cell)) {
                    ds.features(i, k) = kMissing;
                    continue;
                }
                auto [it, inserted] = codes.try_emplace(cell, ds.levels[k].size());
                if (inserted) {
                    ds.levels[k].push_back(cell);
                }
                ds.features(i, k) = static_cast<double>(it->second);
            }
        }
    }

    std::unordered_map<std::string, std::size_t> class_ids;
    ds.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = rows[i][label_index];
        if (is_missing_token(cell)) {
            throw SchemaError("row " + std::to_string(i + 1) + " has a missing label");
        }
        auto [it, inserted] = class_ids.try_emplace(cell, ds.class_names.size());
        if (inserted) {
            ds.class_names.push_back(cell);
        }
        ds.labels.push_back(it->second);
    }
    if (ds.class_names.size() < 2) {
        throw LabelError("label column '" + label_column + "' has fewer than 2 classes");
    }
    return ds;
}

TabularDataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                        const std::map<std::string, ColumnKind>& kind_overrides) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw FileError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    if (file.bad()) {
        throw FileError("error reading '" + path.string() + "'");
    }
    return parse_csv(buffer.str(), label_column, kind_overrides);
}

// ---------------------------------------------------------------------------
// Preprocessor

namespace {

double floored_population_std(std::span<const double> values, double mean) {
    double acc = 0.0;
    for (double v : values) {
        acc += (v - mean) * (v - mean);
    }
    const double s = std::sqrt(acc / static_cast<double>(values.size()));
    return std::max(s, kStdFloor);
}

double mean_of(std::span<const double> values) {
    double acc = 0.0;
    for (double v : values) {
        acc += v;
    }
    return acc / static_cast<double>(values.size());
}

// Imputed, encoded but unscaled value of cell (row, col).
double encode_cell(const ColumnStats& stats, const TabularDataset& ds, std::size_t row,
                   std::size_t col, bool is_training) {
    const double raw = ds.features(row, col);
    if (stats.kind == ColumnKind::numeric) {
        return is_missing(raw) ? stats.impute_value : raw;
    }
    bool contributed = false;
    const std::string* level = &stats.impute_level;
    if (!is_missing(raw)) {
        level = &ds.levels[col].at(static_cast<std::size_t>(raw));
        contributed = is_training;
    }
    const auto it = stats.categories.find(*level);
    if (it == stats.categories.end()) {
        return stats.fallback_mean;
    }
    const auto& cat = it->second;
    if (contributed) {
        if (cat.count <= 1) {
            return stats.fallback_mean;
        }
        return (cat.label_sum - static_cast<double>(ds.labels[row])) /
               static_cast<double>(cat.count - 1);
    }
    return cat.label_sum / static_cast<double>(cat.count);
}

}  // namespace

Preprocessor Preprocessor::fit(const TabularDataset& train) {
    if (train.rows() == 0) {
        throw SchemaError("cannot fit a preprocessor on an empty dataset");
    }
    train.validate(false);
    Preprocessor p;
    const std::size_t n = train.rows();
    p.columns_.resize(train.cols());
    for (std::size_t j = 0; j < train.cols(); ++j) {
        auto& stats = p.columns_[j];
        stats.kind = train.column_kinds[j];
        stats.name = train.column_names[j];
        if (stats.kind == ColumnKind::numeric) {
            double sum = 0.0;
            std::size_t observed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = train.features(i, j);
                if (!is_missing(v)) {
                    sum += v;
                    ++observed;
                }
            }
            if (observed == 0) {
                throw EmptyColumnError("column '" + stats.name + "' is entirely missing");
            }
            stats.impute_value = sum / static_cast<double>(observed);
        } else {
            double label_sum = 0.0;
            std::size_t observed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = train.features(i, j);
                if (is_missing(v)) {
                    continue;
                }
                auto& cat = stats.categories[train.levels[j].at(static_cast<std::size_t>(v))];
                cat.label_sum += static_cast<double>(train.labels[i]);
                ++cat.count;
                label_sum += static_cast<double>(train.labels[i]);
                ++observed;
            }
            if (observed == 0) {
                throw EmptyColumnError("column '" + stats.name + "' is entirely missing");
            }
            stats.fallback_mean = label_sum / static_cast<double>(observed);
            // std::map iterates in lexicographic order, so strict > keeps the smallest tie.
            std::size_t best = 0;
            for (const auto& [level, cat] : stats.categories) {
                if (cat.count > best) {
                    best = cat.count;
                    stats.impute_level = level;
                }
            }
        }

        Vector encoded(n);
        for (std::size_t i = 0; i < n; ++i) {
            encoded[i] = encode_cell(stats, train, i, j, true);
        }
        stats.mean = mean_of(encoded);
        stats.stddev = floored_population_std(encoded, stats.mean);
    }
    return p;
}

void Preprocessor::check_schema(const TabularDataset& ds) const {
    if (ds.cols() != columns_.size()) {
        throw SchemaMismatch("dataset has " + std::to_string(ds.cols()) +
                             " feature columns, preprocessor expects " +
                             std::to_string(columns_.size()));
    }
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (ds.column_names[j] != columns_[j].name || ds.column_kinds[j] != columns_[j].kind) {
            throw SchemaMismatch("column " + std::to_string(j) + " ('" + ds.column_names[j] +
                                 "') does not match fitted column '" + columns_[j].name + "'");
        }
    }
}

TabularDataset Preprocessor::apply(const TabularDataset& ds, bool is_training) const {
    check_schema(ds);
    TabularDataset out;
    out.features = Matrix(ds.rows(), ds.cols());
    out.labels = ds.labels;
    out.column_kinds.assign(ds.cols(), ColumnKind::numeric);
    out.column_names = ds.column_names;
    out.levels.assign(ds.cols(), {});
    out.class_names = ds.class_names;
    out.label_name = ds.label_name;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            out.features(i, j) = scale(j, encode_cell(columns_[j], ds, i, j, is_training));
        }
    }
    return out;
}

double Preprocessor::encode_level(std::size_t column, const std::string& level) const {
    const auto& stats = columns_.at(column);
    const auto it = stats.categories.find(level);
    if (it == stats.categories.end()) {
        return stats.fallback_mean;
    }
    return it->second.label_sum / static_cast<double>(it->second.count);
}

double Preprocessor::scale(std::size_t column, double value) const {
    const auto& stats = columns_[column];
    return (value - stats.mean) / stats.stddev;
}

double Preprocessor::unscale(std::size_t column, double value) const {
    const auto& stats = columns_[column];
    return value * stats.stddev + stats.mean;
}

// ---------------------------------------------------------------------------
// Splitting

std::vector<std::size_t> largest_remainder(std::span<const std::size_t> weights, std::size_t total) {
    std::vector<std::size_t> counts(weights.size(), 0);
    const auto weight_sum = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
    if (weight_sum == 0) {
        return counts;
    }
    std::vector<std::uint64_t> remainders(weights.size());
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        const auto scaled = static_cast<unsigned __int128>(weights[c]) * total;
        counts[c] = static_cast<std::size_t>(scaled / weight_sum);
        remainders[c] = static_cast<std::uint64_t>(scaled % weight_sum);
        assigned += counts[c];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainders[a] > remainders[b];
    });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
        ++counts[order[k]];
    }
    return counts;
}

std::vector<std::size_t> class_counts(std::span<const std::size_t> labels, std::size_t class_count) {
    std::vector<std::size_t> counts(class_count, 0);
    for (auto y : labels) {
        ++counts.at(y);
    }
    return counts;
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(const TabularDataset& ds) {
    std::vector<std::vector<std::size_t>> groups(ds.class_count());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        groups[ds.labels[i]].push_back(i);
    }
    return groups;
}

// Takes the first `take[c]` rows of a seeded shuffle of every class.
// Returns (selected, remaining), both sorted by source index.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> pick_per_class(
    const TabularDataset& ds, std::span<const std::size_t> take, std::uint64_t seed, Stream stream) {
    auto groups = rows_by_class(ds);
    std::vector<std::size_t> selected;
    std::vector<std::size_t> remaining;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        auto& g = groups[c];
        auto engine = make_engine(seed, stream, {c});
        std::shuffle(g.begin(), g.end(), engine);
        selected.insert(selected.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(take[c]));
        remaining.insert(remaining.end(), g.begin() + static_cast<std::ptrdiff_t>(take[c]), g.end());
    }
    std::sort(selected.begin(), selected.end());
    std::sort(remaining.begin(), remaining.end());
    return {selected, remaining};
}

}  // namespace

std::pair<TabularDataset, TabularDataset> stratified_holdout(const TabularDataset& ds,
                                                             std::size_t holdout,
                                                             std::uint64_t seed) {
    const auto counts = class_counts(ds.labels, ds.class_count());
    const auto take = largest_remainder(counts, holdout);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            continue;
        }
        if (take[c] == 0 || take[c] == counts[c]) {
            throw StratificationError("class '" + ds.class_names[c] + "' with " +
                                      std::to_string(counts[c]) +
                                      " rows cannot be split with at least one row per side");
        }
    }
    auto [held, kept] = pick_per_class(ds, take, seed, Stream::split);
    return {ds.select_rows(kept), ds.select_rows(held)};
}

std::pair<TabularDataset, TabularDataset> stratified_split(const TabularDataset& ds,
                                                           const SplitSpec& spec,
                                                           std::uint64_t seed) {
    const std::size_t test_size = std::min(ds.rows() / 2, spec.max_test_size);
    return stratified_holdout(ds, test_size, seed);
}

std::pair<TabularDataset, TabularDataset> train_validation_split(const TabularDataset& ds,
                                                                 const SplitSpec& spec,
                                                                 std::uint64_t seed) {
    const std::size_t parts = spec.train_parts + spec.val_parts;
    const std::size_t val_size = ds.rows() * spec.val_parts / parts;
    // Distinct seed from the test split so the two draws are not correlated.
    return stratified_holdout(ds, val_size, seed ^ 0x5bd1e995ULL);
}

TabularDataset subsample_stratified(const TabularDataset& ds, std::size_t n, std::uint64_t seed) {
    if (n == 0 || n > ds.rows()) {
        throw StratificationError("subset size " + std::to_string(n) + " outside 1.." +
                                  std::to_string(ds.rows()));
    }
    const auto counts = class_counts(ds.labels, ds.class_count());
    const auto take = largest_remainder(counts, n);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0 && take[c] == 0) {
            throw StratificationError("subset of " + std::to_string(n) + " leaves class '" +
                                      ds.class_names[c] + "' empty");
        }
    }
    auto [selected, unused] = pick_per_class(ds, take, seed, Stream::subsample);
    return ds.select_rows(selected);
}

Matrix class_partition(const TabularDataset& ds, std::size_t c) {
    if (c >= ds.class_count()) {
        throw ClassOutOfRange("class " + std::to_string(c) + " outside 0.." +
                              std::to_string(ds.class_count() - 1));
    }
    Matrix out;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (ds.labels[i] == c) {
            out.append_row(ds.features.row(i));
        }
    }
    if (out.cols() == 0) {
        out = Matrix(0, ds.cols());
    }
    return out;
}

Vector empirical_label_distribution(const TabularDataset& ds) {
    if (ds.rows() == 0) {
        throw SchemaError("empty dataset has no label distribution");
    }
    const auto counts = class_counts(ds.labels, ds.class_count());
    Vector p(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
        p[c] = static_cast<double>(counts[c]) / static_cast<double>(ds.rows());
    }
    return p;
}

}  // namespace tabebm
