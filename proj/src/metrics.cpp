#include "tabebm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "tabebm/errors.hpp"
#include "tabebm/parallel.hpp"

namespace tabebm {

namespace {

void require_nonempty(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.empty() || b.empty()) {
        throw LengthMismatch(std::string(what) + " needs two non-empty samples");
    }
}

std::size_t bin_of(double v, double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || v <= lo) {
        return v > hi ? bins - 1 : 0;
    }
    if (v >= hi) {
        return bins - 1;
    }
    const auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    return std::min(b, bins - 1);
}

}  // namespace

double inverse_kl(std::span<const double> real, std::span<const double> syn, std::size_t bins) {
    require_nonempty(real, syn, "inverse_kl");
    if (bins == 0) {
        throw LengthMismatch("inverse_kl needs at least one bin");
    }
    const auto [lo_it, hi_it] = std::minmax_element(real.begin(), real.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> real_counts(bins, 1.0);
    std::vector<double> syn_counts(bins, 1.0);
    for (double v : real) {
        real_counts[bin_of(v, lo, hi, bins)] += 1.0;
    }
    for (double v : syn) {
        syn_counts[bin_of(v, lo, hi, bins)] += 1.0;
    }
    const double real_total = static_cast<double>(real.size() + bins);
    const double syn_total = static_cast<double>(syn.size() + bins);
    double kl = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double p = real_counts[b] / real_total;
        const double q = syn_counts[b] / syn_total;
        kl += p * std::log(p / q);
    }
    // Tiny negative values are rounding noise around identical histograms.
    return 1.0 / (1.0 + std::max(kl, 0.0));
}

double kolmogorov_survival(double lambda) {
    if (!(lambda > 0.0)) {
        return 1.0;
    }
    double p = 0.0;
    if (lambda < 1.0) {
        // Theta-function form of the same distribution; the alternating series
        // below converges too slowly for small arguments.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double cdf = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
            cdf += term;
            if (term < 1e-300) {
                break;
            }
        }
        cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
        p = 1.0 - cdf;
    } else {
        double sign = 1.0;
        for (int k = 1; k <= 100; ++k) {
            p += sign * std::exp(-2.0 * k * k * lambda * lambda);
            sign = -sign;
        }
        p *= 2.0;
    }
    return std::clamp(p, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> real, std::span<const double> syn) {
    require_nonempty(real, syn, "ks_two_sample");
    Vector a(real.begin(), real.end());
    Vector b(syn.begin(), syn.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == t) {
            ++i;
        }
        while (j < b.size() && b[j] == t) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    // Once one sample is exhausted the remaining gap only shrinks toward 0.
    const double effective = na * nb / (na + nb);
    return {d, kolmogorov_survival(std::sqrt(effective) * d)};
}

TestResult chi2_test(std::span<const std::string> real, std::span<const std::string> syn) {
    if (real.empty() || syn.empty()) {
        throw LengthMismatch("chi2_test needs two non-empty samples");
    }
    std::map<std::string, std::pair<double, double>> table;
    for (const auto& v : real) {
        table[v].first += 1.0;
    }
    for (const auto& v : syn) {
        table[v].second += 1.0;
    }
    if (table.size() < 2) {
        throw DegenerateTable("chi-squared test needs at least two categories");
    }
    const double n_real = static_cast<double>(real.size());
    const double n_syn = static_cast<double>(syn.size());
    const double n = n_real + n_syn;
    double stat = 0.0;
    for (const auto& [level, counts] : table) {
        const double column = counts.first + counts.second;
        const double exp_real = n_real * column / n;
        const double exp_syn = n_syn * column / n;
        stat += (counts.first - exp_real) * (counts.first - exp_real) / exp_real;
        stat += (counts.second - exp_syn) * (counts.second - exp_syn) / exp_syn;
    }
    const double dof = static_cast<double>(table.size() - 1);
    const double p = stat > 0.0 ? boost::math::gamma_q(dof / 2.0, stat / 2.0) : 1.0;
    return {stat, std::clamp(p, 0.0, 1.0)};
}

Vector nearest_real_distances(const Matrix& real, const Matrix& syn) {
    if (real.rows() == 0 || syn.rows() == 0) {
        throw LengthMismatch("distance to closest record needs non-empty inputs");
    }
    if (real.cols() != syn.cols()) {
        throw DimensionMismatch("real has " + std::to_string(real.cols()) + " columns, synthetic " +
                                std::to_string(syn.cols()));
    }
    // Real rows sorted by their first coordinate; the search walks outward from
    // the query's position and stops once the first-coordinate gap alone
    // exceeds the best distance found.
    std::vector<std::size_t> order(real.rows());
    std::iota(order.begin(), order.end(), 0);
    const bool has_cols = real.cols() > 0;
    if (has_cols) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return real(a, 0) < real(b, 0); });
    }
    Vector keys(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        keys[k] = has_cols ? real(order[k], 0) : 0.0;
    }
    Vector out(syn.rows());
    parallel_for(syn.rows(), [&](std::size_t s) {
        auto q = syn.row(s);
        const double key = has_cols ? q[0] : 0.0;
        const auto start = static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), key) -
                                                    keys.begin());
        double best = std::numeric_limits<double>::infinity();
        auto visit = [&](std::size_t k) {
            const double gap = keys[k] - key;
            if (gap * gap > best) {
                return false;
            }
            best = std::min(best, squared_distance(q, real.row(order[k])));
            return true;
        };
        for (std::size_t k = start; k < keys.size(); ++k) {
            if (!visit(k)) {
                break;
            }
        }
        for (std::size_t k = start; k-- > 0;) {
            if (!visit(k)) {
                break;
            }
        }
        out[s] = std::sqrt(best);
    });
    return out;
}

double dcr(const Matrix& real, const Matrix& syn) {
    Vector d = nearest_real_distances(real, syn);
    const std::size_t mid = (d.size() - 1) / 2;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
    return d[mid];
}

namespace {

// Linear-interpolation quantile of sorted data.
double quantile_sorted(const Vector& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double delta_presence(const Matrix& real, const Matrix& syn, std::size_t bins_per_dim) {
    if (real.rows() == 0 || syn.rows() == 0) {
        throw LengthMismatch("delta-presence needs non-empty inputs");
    }
    if (real.cols() != syn.cols()) {
        throw DimensionMismatch("real has " + std::to_string(real.cols()) + " columns, synthetic " +
                                std::to_string(syn.cols()));
    }
    if (bins_per_dim == 0) {
        throw LengthMismatch("delta-presence needs at least one bin per dimension");
    }
    const std::size_t dim = real.cols();
    std::vector<Vector> cuts(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        Vector col = real.column(d);
        std::sort(col.begin(), col.end());
        for (std::size_t k = 1; k < bins_per_dim; ++k) {
            cuts[d].push_back(
                quantile_sorted(col, static_cast<double>(k) / static_cast<double>(bins_per_dim)));
        }
    }
    // A value equal to a cut point falls in the lower cell.
    auto cell_of = [&](std::span<const double> x) {
        std::vector<std::size_t> cell(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            cell[d] =
                static_cast<std::size_t>(std::lower_bound(cuts[d].begin(), cuts[d].end(), x[d]) -
                                         cuts[d].begin());
        }
        return cell;
    };
    std::map<std::vector<std::size_t>, std::size_t> syn_cells;
    for (std::size_t i = 0; i < syn.rows(); ++i) {
        ++syn_cells[cell_of(syn.row(i))];
    }
    std::size_t worst = 0;
    for (std::size_t i = 0; i < real.rows(); ++i) {
        if (auto it = syn_cells.find(cell_of(real.row(i))); it != syn_cells.end()) {
            worst = std::max(worst, it->second);
        }
    }
    return static_cast<double>(worst) / static_cast<double>(syn.rows());
}

namespace {

double mean_of(const std::vector<FeatureScore>& scores) {
    double acc = 0.0;
    for (const auto& s : scores) {
        acc += s.value;
    }
    return scores.empty() ? 0.0 : acc / static_cast<double>(scores.size());
}

}  // namespace

MetricReport fidelity_report(const Preprocessor& preprocessor, const TabularDataset& real,
                             const SyntheticDataset& syn, const MetricOptions& options) {
    preprocessor.check_schema(real);
    if (syn.features.cols() != real.cols() || syn.column_names != real.column_names) {
        throw SchemaMismatch("synthetic columns do not match the real dataset");
    }
    const TabularDataset real_pre = preprocessor.apply(real, false);
    const auto& columns = preprocessor.columns();
    const std::size_t dim = real.cols();

    MetricReport report;
    std::vector<std::optional<FeatureScore>> kl(dim), ks(dim), chi(dim);
    parallel_for(dim, [&](std::size_t j) {
        const Vector real_col = real_pre.features.column(j);
        const Vector syn_col = syn.features.column(j);
        if (columns[j].kind == ColumnKind::numeric) {
            kl[j] = FeatureScore{columns[j].name, inverse_kl(real_col, syn_col, options.kl_bins)};
            ks[j] = FeatureScore{columns[j].name, ks_two_sample(real_col, syn_col).p_value};
            return;
        }
        // Encoded position of every fitted level in the standardized space.
        std::vector<std::pair<double, std::string>> level_codes;
        for (const auto& [level, stats] : columns[j].categories) {
            level_codes.emplace_back(preprocessor.scale(j, preprocessor.encode_level(j, level)), level);
        }
        std::vector<std::string> real_levels;
        real_levels.reserve(real.rows());
        for (std::size_t i = 0; i < real.rows(); ++i) {
            const double v = real.features(i, j);
            real_levels.push_back(is_missing(v) ? columns[j].impute_level
                                                : real.levels[j].at(static_cast<std::size_t>(v)));
        }
        std::vector<std::string> syn_levels;
        syn_levels.reserve(syn.rows());
        for (double v : syn_col) {
            const auto nearest = std::min_element(
                level_codes.begin(), level_codes.end(),
                [v](const auto& a, const auto& b) { return std::abs(a.first - v) < std::abs(b.first - v); });
            syn_levels.push_back(nearest->second);
        }
        try {
            chi[j] = FeatureScore{columns[j].name, chi2_test(real_levels, syn_levels).p_value};
        } catch (const DegenerateTable&) {
            // Single-category columns have no test; they are left out of the section.
        }
    });
    for (std::size_t j = 0; j < dim; ++j) {
        if (kl[j]) {
            report.inverse_kl.push_back(*kl[j]);
            report.ks_pvalue.push_back(*ks[j]);
        }
        if (chi[j]) {
            report.chi2_pvalue.push_back(*chi[j]);
        }
    }
    report.inverse_kl_mean = mean_of(report.inverse_kl);
    report.ks_pvalue_mean = mean_of(report.ks_pvalue);
    if (!report.chi2_pvalue.empty()) {
        report.chi2_pvalue_mean = mean_of(report.chi2_pvalue);
    }
    report.dcr_median = dcr(real_pre.features, syn.features);
    report.delta_presence = delta_presence(real_pre.features, syn.features, options.presence_bins);
    return report;
}

}  // namespace tabebm
