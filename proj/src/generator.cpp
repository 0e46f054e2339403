#include "tabebm/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tabebm/errors.hpp"
#include "tabebm/random.hpp"

namespace tabebm {

std::vector<std::size_t> allocate_class_counts(std::span<const double> distribution, std::size_t total) {
    if (distribution.empty()) {
        throw InvalidArgument("class distribution is empty");
    }
    double sum = 0.0;
    for (double p : distribution) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw InvalidArgument("class probabilities must be finite and non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidArgument("class probabilities sum to " + format_double(sum) + ", not 1");
    }
    constexpr double kTie = 1e-9;
    const double slack = kTie * std::max(1.0, static_cast<double>(total));
    const std::size_t classes = distribution.size();
    std::vector<std::size_t> counts(classes);
    Vector remainder(classes);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        const double quota = distribution[c] * static_cast<double>(total);
        counts[c] = static_cast<std::size_t>(std::floor(quota + slack));
        remainder[c] = quota - static_cast<double>(counts[c]);
        assigned += counts[c];
    }
    // Rounding can push the floors one over the total for huge requests.
    while (assigned > total) {
        std::size_t worst = classes;
        for (std::size_t c = 0; c < classes; ++c) {
            if (counts[c] > 0 && (worst == classes || remainder[c] < remainder[worst])) {
                worst = c;
            }
        }
        --counts[worst];
        remainder[worst] += 1.0;
        --assigned;
    }
    std::vector<bool> bumped(classes, false);
    for (; assigned < total; ++assigned) {
        std::size_t best = classes;
        for (std::size_t c = 0; c < classes; ++c) {
            if (bumped[c]) {
                continue;
            }
            if (best == classes || remainder[c] > remainder[best] + kTie) {
                best = c;
            }
        }
        if (best == classes) {
            // More rounding residue than classes; restart the round.
            std::fill(bumped.begin(), bumped.end(), false);
            --assigned;
            continue;
        }
        bumped[best] = true;
        ++counts[best];
    }
    return counts;
}

Vector resolve_distribution(const ClassDistribution& distribution, const TabularDataset& train) {
    const std::size_t classes = train.class_count();
    if (std::holds_alternative<EmpiricalDistribution>(distribution)) {
        return empirical_label_distribution(train);
    }
    if (std::holds_alternative<UniformDistribution>(distribution)) {
        return Vector(classes, 1.0 / static_cast<double>(classes));
    }
    const auto& p = std::get<ExplicitDistribution>(distribution).probabilities;
    if (p.size() != classes) {
        throw DimensionMismatch("explicit distribution has " + std::to_string(p.size()) +
                                " entries for " + std::to_string(classes) + " classes");
    }
    return p;
}

namespace {

const char* distribution_name(const ClassDistribution& d) {
    if (std::holds_alternative<EmpiricalDistribution>(d)) {
        return "empirical";
    }
    if (std::holds_alternative<UniformDistribution>(d)) {
        return "uniform";
    }
    return "explicit";
}

}  // namespace

SyntheticDataset generate(std::span<const ClassEBM> ebms, const TabularDataset& train,
                          const GenerationRequest& req, const SGLDConfig& sgld) {
    if (req.total == 0) {
        throw EmptyRequest("requested zero synthetic rows");
    }
    train.validate();
    const std::size_t classes = train.class_count();
    if (ebms.size() != classes) {
        throw DimensionMismatch(std::to_string(ebms.size()) + " energy models for " +
                                std::to_string(classes) + " classes");
    }
    for (std::size_t c = 0; c < classes; ++c) {
        if (ebms[c].class_id() != c || ebms[c].dim() != train.cols()) {
            throw DimensionMismatch("energy model " + std::to_string(c) +
                                    " does not match the training schema");
        }
    }

    const Vector p = resolve_distribution(req.distribution, train);
    std::vector<std::size_t> counts;
    if (req.mode == AllocationMode::exact_stratified) {
        counts = allocate_class_counts(p, req.total);
    } else {
        allocate_class_counts(p, req.total);  // validates p
        counts.assign(classes, 0);
        auto engine = make_engine(req.seed, Stream::class_draw);
        std::discrete_distribution<std::size_t> draw(p.begin(), p.end());
        for (std::size_t i = 0; i < req.total; ++i) {
            ++counts[draw(engine)];
        }
    }

    SyntheticDataset out;
    out.features = Matrix(0, train.cols());
    out.column_names = train.column_names;
    out.class_names = train.class_names;
    out.label_name = train.label_name;
    auto& meta = out.metadata;
    meta.seed = req.seed;
    meta.mode = req.mode;
    meta.distribution = distribution_name(req.distribution);
    meta.probabilities = p;
    meta.class_counts = counts;
    meta.sgld = sgld;

    if (sgld.record_trace) {
        out.energy_traces.resize(classes);
    }
    for (std::size_t c = 0; c < classes; ++c) {
        const std::uint64_t class_seed = req.seed ^ c;
        meta.class_seeds.push_back(class_seed);
        if (counts[c] == 0) {
            continue;
        }
        SGLDConfig cfg = sgld;
        cfg.seed = class_seed;
        auto state = init_chains(class_partition(train, c), counts[c], cfg);
        state = run_sgld(ebms[c], std::move(state), cfg);
        out.features.append_rows(state.positions);
        out.labels.insert(out.labels.end(), counts[c], c);
        if (sgld.record_trace) {
            out.energy_traces[c] = std::move(state.trace);
        }
    }
    return out;
}

SyntheticDataset inverse_transform(const Preprocessor& preprocessor, const SyntheticDataset& syn) {
    const auto& columns = preprocessor.columns();
    if (syn.features.cols() != columns.size() || syn.column_names.size() != columns.size()) {
        throw SchemaMismatch("synthetic data has " + std::to_string(syn.features.cols()) +
                             " columns, preprocessor expects " + std::to_string(columns.size()));
    }
    SyntheticDataset out = syn;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (syn.column_names[j] != columns[j].name) {
            throw SchemaMismatch("column '" + syn.column_names[j] + "' does not match fitted column '" +
                                 columns[j].name + "'");
        }
        for (std::size_t i = 0; i < out.rows(); ++i) {
            out.features(i, j) = preprocessor.unscale(j, syn.features(i, j));
        }
        if (columns[j].kind == ColumnKind::categorical) {
            out.column_names[j] += "_encoded";
            out.metadata.warnings.push_back("column '" + columns[j].name +
                                            "' is categorical and stays leave-one-out encoded");
        }
    }
    out.metadata.inverse_transformed = true;
    return out;
}

TabularDataset to_tabular(const SyntheticDataset& syn) {
    TabularDataset ds;
    ds.features = syn.features;
    ds.labels = syn.labels;
    ds.column_kinds.assign(syn.features.cols(), ColumnKind::numeric);
    ds.column_names = syn.column_names;
    ds.levels.assign(syn.features.cols(), {});
    ds.class_names = syn.class_names;
    ds.label_name = syn.label_name;
    return ds;
}

}  // namespace tabebm
