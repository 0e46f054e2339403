#include "tabebm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "tabebm/errors.hpp"
#include "tabebm/parallel.hpp"
#include "tabebm/random.hpp"

namespace tabebm {

std::string predictor_name(const PredictorSpec& spec) {
    return std::holds_alternative<LogisticRegressionSpec>(spec) ? "logistic_regression" : "knn";
}

double balanced_accuracy(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw LengthMismatch("y_true has " + std::to_string(y_true.size()) + " labels, y_pred " +
                             std::to_string(y_pred.size()));
    }
    if (y_true.empty()) {
        throw LengthMismatch("balanced accuracy of an empty label set");
    }
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_class;  // hits, total
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        auto& [hits, total] = per_class[y_true[i]];
        ++total;
        hits += y_true[i] == y_pred[i] ? 1 : 0;
    }
    double acc = 0.0;
    for (const auto& [c, counts] : per_class) {
        acc += static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    return acc / static_cast<double>(per_class.size());
}

Matrix logistic_scores(const LogisticModel& model, const Matrix& x) {
    if (x.cols() != model.weights.cols()) {
        throw DimensionMismatch("input has " + std::to_string(x.cols()) + " columns, model expects " +
                                std::to_string(model.weights.cols()));
    }
    const std::size_t classes = model.weights.rows();
    Matrix scores(x.rows(), classes);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto xi = x.row(i);
        for (std::size_t c = 0; c < classes; ++c) {
            double z = model.bias[c];
            auto w = model.weights.row(c);
            for (std::size_t d = 0; d < xi.size(); ++d) {
                z += w[d] * xi[d];
            }
            scores(i, c) = z;
        }
    }
    return scores;
}

namespace {

std::vector<std::size_t> argmax_rows(const Matrix& scores) {
    std::vector<std::size_t> out(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        auto r = scores.row(i);
        out[i] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return out;
}

std::vector<std::size_t> knn_predict(const KnnModel& m, const Matrix& x) {
    if (x.cols() != m.points.cols()) {
        throw DimensionMismatch("input has " + std::to_string(x.cols()) + " columns, model expects " +
                                std::to_string(m.points.cols()));
    }
    std::vector<std::size_t> out(x.rows());
    const std::size_t k = std::min(m.k, m.points.rows());
    parallel_for(x.rows(), [&](std::size_t q) {
        std::vector<std::pair<double, std::size_t>> dist(m.points.rows());
        for (std::size_t i = 0; i < m.points.rows(); ++i) {
            dist[i] = {squared_distance(x.row(q), m.points.row(i)), i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<std::size_t> votes(m.classes, 0);
        for (std::size_t j = 0; j < k; ++j) {
            ++votes[m.labels[dist[j].second]];
        }
        const std::size_t top = *std::max_element(votes.begin(), votes.end());
        // Walk neighbours nearest-first; the first one from a top-voted class decides.
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t c = m.labels[dist[j].second];
            if (votes[c] == top) {
                out[q] = c;
                break;
            }
        }
    });
    return out;
}

LogisticModel fit_logistic(const LogisticRegressionSpec& spec, const TabularDataset& train,
                           const TabularDataset& val) {
    if (spec.epochs == 0) {
        throw InvalidArgument("logistic regression needs at least one epoch");
    }
    const std::size_t n = train.rows();
    const std::size_t dim = train.cols();
    const std::size_t classes = train.class_count();
    LogisticModel model;
    model.weights = Matrix(classes, dim);
    model.bias.assign(classes, 0.0);

    auto validation_score = [&](const LogisticModel& m) {
        return balanced_accuracy(val.labels, argmax_rows(logistic_scores(m, val.features)));
    };
    LogisticModel best = model;
    best.best_validation_accuracy = validation_score(model);

    Matrix grad_w(classes, dim);
    Vector grad_b(classes);
    Vector prob(classes);
    const double inv_n = 1.0 / static_cast<double>(n);
    std::size_t epoch = 1;
    for (; epoch <= spec.epochs; ++epoch) {
        std::fill(grad_w.data().begin(), grad_w.data().end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        const Matrix scores = logistic_scores(model, train.features);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto z = scores.row(i);
            const double top = *std::max_element(z.begin(), z.end());
            double total = 0.0;
            for (std::size_t c = 0; c < classes; ++c) {
                prob[c] = std::exp(z[c] - top);
                total += prob[c];
            }
            for (std::size_t c = 0; c < classes; ++c) {
                prob[c] /= total;
            }
            loss -= std::log(prob[train.labels[i]]);
            auto xi = train.features.row(i);
            for (std::size_t c = 0; c < classes; ++c) {
                const double delta = (prob[c] - (train.labels[i] == c ? 1.0 : 0.0)) * inv_n;
                grad_b[c] += delta;
                auto g = grad_w.row(c);
                for (std::size_t d = 0; d < dim; ++d) {
                    g[d] += delta * xi[d];
                }
            }
        }
        if (!std::isfinite(loss)) {
            throw TrainingDivergence("logistic regression loss became non-finite at epoch " +
                                     std::to_string(epoch));
        }
        for (std::size_t k = 0; k < grad_w.data().size(); ++k) {
            model.weights.data()[k] -= spec.learning_rate * grad_w.data()[k];
        }
        for (std::size_t c = 0; c < classes; ++c) {
            model.bias[c] -= spec.learning_rate * grad_b[c];
        }
        const double score = validation_score(model);
        if (score > best.best_validation_accuracy) {
            best = model;
            best.best_validation_accuracy = score;
            best.best_epoch = epoch;
        } else if (epoch - best.best_epoch >= spec.patience) {
            break;
        }
    }
    best.stopped_epoch = std::min(epoch, spec.epochs);
    return best;
}

}  // namespace

PredictorModel fit_predictor(const PredictorSpec& spec, const TabularDataset& train,
                             const TabularDataset& val) {
    if (train.rows() == 0) {
        throw LengthMismatch("cannot fit a predictor on an empty training set");
    }
    if (train.cols() != val.cols() || train.class_count() != val.class_count()) {
        throw SchemaMismatch("training and validation sets have different schemas");
    }
    if (const auto* lr = std::get_if<LogisticRegressionSpec>(&spec)) {
        return fit_logistic(*lr, train, val);
    }
    const auto& knn = std::get<KnnSpec>(spec);
    if (knn.k == 0) {
        throw InvalidArgument("k-NN needs k >= 1");
    }
    return KnnModel{train.features, train.labels, knn.k, train.class_count()};
}

std::vector<std::size_t> predict_labels(const PredictorModel& model, const Matrix& x) {
    if (const auto* lr = std::get_if<LogisticModel>(&model)) {
        return argmax_rows(logistic_scores(*lr, x));
    }
    return knn_predict(std::get<KnnModel>(model), x);
}

// ---------------------------------------------------------------------------

TabularDataset assemble_training_set(const TabularDataset& real_train, const SyntheticDataset& syn,
                                     ExperimentMode mode) {
    if (syn.rows() > 0 && syn.features.cols() != real_train.cols()) {
        throw SchemaMismatch("synthetic rows do not match the training schema");
    }
    if (mode == ExperimentMode::sharing) {
        TabularDataset out = to_tabular(syn);
        out.class_names = real_train.class_names;
        out.column_names = real_train.column_names;
        return out;
    }
    TabularDataset out = real_train;
    out.features.append_rows(syn.features);
    out.labels.insert(out.labels.end(), syn.labels.begin(), syn.labels.end());
    return out;
}

namespace {

std::vector<ExperimentRecord> run_cell(const ExperimentConfig& cfg, std::size_t size, std::uint64_t seed) {
    auto [pool, test] = stratified_split(cfg.data, cfg.split, seed);
    const auto subset = subsample_stratified(pool, size, seed);
    auto [train, val] = train_validation_split(subset, cfg.split, seed);

    const auto prep = Preprocessor::fit(train);
    const auto train_p = prep.apply(train, true);
    const auto val_p = prep.apply(val, false);
    const auto test_p = prep.apply(test, false);

    SyntheticDataset syn;
    syn.features = Matrix(0, train_p.cols());
    syn.column_names = train_p.column_names;
    syn.class_names = train_p.class_names;
    if (cfg.n_syn > 0) {
        NegativeSampleConfig neg = cfg.negatives;
        neg.seed = seed;
        BackendConfig backend = cfg.backend;
        if (auto* mlp = std::get_if<MlpConfig>(&backend)) {
            mlp->seed = seed;
        }
        const auto ebms = fit_all_class_ebms(train_p, neg, backend);
        GenerationRequest req;
        req.total = cfg.n_syn;
        req.seed = seed;
        syn = generate(ebms, train_p, req, cfg.sgld);
    } else if (cfg.mode == ExperimentMode::sharing) {
        throw InvalidArgument("sharing mode needs synthetic rows (n_syn > 0)");
    }

    TabularDataset tabebm_train = assemble_training_set(train_p, syn, cfg.mode);
    TabularDataset tabebm_val = val_p;
    if (cfg.mode == ExperimentMode::sharing && cfg.sharing_validation == ValidationSource::synthetic) {
        auto [syn_train, syn_val] = train_validation_split(tabebm_train, cfg.split, seed);
        tabebm_train = std::move(syn_train);
        tabebm_val = std::move(syn_val);
    }

    std::vector<ExperimentRecord> records;
    for (const auto& spec : cfg.predictors) {
        const std::string name = predictor_name(spec);
        const auto baseline = fit_predictor(spec, train_p, val_p);
        records.push_back({cfg.dataset_name, size, seed, name, "baseline",
                           balanced_accuracy(test_p.labels, predict_labels(baseline, test_p.features))});
        const auto augmented = fit_predictor(spec, tabebm_train, tabebm_val);
        records.push_back({cfg.dataset_name, size, seed, name, "tabebm",
                           balanced_accuracy(test_p.labels, predict_labels(augmented, test_p.features))});
    }
    return records;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.data.validate();
    if (cfg.repeats == 0 || cfg.sizes.empty() || cfg.predictors.empty()) {
        throw InvalidArgument("experiment needs at least one size, repeat and predictor");
    }
    const std::size_t cells = cfg.sizes.size() * cfg.repeats;
    std::vector<std::vector<ExperimentRecord>> per_cell(cells);
    parallel_for(cells, [&](std::size_t k) {
        const std::size_t size = cfg.sizes[k / cfg.repeats];
        const std::uint64_t seed = cfg.seed + k % cfg.repeats;
        per_cell[k] = run_cell(cfg, size, seed);
    });

    ExperimentResult result;
    result.dataset = cfg.dataset_name;
    for (auto& cell : per_cell) {
        result.records.insert(result.records.end(), cell.begin(), cell.end());
    }

    std::map<std::string, std::vector<std::map<std::string, double>>> normalized_by_predictor;
    for (std::size_t size : cfg.sizes) {
        for (const auto& spec : cfg.predictors) {
            const std::string name = predictor_name(spec);
            std::map<std::string, double> means;
            std::vector<ConditionSummary> group;
            for (const char* condition : {"baseline", "tabebm"}) {
                ConditionSummary s{size, name, condition};
                Vector values;
                for (const auto& r : result.records) {
                    if (r.size == size && r.predictor == name && r.condition == condition) {
                        values.push_back(r.balanced_accuracy);
                    }
                }
                s.runs = values.size();
                s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                         static_cast<double>(values.size());
                double ss = 0.0;
                for (double v : values) {
                    ss += (v - s.mean) * (v - s.mean);
                }
                s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
                means[condition] = s.mean;
                group.push_back(s);
            }
            const auto normalized = adtm_normalize(means);
            for (auto& s : group) {
                s.adtm = normalized.at(s.condition);
                result.summary.push_back(s);
            }
            normalized_by_predictor[name].push_back(normalized);
        }
    }
    for (const auto& [name, per_size] : normalized_by_predictor) {
        for (const auto& [condition, value] : adtm_aggregate(per_size)) {
            result.adtm_aggregate[name + "/" + condition] = value;
        }
    }
    return result;
}

std::map<std::string, double> adtm_normalize(const std::map<std::string, double>& scores) {
    if (scores.size() < 2) {
        throw InvalidArgument("ADTM needs at least two conditions");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [name, s] : scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    std::map<std::string, double> out;
    for (const auto& [name, s] : scores) {
        out[name] = hi > lo ? (s - lo) / (hi - lo) : 1.0;
    }
    return out;
}

std::map<std::string, double> adtm_aggregate(const std::vector<std::map<std::string, double>>& per_dataset) {
    std::map<std::string, std::pair<double, std::size_t>> sums;
    for (const auto& scores : per_dataset) {
        for (const auto& [name, s] : scores) {
            sums[name].first += s;
            ++sums[name].second;
        }
    }
    std::map<std::string, double> out;
    for (const auto& [name, acc] : sums) {
        out[name] = acc.first / static_cast<double>(acc.second);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<ProfileRow> energy_distance_profile(const ClassEBM& ebm, const Matrix& class_rows,
                                                std::span<const double> radii,
                                                std::size_t directions_per_radius, std::uint64_t seed) {
    if (class_rows.rows() == 0) {
        throw EmptyClassError("energy profile needs at least one real row");
    }
    if (directions_per_radius == 0) {
        throw InvalidArgument("energy profile needs at least one direction per radius");
    }
    for (std::size_t r = 0; r < radii.size(); ++r) {
        if (!(radii[r] >= 0.0) || (r > 0 && radii[r] < radii[r - 1])) {
            throw InvalidArgument("radii must be non-negative and ascending");
        }
    }
    const std::size_t dim = class_rows.cols();
    const std::size_t per = directions_per_radius;
    std::vector<LogitPair> logits(radii.size() * per);
    Vector energies(logits.size());
    parallel_for(radii.size(), [&](std::size_t r) {
        auto engine = make_engine(seed, Stream::profile, {r});
        std::uniform_int_distribution<std::size_t> pick(0, class_rows.rows() - 1);
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector direction(dim);
        Vector point(dim);
        for (std::size_t k = 0; k < per; ++k) {
            auto anchor = class_rows.row(pick(engine));
            double norm = 0.0;
            while (norm == 0.0) {
                for (double& v : direction) {
                    v = normal(engine);
                    norm += v * v;
                }
            }
            norm = std::sqrt(norm);
            for (std::size_t d = 0; d < dim; ++d) {
                point[d] = anchor[d] + radii[r] * direction[d] / norm;
            }
            logits[r * per + k] = ebm.logits(point);
            energies[r * per + k] = energy_from_logits(logits[r * per + k]);
        }
    });
    const double min_energy = energies.empty() ? 0.0 : *std::min_element(energies.begin(), energies.end());
    std::vector<ProfileRow> rows(radii.size());
    for (std::size_t r = 0; r < radii.size(); ++r) {
        ProfileRow& row = rows[r];
        row.radius = radii[r];
        for (std::size_t k = 0; k < per; ++k) {
            const auto& z = logits[r * per + k];
            row.mean_f0 += z.f0;
            row.mean_f1 += z.f1;
            row.mean_max_logit += std::max(z.f0, z.f1);
            row.mean_energy += energies[r * per + k];
            row.mean_relative_density += std::exp(-(energies[r * per + k] - min_energy));
        }
        const double inv = 1.0 / static_cast<double>(per);
        row.mean_f0 *= inv;
        row.mean_f1 *= inv;
        row.mean_max_logit *= inv;
        row.mean_energy *= inv;
        row.mean_relative_density *= inv;
    }
    return rows;
}

}  // namespace tabebm
