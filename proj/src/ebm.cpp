#include "tabebm/ebm.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "tabebm/errors.hpp"
#include "tabebm/parallel.hpp"
#include "tabebm/random.hpp"

namespace tabebm {

Matrix generate_negative_samples(std::span<const double> sigma, const NegativeSampleConfig& cfg) {
    if (cfg.count == 0) {
        throw InvalidArgument("negative sample count must be at least 1");
    }
    if (!(cfg.alpha_dist > 0.0) || !(cfg.sigma_floor > 0.0)) {
        throw InvalidArgument("alpha_dist and sigma_floor must be positive");
    }
    const std::size_t dim = sigma.size();
    Vector magnitude(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        if (!std::isfinite(sigma[d])) {
            throw InvalidArgument("sigma must be finite");
        }
        magnitude[d] = cfg.alpha_dist * std::max(sigma[d], cfg.sigma_floor);
    }
    const bool distinct_possible = dim >= 63 || (std::uint64_t{1} << dim) >= cfg.count;

    auto engine = make_engine(cfg.seed, Stream::negatives);
    std::bernoulli_distribution coin(0.5);
    std::set<std::vector<bool>> used;
    Matrix out(cfg.count, dim);
    std::vector<bool> signs(dim);
    for (std::size_t s = 0; s < cfg.count; ++s) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            for (std::size_t d = 0; d < dim; ++d) {
                signs[d] = coin(engine);
            }
            if (!distinct_possible || !used.contains(signs)) {
                break;
            }
        }
        used.insert(signs);
        for (std::size_t d = 0; d < dim; ++d) {
            out(s, d) = signs[d] ? magnitude[d] : -magnitude[d];
        }
    }
    return out;
}

Vector column_std(const Matrix& points) {
    const std::size_t n = points.rows();
    Vector mean(points.cols(), 0.0);
    Vector out(points.cols(), 0.0);
    if (n == 0) {
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < points.cols(); ++d) {
            mean[d] += points(i, d);
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < points.cols(); ++d) {
            const double diff = points(i, d) - mean[d];
            out[d] += diff * diff;
        }
    }
    for (double& v : out) {
        v = std::sqrt(v / static_cast<double>(n));
    }
    return out;
}

double energy_from_logits(LogitPair z) {
    const double m = std::max(z.f0, z.f1);
    return -(m + std::log(std::exp(z.f0 - m) + std::exp(z.f1 - m)));
}

ClassEBM::ClassEBM(std::size_t class_id, ClassifierModel classifier, Matrix negatives, Vector sigma)
    : class_id_(class_id),
      classifier_(std::move(classifier)),
      negatives_(std::move(negatives)),
      sigma_(std::move(sigma)) {}

double ClassEBM::energy(std::span<const double> x) const {
    return energy_from_logits(classifier_.logits(x));
}

double ClassEBM::energy_with_gradient(std::span<const double> x, Vector& gradient) const {
    thread_local LogitGradient grad;
    const LogitPair z = classifier_.logits_with_gradient(x, grad);
    // Softmax weights of the two logits: w1 = sigmoid(f1 - f0).
    const double w1 = 1.0 / (1.0 + std::exp(z.f0 - z.f1));
    const double w0 = 1.0 / (1.0 + std::exp(z.f1 - z.f0));
    gradient.resize(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
        gradient[d] = -(w0 * grad.d_f0[d] + w1 * grad.d_f1[d]);
    }
    return energy_from_logits(z);
}

Vector ClassEBM::energy_gradient(std::span<const double> x) const {
    Vector g;
    energy_with_gradient(x, g);
    return g;
}

ClassEBM fit_class_ebm(std::size_t class_id, const Matrix& class_rows, const NegativeSampleConfig& cfg,
                       const BackendConfig& backend, std::span<const double> sigma_override) {
    if (class_rows.rows() == 0) {
        throw EmptyClassError("class " + std::to_string(class_id) + " has no rows");
    }
    Vector sigma = sigma_override.empty() ? column_std(class_rows)
                                          : Vector(sigma_override.begin(), sigma_override.end());
    if (sigma.size() != class_rows.cols()) {
        throw DimensionMismatch("sigma has " + std::to_string(sigma.size()) + " entries, data has " +
                                std::to_string(class_rows.cols()) + " columns");
    }
    for (double& s : sigma) {
        s = std::max(s, cfg.sigma_floor);
    }
    Matrix negatives = generate_negative_samples(sigma, cfg);
    auto task = build_surrogate_task(class_rows, negatives);
    auto classifier = fit_classifier(task, backend);
    return ClassEBM(class_id, std::move(classifier), std::move(negatives), std::move(sigma));
}

std::vector<ClassEBM> fit_all_class_ebms(const TabularDataset& train, const NegativeSampleConfig& cfg,
                                         const BackendConfig& backend, SigmaSource sigma_source) {
    train.validate();
    if (!train.all_numeric() || train.has_missing()) {
        throw SchemaError("EBMs need preprocessed, all-numeric data without missing cells");
    }
    Vector global_sigma;
    if (sigma_source == SigmaSource::global) {
        global_sigma = column_std(train.features);
    }
    const std::size_t classes = train.class_count();
    std::vector<std::optional<ClassEBM>> fitted(classes);
    parallel_for(classes, [&](std::size_t c) {
        NegativeSampleConfig class_cfg = cfg;
        class_cfg.seed = cfg.seed ^ c;
        BackendConfig class_backend = backend;
        if (auto* mlp = std::get_if<MlpConfig>(&class_backend)) {
            mlp->seed ^= c;
        }
        fitted[c].emplace(
            fit_class_ebm(c, class_partition(train, c), class_cfg, class_backend, global_sigma));
    });
    std::vector<ClassEBM> out;
    out.reserve(classes);
    for (auto& e : fitted) {
        out.push_back(std::move(*e));
    }
    return out;
}

}  // namespace tabebm
