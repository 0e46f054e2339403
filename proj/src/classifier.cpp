#include "tabebm/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tabebm/errors.hpp"
#include "tabebm/random.hpp"

namespace tabebm {

std::size_t BinaryTaskDataset::positive_count() const {
    return static_cast<std::size_t>(std::count(binary_labels.begin(), binary_labels.end(), 1));
}

BinaryTaskDataset build_surrogate_task(const Matrix& positives, const Matrix& negatives) {
    if (positives.rows() == 0 || negatives.rows() == 0) {
        throw DimensionMismatch("surrogate task needs at least one positive and one negative row");
    }
    if (positives.cols() != negatives.cols()) {
        throw DimensionMismatch("positives have " + std::to_string(positives.cols()) +
                                " columns, negatives " + std::to_string(negatives.cols()));
    }
    BinaryTaskDataset task;
    task.inputs = positives;
    task.inputs.append_rows(negatives);
    task.binary_labels.assign(positives.rows(), 1);
    task.binary_labels.insert(task.binary_labels.end(), negatives.rows(), 0);
    return task;
}

double median_heuristic_bandwidth(const Matrix& points, double floor) {
    std::vector<double> distances;
    const std::size_t n = points.rows();
    distances.reserve(n * (n - (n > 0 ? 1 : 0)) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            distances.push_back(std::sqrt(squared_distance(points.row(i), points.row(j))));
        }
    }
    if (distances.empty()) {
        return floor;
    }
    const std::size_t mid = distances.size() / 2;
    std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(mid),
                     distances.end());
    double median = distances[mid];
    if (distances.size() % 2 == 0) {
        const double lower =
            *std::max_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (lower + median);
    }
    return std::max(median, floor);
}

namespace {

// log(eps + sum_i exp(a_i)) with a_i = -|x - p_i|^2 / (2h^2), and its gradient
// sum_i w_i (p_i - x) / h^2 with softmax weights w_i = exp(a_i - result).
double log_kernel_sum(const Matrix& points, double bandwidth, double floor,
                      std::span<const double> x, Vector* gradient) {
    const std::size_t n = points.rows();
    const double inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    thread_local std::vector<double> log_k;
    log_k.resize(n);
    double shift = std::log(floor);
    for (std::size_t i = 0; i < n; ++i) {
        log_k[i] = -squared_distance(x, points.row(i)) * inv_two_h2;
        shift = std::max(shift, log_k[i]);
    }
    double total = std::exp(std::log(floor) - shift);
    for (std::size_t i = 0; i < n; ++i) {
        total += std::exp(log_k[i] - shift);
    }
    const double result = shift + std::log(total);
    if (gradient != nullptr) {
        gradient->assign(x.size(), 0.0);
        const double inv_h2 = 1.0 / (bandwidth * bandwidth);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = std::exp(log_k[i] - result);
            if (w == 0.0) {
                continue;
            }
            auto p = points.row(i);
            for (std::size_t d = 0; d < x.size(); ++d) {
                (*gradient)[d] += w * (p[d] - x[d]) * inv_h2;
            }
        }
    }
    return result;
}

LogitPair rbf_logits(const RbfModel& m, std::span<const double> x, LogitGradient* grad) {
    LogitPair out;
    out.f0 = log_kernel_sum(m.negatives, m.bandwidth, m.kernel_floor, x,
                            grad != nullptr ? &grad->d_f0 : nullptr);
    out.f1 = log_kernel_sum(m.positives, m.bandwidth, m.kernel_floor, x,
                            grad != nullptr ? &grad->d_f1 : nullptr);
    return out;
}

// Forward pass; fills hidden activations when requested.
LogitPair mlp_forward(const MlpModel& m, std::span<const double> x, Vector& hidden) {
    const std::size_t h = m.b1.size();
    hidden.resize(h);
    for (std::size_t k = 0; k < h; ++k) {
        double z = m.b1[k];
        auto w = m.w1.row(k);
        for (std::size_t d = 0; d < x.size(); ++d) {
            z += w[d] * x[d];
        }
        hidden[k] = std::tanh(z);
    }
    LogitPair out{m.b2[0], m.b2[1]};
    for (std::size_t k = 0; k < h; ++k) {
        out.f0 += m.w2(0, k) * hidden[k];
        out.f1 += m.w2(1, k) * hidden[k];
    }
    return out;
}

LogitPair mlp_logits(const MlpModel& m, std::span<const double> x, LogitGradient* grad) {
    thread_local Vector hidden;
    const LogitPair out = mlp_forward(m, x, hidden);
    if (grad != nullptr) {
        const std::size_t dim = x.size();
        grad->d_f0.assign(dim, 0.0);
        grad->d_f1.assign(dim, 0.0);
        for (std::size_t k = 0; k < hidden.size(); ++k) {
            const double dtanh = 1.0 - hidden[k] * hidden[k];
            const double g0 = m.w2(0, k) * dtanh;
            const double g1 = m.w2(1, k) * dtanh;
            auto w = m.w1.row(k);
            for (std::size_t d = 0; d < dim; ++d) {
                grad->d_f0[d] += g0 * w[d];
                grad->d_f1[d] += g1 * w[d];
            }
        }
    }
    return out;
}

MlpModel train_mlp(const BinaryTaskDataset& task, const MlpConfig& cfg) {
    const std::size_t n = task.inputs.rows();
    const std::size_t dim = task.inputs.cols();
    const std::size_t h = cfg.hidden;
    MlpModel m;
    m.seed = cfg.seed;
    m.learning_rate = cfg.learning_rate;
    m.w1 = Matrix(h, dim);
    m.b1.assign(h, 0.0);
    m.w2 = Matrix(2, h);
    m.b2.assign(2, 0.0);

    auto engine = make_engine(cfg.seed, Stream::mlp_init);
    const double limit1 = std::sqrt(6.0 / static_cast<double>(dim + h));
    const double limit2 = std::sqrt(6.0 / static_cast<double>(h + 2));
    std::uniform_real_distribution<double> u1(-limit1, limit1);
    std::uniform_real_distribution<double> u2(-limit2, limit2);
    for (double& w : m.w1.data()) {
        w = u1(engine);
    }
    for (double& w : m.w2.data()) {
        w = u2(engine);
    }

    Matrix gw1(h, dim);
    Vector gb1(h);
    Matrix gw2(2, h);
    Vector gb2(2);
    Vector hidden;
    Vector delta_hidden(h);
    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;

    auto accumulate_pass = [&](bool with_gradient) {
        loss = 0.0;
        std::size_t correct = 0;
        if (with_gradient) {
            std::fill(gw1.data().begin(), gw1.data().end(), 0.0);
            std::fill(gb1.begin(), gb1.end(), 0.0);
            std::fill(gw2.data().begin(), gw2.data().end(), 0.0);
            std::fill(gb2.begin(), gb2.end(), 0.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto x = task.inputs.row(i);
            const LogitPair z = mlp_forward(m, x, hidden);
            const double top = std::max(z.f0, z.f1);
            const double e0 = std::exp(z.f0 - top);
            const double e1 = std::exp(z.f1 - top);
            const double p1 = e1 / (e0 + e1);
            const double p0 = e0 / (e0 + e1);
            const int y = task.binary_labels[i];
            // -log of the softmax probability; becomes inf when it underflows.
            loss -= std::log(y == 1 ? p1 : p0);
            const int predicted = z.f1 > z.f0 ? 1 : 0;
            correct += predicted == y ? 1 : 0;
            if (!with_gradient) {
                continue;
            }
            const double d0 = (p0 - (y == 0 ? 1.0 : 0.0)) * inv_n;
            const double d1 = (p1 - (y == 1 ? 1.0 : 0.0)) * inv_n;
            gb2[0] += d0;
            gb2[1] += d1;
            for (std::size_t k = 0; k < h; ++k) {
                gw2(0, k) += d0 * hidden[k];
                gw2(1, k) += d1 * hidden[k];
                delta_hidden[k] = (d0 * m.w2(0, k) + d1 * m.w2(1, k)) * (1.0 - hidden[k] * hidden[k]);
                gb1[k] += delta_hidden[k];
                auto g = gw1.row(k);
                for (std::size_t d = 0; d < dim; ++d) {
                    g[d] += delta_hidden[k] * x[d];
                }
            }
        }
        loss *= inv_n;
        return static_cast<double>(correct) * inv_n;
    };

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        accumulate_pass(true);
        if (!std::isfinite(loss)) {
            throw TrainingDivergence("MLP loss became non-finite at epoch " + std::to_string(epoch));
        }
        auto step = [&](std::span<double> w, std::span<const double> g) {
            for (std::size_t k = 0; k < w.size(); ++k) {
                w[k] -= cfg.learning_rate * g[k];
            }
        };
        step(m.w1.data(), gw1.data());
        step(m.b1, gb1);
        step(m.w2.data(), gw2.data());
        step(m.b2, gb2);
    }
    const double accuracy = accumulate_pass(false);
    if (!std::isfinite(loss)) {
        throw TrainingDivergence("MLP loss is non-finite after training");
    }
    m.record = {cfg.epochs, loss, accuracy};
    return m;
}

}  // namespace

std::size_t ClassifierModel::input_dim() const {
    return std::visit(
        [](const auto& m) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, RbfModel>) {
                return m.positives.cols();
            } else {
                return m.w1.cols();
            }
        },
        backend_);
}

void ClassifierModel::check_dim(std::span<const double> x) const {
    if (x.size() != input_dim()) {
        throw DimensionMismatch("input has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(input_dim()));
    }
}

LogitPair ClassifierModel::logits(std::span<const double> x) const {
    check_dim(x);
    if (const auto* rbf = std::get_if<RbfModel>(&backend_)) {
        return rbf_logits(*rbf, x, nullptr);
    }
    return mlp_logits(std::get<MlpModel>(backend_), x, nullptr);
}

LogitPair ClassifierModel::logits_with_gradient(std::span<const double> x, LogitGradient& grad) const {
    check_dim(x);
    if (const auto* rbf = std::get_if<RbfModel>(&backend_)) {
        return rbf_logits(*rbf, x, &grad);
    }
    return mlp_logits(std::get<MlpModel>(backend_), x, &grad);
}

LogitGradient ClassifierModel::logit_gradient(std::span<const double> x) const {
    LogitGradient grad;
    logits_with_gradient(x, grad);
    return grad;
}

bool ClassifierModel::operator==(const ClassifierModel& other) const {
    if (backend_.index() != other.backend_.index()) {
        return false;
    }
    if (const auto* a = std::get_if<RbfModel>(&backend_)) {
        const auto& b = std::get<RbfModel>(other.backend_);
        return a->bandwidth == b.bandwidth && a->kernel_floor == b.kernel_floor &&
               a->positives == b.positives && a->negatives == b.negatives;
    }
    const auto& a = std::get<MlpModel>(backend_);
    const auto& b = std::get<MlpModel>(other.backend_);
    return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2 && a.seed == b.seed;
}

ClassifierModel fit_classifier(const BinaryTaskDataset& task, const BackendConfig& config) {
    if (task.inputs.rows() != task.binary_labels.size()) {
        throw DimensionMismatch("task labels do not match its inputs");
    }
    const std::size_t positives = task.positive_count();
    if (positives == 0 || positives == task.inputs.rows()) {
        throw DimensionMismatch("surrogate task needs both positive and negative rows");
    }
    if (const auto* rbf_cfg = std::get_if<RbfConfig>(&config)) {
        RbfModel m;
        m.kernel_floor = rbf_cfg->kernel_floor;
        for (std::size_t i = 0; i < task.inputs.rows(); ++i) {
            (task.binary_labels[i] == 1 ? m.positives : m.negatives).append_row(task.inputs.row(i));
        }
        m.bandwidth = rbf_cfg->bandwidth.value_or(
            median_heuristic_bandwidth(m.positives, rbf_cfg->min_bandwidth));
        if (!(m.bandwidth > 0.0) || !(m.kernel_floor > 0.0)) {
            throw InvalidArgument("RBF bandwidth and kernel floor must be positive");
        }
        return ClassifierModel(std::move(m));
    }
    return ClassifierModel(train_mlp(task, std::get<MlpConfig>(config)));
}

}  // namespace tabebm
