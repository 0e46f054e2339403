#include "doctest.h"

#include <cmath>
#include <random>

#include "tabebm/classifier.hpp"
#include "tabebm/errors.hpp"

using namespace tabebm;

namespace {

ClassifierModel rbf(Matrix pos, Matrix neg, double h) {
    RbfConfig cfg;
    cfg.bandwidth = h;
    return fit_classifier(build_surrogate_task(pos, neg), cfg);
}

Matrix corners(double a) { return Matrix{{a, a}, {a, -a}, {-a, a}, {-a, -a}}; }

}  // namespace

TEST_CASE("surrogate task layout") {
    const Matrix pos{{0, 0}, {1, 1}, {2, 2}};
    const auto task = build_surrogate_task(pos, corners(5));
    CHECK(task.inputs.rows() == 7);
    CHECK(task.binary_labels == std::vector<int>{1, 1, 1, 0, 0, 0, 0});
    CHECK(task.inputs(2, 0) == 2.0);
    CHECK(task.inputs(3, 0) == 5.0);

    CHECK_THROWS_AS(build_surrogate_task(pos, Matrix{{1, 2, 3}}), DimensionMismatch);
    CHECK(build_surrogate_task(Matrix{{0.0}}, Matrix{{1.0}}).inputs.rows() == 2);
}

TEST_CASE("rbf fit stores the task") {
    const Matrix pos{{0, 0}, {1, 0}};
    const auto model = rbf(pos, corners(5), 1.0);
    const auto& m = std::get<RbfModel>(model.backend());
    CHECK(m.positives == pos);
    CHECK(m.negatives == corners(5));
    CHECK(m.bandwidth == 1.0);
}

TEST_CASE("rbf logits") {
    const auto self = rbf(Matrix{{0.0, 0.0}}, corners(5), 1.0);
    const Vector origin{0, 0};
    CHECK(self.logits(origin).f1 == doctest::Approx(0.0));
    CHECK(std::abs(self.logits(origin).f1 - std::log1p(1e-12)) < 1e-15);

    const auto pair = rbf(Matrix{{0, 0}, {2, 0}}, corners(5), 1.0);
    const Vector x{1, 0};
    const double expected = std::log(2.0 * std::exp(-0.5) + kKernelFloor);
    CHECK(std::abs(pair.logits(x).f1 - expected) < 1e-14);
    CHECK(pair.logits(x).f1 == doctest::Approx(0.193147).epsilon(1e-6));

    const Vector far{1e4, 1e4};
    CHECK(pair.logits(far).f0 == doctest::Approx(std::log(kKernelFloor)));
    CHECK(pair.logits(far).f1 == doctest::Approx(std::log(kKernelFloor)));
}

TEST_CASE("rbf gradient closed forms") {
    const auto lone = rbf(Matrix{{0.0}}, Matrix{{5.0}, {-5.0}}, 1.0);
    const Vector at{0.0};
    CHECK(lone.logit_gradient(at).d_f1[0] == 0.0);

    const Vector x{1.0};
    const double k = std::exp(-0.5);
    CHECK(lone.logit_gradient(x).d_f1[0] == doctest::Approx(-k / (kKernelFloor + k)).epsilon(1e-12));
    CHECK(lone.logit_gradient(x).d_f1[0] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("median heuristic bandwidth") {
    // Pairwise distances 1, 2, 3 -> median 2.
    CHECK(median_heuristic_bandwidth(Matrix{{0.0}, {1.0}, {3.0}}) == 2.0);
    // Even number of distances: 1, 1, 2, 2, 3, 3... use the two middle values.
    CHECK(median_heuristic_bandwidth(Matrix{{0.0}, {1.0}, {2.0}, {3.0}}) == 1.5);
    CHECK(median_heuristic_bandwidth(Matrix{{0.0}}) == kMinBandwidth);
    CHECK(median_heuristic_bandwidth(Matrix{{0.0}, {0.01}}) == kMinBandwidth);
}

TEST_CASE("classifier rejects wrong dimensions") {
    const auto model = rbf(Matrix{{0.0, 0.0}}, corners(5), 1.0);
    const Vector bad{1, 2, 3};
    CHECK_THROWS_AS(model.logits(bad), DimensionMismatch);
}

TEST_CASE("mlp separates origin from corners") {
    MlpConfig cfg;
    cfg.seed = 7;
    const auto task = build_surrogate_task(Matrix{{0, 0}, {0, 0}}, corners(5));
    const auto model = fit_classifier(task, cfg);
    const auto& m = std::get<MlpModel>(model.backend());
    CHECK(m.record.training_accuracy == 1.0);
    const Vector origin{0, 0};
    CHECK(model.logits(origin).f1 > model.logits(origin).f0);

    const auto again = fit_classifier(task, cfg);
    CHECK(again == model);
}

TEST_CASE("mlp divergence is signalled") {
    MlpConfig cfg;
    cfg.learning_rate = 1e6;
    const auto task = build_surrogate_task(Matrix{{0, 0}, {0, 0}}, corners(5));
    CHECK_THROWS_AS(fit_classifier(task, cfg), TrainingDivergence);
}

TEST_CASE("logit gradients match finite differences") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix pos(8, 3);
    for (auto& v : pos.data()) {
        v = n(rng);
    }
    Matrix neg(4, 3);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t d = 0; d < 3; ++d) {
            neg(i, d) = (((i >> d) & 1) != 0 ? 5.0 : -5.0);
        }
    }
    const auto task = build_surrogate_task(pos, neg);
    const ClassifierModel models[] = {fit_classifier(task, RbfConfig{}), fit_classifier(task, MlpConfig{})};
    for (const auto& model : models) {
        for (int trial = 0; trial < 10; ++trial) {
            Vector x{n(rng), n(rng), n(rng)};
            const auto g = model.logit_gradient(x);
            for (std::size_t d = 0; d < 3; ++d) {
                Vector hi = x, lo = x;
                hi[d] += 1e-5;
                lo[d] -= 1e-5;
                const double fd0 = (model.logits(hi).f0 - model.logits(lo).f0) / 2e-5;
                const double fd1 = (model.logits(hi).f1 - model.logits(lo).f1) / 2e-5;
                CHECK(g.d_f0[d] == doctest::Approx(fd0).epsilon(1e-5).scale(1.0));
                CHECK(g.d_f1[d] == doctest::Approx(fd1).epsilon(1e-5).scale(1.0));
            }
            LogitGradient both;
            const auto l = model.logits_with_gradient(x, both);
            CHECK(l.f0 == model.logits(x).f0);
            CHECK(both.d_f1 == g.d_f1);
        }
    }
}
