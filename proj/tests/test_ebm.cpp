#include "doctest.h"

#include <cmath>
#include <set>

#include "tabebm/ebm.hpp"
#include "tabebm/errors.hpp"
#include "tabebm/toy_data.hpp"

using namespace tabebm;

TEST_CASE("energy from logits") {
    CHECK(energy_from_logits({0, 0}) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    CHECK(energy_from_logits({1, 3}) == doctest::Approx(-3.126928).epsilon(1e-6));
    CHECK(std::abs(energy_from_logits({1, 3}) + std::log(std::exp(1.0) + std::exp(3.0))) < 1e-14);
    CHECK(std::abs(energy_from_logits({-745, 2}) + 2.0) < 1e-12);
    CHECK(std::isfinite(energy_from_logits({-1e308, -1e308})));
    CHECK(std::abs(energy_from_logits({800, 800}) + 800 + std::log(2.0)) < 1e-12);
}

TEST_CASE("negative samples sit on hypercube corners") {
    NegativeSampleConfig cfg;
    const Vector ones{1, 1, 1};
    const Matrix neg = generate_negative_samples(ones, cfg);
    CHECK(neg.rows() == 4);
    for (double v : neg.data()) {
        CHECK(std::abs(v) == 5.0);
    }
    std::set<std::vector<double>> distinct;
    for (std::size_t i = 0; i < neg.rows(); ++i) {
        distinct.insert({neg.row(i).begin(), neg.row(i).end()});
    }
    CHECK(distinct.size() == 4);

    const Vector sigma{2, 0.5};
    const Matrix n2 = generate_negative_samples(sigma, cfg);
    for (std::size_t i = 0; i < n2.rows(); ++i) {
        CHECK(std::abs(n2(i, 0)) == 10.0);
        CHECK(std::abs(n2(i, 1)) == 2.5);
    }

    const Vector zero{0.0};
    const Matrix n3 = generate_negative_samples(zero, cfg);
    for (double v : n3.data()) {
        CHECK(std::abs(v) == 5.0 * 1e-6);
    }

    NegativeSampleConfig bad;
    bad.count = 0;
    CHECK_THROWS_AS(generate_negative_samples(ones, bad), InvalidArgument);
    bad = {};
    bad.alpha_dist = -1;
    CHECK_THROWS_AS(generate_negative_samples(ones, bad), InvalidArgument);
}

TEST_CASE("negative samples are seeded") {
    NegativeSampleConfig a;
    a.seed = 4;
    const Vector s{1, 2, 3, 4};
    CHECK(generate_negative_samples(s, a) == generate_negative_samples(s, a));
}

TEST_CASE("class ebm spread and placement") {
    const ClassEBM ebm = fit_class_ebm(0, Matrix{{-1.0}, {1.0}}, {}, RbfConfig{});
    CHECK(ebm.sigma() == Vector{1.0});
    for (double v : ebm.negatives().data()) {
        CHECK(std::abs(v) == 5.0);
    }
    const ClassEBM single = fit_class_ebm(0, Matrix{{0.3, 0.7}}, {}, RbfConfig{});
    CHECK(single.sigma() == Vector{1e-6, 1e-6});
    for (double v : single.negatives().data()) {
        CHECK(std::abs(v) == 5.0 * 1e-6);
    }
    CHECK_THROWS_AS(fit_class_ebm(0, Matrix(0, 2), {}, RbfConfig{}), EmptyClassError);
}

TEST_CASE("rbf energy matches the kernel-mixture closed form") {
    const auto ds = toy::two_class_blobs(30, 2, 5);
    const auto ebms = fit_all_class_ebms(ds, {}, RbfConfig{});
    const auto& m = std::get<RbfModel>(ebms[1].classifier().backend());
    const double h2 = 2 * m.bandwidth * m.bandwidth;
    for (double t = -3; t <= 3; t += 0.5) {
        const Vector x{t, -t / 2};
        double k = 0;
        Vector grad{0, 0};
        for (const Matrix* pts : {&m.positives, &m.negatives}) {
            for (std::size_t i = 0; i < pts->rows(); ++i) {
                const double w = std::exp(-squared_distance(x, pts->row(i)) / h2);
                k += w;
                for (std::size_t d = 0; d < 2; ++d) {
                    grad[d] += w * (x[d] - (*pts)(i, d)) / (m.bandwidth * m.bandwidth);
                }
            }
        }
        const double total = k + 2 * m.kernel_floor;
        CHECK(std::abs(ebms[1].energy(x) + std::log(total)) < 1e-9);
        const Vector g = ebms[1].energy_gradient(x);
        for (std::size_t d = 0; d < 2; ++d) {
            CHECK(std::abs(g[d] - grad[d] / total) < 1e-9);
        }
    }
}

TEST_CASE("energy gradient matches finite differences") {
    const auto ds = toy::two_moons(40, 0.1, 2);
    for (const BackendConfig& backend : {BackendConfig{RbfConfig{}}, BackendConfig{MlpConfig{}}}) {
        const auto ebms = fit_all_class_ebms(ds, {}, backend);
        for (const auto& ebm : ebms) {
            for (double t = -1.5; t <= 1.5; t += 0.75) {
                const Vector x{t, 0.3 * t + 0.1};
                Vector g;
                const double e = ebm.energy_with_gradient(x, g);
                CHECK(e == ebm.energy(x));
                for (std::size_t d = 0; d < 2; ++d) {
                    Vector hi = x, lo = x;
                    hi[d] += 1e-5;
                    lo[d] -= 1e-5;
                    const double fd = (ebm.energy(hi) - ebm.energy(lo)) / 2e-5;
                    CHECK(g[d] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("per-class models are isolated") {
    auto ds = toy::two_class_blobs(20, 2, 1);
    const auto before = fit_all_class_ebms(ds, {}, RbfConfig{});
    CHECK(before.size() == 2);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (ds.labels[i] == 1) {
            ds.features(i, 0) += 100.0;
        }
    }
    const auto after = fit_all_class_ebms(ds, {}, RbfConfig{});
    CHECK(before[0] == after[0]);
    CHECK_FALSE(before[1] == after[1]);

    const auto& p0 = std::get<RbfModel>(before[0].classifier().backend()).positives;
    const auto& p1 = std::get<RbfModel>(before[1].classifier().backend()).positives;
    for (std::size_t i = 0; i < p0.rows(); ++i) {
        for (std::size_t j = 0; j < p1.rows(); ++j) {
            CHECK(squared_distance(p0.row(i), p1.row(j)) > 0.0);
        }
    }
}

TEST_CASE("many classes and global sigma") {
    const auto ds = toy::many_class_blobs(26, 3, 4);
    const auto ebms = fit_all_class_ebms(ds, {}, RbfConfig{});
    CHECK(ebms.size() == 26);
    for (std::size_t c = 0; c < 26; ++c) {
        CHECK(ebms[c].class_id() == c);
    }
    const auto global = fit_all_class_ebms(ds, {}, RbfConfig{}, SigmaSource::global);
    CHECK(global[0].sigma() == global[25].sigma());
    CHECK(global[0].sigma() == column_std(ds.features));
}

TEST_CASE("ebm fitting requires preprocessed data") {
    auto ds = toy::two_class_blobs(5, 2, 1);
    ds.features(0, 0) = kMissing;
    CHECK_THROWS_AS(fit_all_class_ebms(ds, {}, RbfConfig{}), DataError);
}
