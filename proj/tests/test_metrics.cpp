#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "tabebm/errors.hpp"
#include "tabebm/metrics.hpp"
#include "tabebm/toy_data.hpp"

using namespace tabebm;

namespace {

double brute_ks(const Vector& a, const Vector& b) {
    Vector pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    double best = 0.0;
    for (double t : pooled) {
        const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [t](double v) { return v <= t; })) /
                          static_cast<double>(a.size());
        const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [t](double v) { return v <= t; })) /
                          static_cast<double>(b.size());
        best = std::max(best, std::abs(fa - fb));
    }
    return best;
}

double brute_dcr(const Matrix& real, const Matrix& syn) {
    Vector d;
    for (std::size_t i = 0; i < syn.rows(); ++i) {
        double best = INFINITY;
        for (std::size_t j = 0; j < real.rows(); ++j) {
            best = std::min(best, std::sqrt(squared_distance(syn.row(i), real.row(j))));
        }
        d.push_back(best);
    }
    std::sort(d.begin(), d.end());
    return d[(d.size() - 1) / 2];
}

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(r, c);
    for (auto& v : m.data()) {
        v = std::round(n(rng) * 4.0) / 4.0;  // coarse grid forces ties
    }
    return m;
}

}  // namespace

TEST_CASE("inverse kl") {
    const Vector x{0.3, 1.2, -0.5, 2.2, 0.0, 0.7};
    CHECK(inverse_kl(x, x) == 1.0);

    const Vector real{0, 0, 1, 1, 2, 2, 3, 3, 4, 4};
    const Vector syn(10, 0.0);
    // Smoothed real bins (3,3,3,3,3)/15, syn bins (11,1,1,1,1)/15.
    const double kl = 0.2 * std::log(3.0 / 11.0) + 0.8 * std::log(3.0);
    CHECK(inverse_kl(real, syn, 5) == doctest::Approx(1.0 / (1.0 + kl)).epsilon(1e-12));
    CHECK(inverse_kl(real, syn, 5) == doctest::Approx(0.61766).epsilon(1e-5));

    const Vector outside(10, 100.0);
    CHECK(inverse_kl(real, outside, 5) < inverse_kl(real, real, 5));
    CHECK(inverse_kl(real, outside, 5) == inverse_kl(real, Vector(10, 4.0), 5));
}

TEST_CASE("ks statistic") {
    const Vector x{0.1, 0.5, -2.0, 3.0};
    const auto same = ks_two_sample(x, x);
    CHECK(same.statistic == 0.0);
    CHECK(std::abs(same.p_value - 1.0) < 1e-9);

    CHECK(ks_two_sample(Vector{0, 1}, Vector{0.5, 1.5}).statistic == 0.5);
    const auto apart = ks_two_sample(Vector{0, 1, 2}, Vector{10, 11});
    CHECK(apart.statistic == 1.0);
    CHECK(apart.p_value == kolmogorov_survival(std::sqrt(6.0 / 5.0)));
    CHECK(ks_two_sample(Vector(40, 0.0), Vector(40, 1.0)).p_value < 1e-8);
}

TEST_CASE("ks matches brute force") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 50, m = 1 + rng() % 100;
        const Vector a = random_matrix(n, 1, rng).column(0);
        const Vector b = random_matrix(m, 1, rng).column(0);
        CHECK(ks_two_sample(a, b).statistic == brute_ks(a, b));
    }
}

TEST_CASE("kolmogorov survival") {
    CHECK(kolmogorov_survival(0.0) == 1.0);
    // Alternating series where it converges quickly.
    for (double lambda : {1.0, 1.36, 2.0}) {
        double s = 0.0;
        for (int k = 1; k <= 100; ++k) {
            s += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        }
        CHECK(kolmogorov_survival(lambda) == doctest::Approx(s).epsilon(1e-12));
    }
    CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0495).epsilon(1e-2));
    double prev = 1.0;
    for (double l = 0.05; l < 3.0; l += 0.05) {
        const double p = kolmogorov_survival(l);
        CHECK(p <= prev);
        CHECK(p >= 0.0);
        prev = p;
    }
}

TEST_CASE("chi squared") {
    const std::vector<std::string> a{"a", "b", "b", "c"};
    const auto same = chi2_test(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);

    const std::vector<std::string> ten_a(10, "a"), ten_b(10, "b");
    const auto split = chi2_test(ten_a, ten_b);
    CHECK(split.statistic == doctest::Approx(20.0));
    CHECK(split.p_value == doctest::Approx(std::erfc(std::sqrt(10.0))).epsilon(1e-10));
    CHECK(split.p_value == doctest::Approx(7.74e-6).epsilon(1e-2));

    CHECK_THROWS_AS(chi2_test(ten_a, ten_a), DegenerateTable);
}

TEST_CASE("distance to closest record") {
    const Matrix m{{0, 1}, {2, 3}, {4, 5}};
    CHECK(dcr(m, m) == 0.0);
    CHECK(dcr(Matrix{{0, 0}}, Matrix{{3, 4}}) == 5.0);
    CHECK(nearest_real_distances(Matrix{{0.0}, {10.0}}, Matrix{{1.0}, {9.0}, {5.0}}) == Vector{1, 1, 5});
    CHECK(dcr(Matrix{{0.0}, {10.0}}, Matrix{{1.0}, {9.0}, {5.0}}) == 1.0);
    CHECK(dcr(Matrix{{0.0}}, Matrix{{1.0}, {2.0}, {3.0}, {4.0}}) == 2.0);
    CHECK_THROWS_AS(dcr(Matrix{{0.0}}, Matrix{{1.0, 2.0}}), DimensionMismatch);
}

TEST_CASE("dcr matches brute force") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 50, m = 1 + rng() % 100, d = 1 + rng() % 4;
        const Matrix real = random_matrix(n, d, rng);
        const Matrix syn = random_matrix(m, d, rng);
        CHECK(dcr(real, syn) == brute_dcr(real, syn));
    }
}

TEST_CASE("delta presence") {
    const Matrix quad{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    CHECK(delta_presence(quad, quad) == 0.25);
    CHECK(delta_presence(quad, Matrix{{0.9, 0.9}, {1.1, 1.2}}) == 1.0);

    const Matrix diag{{-1, -1}, {-1, -1.5}, {1, 1}, {1.5, 1.5}};
    CHECK(delta_presence(diag, Matrix{{-1, 1}, {1, -1}}) == 0.0);

    Matrix grid(0, 2);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const Vector r{i - 4.5, j - 4.5};
            grid.append_row(r);
        }
    }
    CHECK(delta_presence(grid, grid, 2) == 0.25);
    CHECK(delta_presence(grid, grid, 5) == doctest::Approx(1.0 / 25));
    CHECK_THROWS_AS(delta_presence(grid, Matrix{{1.0}}), DimensionMismatch);
}

TEST_CASE("fidelity report identity bundle") {
    const auto raw = toy::two_class_blobs(40, 3, 2);
    const auto prep = Preprocessor::fit(raw);
    const auto pre = prep.apply(raw, false);
    SyntheticDataset syn;
    syn.features = pre.features;
    syn.labels = pre.labels;
    syn.column_names = pre.column_names;
    const auto report = fidelity_report(prep, raw, syn);
    CHECK(report.inverse_kl.size() == 3);
    CHECK(report.inverse_kl_mean == 1.0);
    CHECK(std::abs(report.ks_pvalue_mean - 1.0) < 1e-9);
    CHECK(report.dcr_median == 0.0);
    CHECK(report.chi2_pvalue.empty());
    CHECK_FALSE(report.chi2_pvalue_mean.has_value());

    std::mt19937_64 rng(1);
    std::normal_distribution<double> jitter(0.0, 1e-6);
    for (auto& v : syn.features.data()) {
        v += jitter(rng);
    }
    const auto jittered = fidelity_report(prep, raw, syn);
    CHECK(jittered.inverse_kl_mean > 0.99);
    CHECK(jittered.dcr_median > 0.0);

    syn.column_names[0] = "other";
    CHECK_THROWS_AS(fidelity_report(prep, raw, syn), SchemaMismatch);
}

TEST_CASE("fidelity report on categorical columns") {
    const auto raw = parse_csv("x,c,y\n0.1,a,0\n0.4,a,0\n0.2,b,1\n0.9,b,1\n0.5,a,1\n0.3,b,0\n", "y");
    const auto prep = Preprocessor::fit(raw);
    const auto pre = prep.apply(raw, false);
    SyntheticDataset syn;
    syn.features = pre.features;
    syn.labels = pre.labels;
    syn.column_names = pre.column_names;
    const auto report = fidelity_report(prep, raw, syn);
    CHECK(report.inverse_kl.size() == 1);
    REQUIRE(report.chi2_pvalue.size() == 1);
    CHECK(report.chi2_pvalue[0].feature == "c");
    CHECK(report.chi2_pvalue[0].value == 1.0);
    CHECK(report.chi2_pvalue_mean.value() == 1.0);
}
