#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "tabebm/ebm.hpp"
#include "tabebm/errors.hpp"
#include "tabebm/sampler.hpp"
#include "tabebm/toy_data.hpp"

using namespace tabebm;

namespace {

Matrix gaussian_class(std::size_t n, std::uint64_t seed) {
    const auto ds = toy::two_class_blobs(n, 2, seed);
    return class_partition(ds, 0);
}

}  // namespace

TEST_CASE("chains start on real rows when sigma_start is zero") {
    const Matrix rows = gaussian_class(10, 1);
    SGLDConfig cfg;
    cfg.sigma_start = 0.0;
    const auto state = init_chains(rows, 50, cfg);
    for (std::size_t i = 0; i < 50; ++i) {
        const auto pos = state.positions.row(i);
        const auto anchor = rows.row(state.anchors[i]);
        CHECK(std::equal(pos.begin(), pos.end(), anchor.begin()));
    }
    CHECK_THROWS_AS(init_chains(Matrix(0, 2), 3, cfg), EmptyClassError);
}

TEST_CASE("anchor rows are drawn uniformly") {
    const Matrix rows = gaussian_class(10, 1);
    SGLDConfig cfg;
    cfg.seed = 21;
    const auto state = init_chains(rows, 1000, cfg);
    std::vector<std::size_t> hist(10, 0);
    for (std::size_t a : state.anchors) {
        ++hist[a];
    }
    // Binomial(1000, 0.1): mean 100, sd 9.49; 4 sd bounds.
    for (std::size_t h : hist) {
        CHECK(h > 62);
        CHECK(h < 138);
    }
}

TEST_CASE("initialization is seeded") {
    const Matrix rows = gaussian_class(10, 1);
    SGLDConfig cfg;
    cfg.seed = 5;
    CHECK(init_chains(rows, 20, cfg).positions == init_chains(rows, 20, cfg).positions);
    SGLDConfig other = cfg;
    other.seed = 6;
    CHECK_FALSE(init_chains(rows, 20, cfg).positions == init_chains(rows, 20, other).positions);
}

TEST_CASE("sgld step arithmetic") {
    const Matrix rows = gaussian_class(30, 2);
    const ClassEBM ebm = fit_class_ebm(0, rows, {}, RbfConfig{});
    SGLDConfig cfg;
    cfg.alpha_noise = 0.0;
    auto state = init_chains(rows, 5, cfg);
    const Matrix before = state.positions;
    state = sgld_step(ebm, std::move(state), cfg);
    CHECK(state.step == 1);
    for (std::size_t i = 0; i < 5; ++i) {
        const Vector g = ebm.energy_gradient(before.row(i));
        for (std::size_t d = 0; d < 2; ++d) {
            CHECK(state.positions(i, d) == before(i, d) - cfg.alpha_step * g[d]);
        }
    }

    SGLDConfig frozen = cfg;
    frozen.alpha_step = 0.0;
    auto s2 = init_chains(rows, 3, frozen);
    const Matrix p2 = s2.positions;
    s2 = sgld_step(ebm, std::move(s2), frozen);
    CHECK(s2.positions == p2);
}

TEST_CASE("run_sgld equals repeated single steps and is deterministic") {
    const Matrix rows = gaussian_class(30, 2);
    const ClassEBM ebm = fit_class_ebm(0, rows, {}, RbfConfig{});
    SGLDConfig cfg;
    cfg.steps = 15;
    cfg.seed = 8;
    auto a = run_sgld(ebm, init_chains(rows, 7, cfg), cfg);
    auto b = init_chains(rows, 7, cfg);
    for (int t = 0; t < 15; ++t) {
        b = sgld_step(ebm, std::move(b), cfg);
    }
    CHECK(a.positions == b.positions);
    CHECK(a.step == 15);
    CHECK(run_sgld(ebm, init_chains(rows, 7, cfg), cfg).positions == a.positions);

    SGLDConfig none = cfg;
    none.steps = 0;
    const auto init = init_chains(rows, 7, none);
    CHECK(run_sgld(ebm, init, none).positions == init.positions);
}

TEST_CASE("defaults lower the mean energy on a Gaussian class") {
    const Matrix rows = gaussian_class(100, 3);
    const ClassEBM ebm = fit_class_ebm(0, rows, {}, RbfConfig{});
    SGLDConfig cfg;
    cfg.record_trace = true;
    const auto state = run_sgld(ebm, init_chains(rows, 500, cfg), cfg);
    REQUIRE(state.trace.size() == cfg.steps + 1);
    CHECK(state.trace.front().step == 0);
    CHECK(state.trace.back().step == cfg.steps);
    CHECK(state.trace.back().mean_energy <= state.trace.front().mean_energy);
}

TEST_CASE("noise-free chains descend the energy") {
    const Matrix rows = gaussian_class(60, 4);
    const ClassEBM ebm = fit_class_ebm(0, rows, {}, RbfConfig{});
    SGLDConfig cfg;
    cfg.alpha_noise = 0.0;
    cfg.alpha_step = 0.01;
    cfg.sigma_start = 0.5;
    auto state = init_chains(rows, 40, cfg);
    std::size_t steps = 0, descending = 0;
    for (int t = 0; t < 50; ++t) {
        Vector before(40);
        for (std::size_t i = 0; i < 40; ++i) {
            before[i] = ebm.energy(state.positions.row(i));
        }
        state = sgld_step(ebm, std::move(state), cfg);
        for (std::size_t i = 0; i < 40; ++i) {
            ++steps;
            descending += ebm.energy(state.positions.row(i)) <= before[i] ? 1 : 0;
        }
    }
    CHECK(static_cast<double>(descending) >= 0.95 * static_cast<double>(steps));
}

TEST_CASE("non-finite states are rejected") {
    const Matrix rows = gaussian_class(10, 1);
    const ClassEBM ebm = fit_class_ebm(0, rows, {}, RbfConfig{});
    SGLDConfig cfg;
    auto state = init_chains(rows, 2, cfg);
    state.positions(1, 0) = std::nan("");
    CHECK_THROWS_AS(sgld_step(ebm, state, cfg), NonFiniteState);

    SGLDConfig wild = cfg;
    wild.alpha_noise = 1e308;
    CHECK_THROWS_AS(run_sgld(ebm, init_chains(rows, 2, wild), wild), NonFiniteState);
}

TEST_CASE("energy trace csv") {
    const auto path = std::filesystem::temp_directory_path() / "tabebm_trace_test.csv";
    write_energy_trace_csv({{0, -1.5, -2, -1}, {1, -1.75, -2, -1.5}}, path);
    std::ifstream in(path);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "step,mean_energy,min_energy,max_energy");
    CHECK(first == "0,-1.5,-2,-1");
    std::filesystem::remove(path);
}
