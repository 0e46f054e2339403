#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "tabebm/ebm.hpp"
#include "tabebm/matrix.hpp"
#include "tabebm/random.hpp"

namespace tabebm {

/// Langevin sampling parameters.
struct SGLDConfig {
    double alpha_step = 0.1;
    double alpha_noise = 0.01;
    double sigma_start = 0.01;
    std::size_t steps = 200;
    std::uint64_t seed = 0;
    bool record_trace = false;
};

struct EnergyTraceRow {
    std::size_t step = 0;
    double mean_energy = 0.0;
    double min_energy = 0.0;
    double max_energy = 0.0;

    bool operator==(const EnergyTraceRow&) const = default;
};

/// Private random stream of one chain. Chains never share draws, so results do
/// not depend on how chains are scheduled.
struct ChainStream {
    Engine engine;
    std::normal_distribution<double> normal{0.0, 1.0};
};

struct ChainState {
    Matrix positions;
    std::size_t step = 0;
    std::vector<std::size_t> anchors;
    std::vector<ChainStream> streams;
    std::vector<EnergyTraceRow> trace;
};

/// Each chain starts at a uniformly drawn row of `class_rows` plus N(0, sigma_start^2 I).
/// Chain i draws from substream (cfg.seed, i).
ChainState init_chains(const Matrix& class_rows, std::size_t n_chains, const SGLDConfig& cfg);

/// x <- x - alpha_step * grad E(x) + N(0, alpha_noise^2 I) for every chain.
ChainState sgld_step(const ClassEBM& ebm, ChainState state, const SGLDConfig& cfg);

/// Applies cfg.steps updates. With cfg.record_trace the energy summary is
/// recorded before the first step and after every step.
ChainState run_sgld(const ClassEBM& ebm, ChainState state, const SGLDConfig& cfg);

void write_energy_trace_csv(const std::vector<EnergyTraceRow>& trace, const std::filesystem::path& path);

}  // namespace tabebm
