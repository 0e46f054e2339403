#include "tabebm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tabebm/dataset.hpp"
#include "tabebm/errors.hpp"
#include "tabebm/parallel.hpp"

namespace tabebm {

ChainState init_chains(const Matrix& class_rows, std::size_t n_chains, const SGLDConfig& cfg) {
    if (class_rows.rows() == 0) {
        throw EmptyClassError("cannot initialise chains from an empty class");
    }
    const std::size_t dim = class_rows.cols();
    ChainState state;
    state.positions = Matrix(n_chains, dim);
    state.anchors.resize(n_chains);
    state.streams.reserve(n_chains);
    for (std::size_t i = 0; i < n_chains; ++i) {
        state.streams.push_back({make_engine(cfg.seed, Stream::chain, {i}), {}});
        auto& stream = state.streams.back();
        std::uniform_int_distribution<std::size_t> pick(0, class_rows.rows() - 1);
        state.anchors[i] = pick(stream.engine);
        auto anchor = class_rows.row(state.anchors[i]);
        auto pos = state.positions.row(i);
        for (std::size_t d = 0; d < dim; ++d) {
            pos[d] = anchor[d] + cfg.sigma_start * stream.normal(stream.engine);
        }
    }
    return state;
}

namespace {

// One update of chain i; returns the energy at the pre-update position.
double step_chain(const ClassEBM& ebm, ChainState& state, std::size_t i, std::size_t step,
                  const SGLDConfig& cfg, Vector& gradient) {
    auto pos = state.positions.row(i);
    auto& stream = state.streams[i];
    const double e = ebm.energy_with_gradient(pos, gradient);
    for (std::size_t d = 0; d < pos.size(); ++d) {
        pos[d] = pos[d] - cfg.alpha_step * gradient[d] + cfg.alpha_noise * stream.normal(stream.engine);
        if (!std::isfinite(pos[d]) || !std::isfinite(gradient[d])) {
            throw NonFiniteState("chain " + std::to_string(i) + " became non-finite at step " +
                                 std::to_string(step));
        }
    }
    return e;
}

EnergyTraceRow summarize(std::size_t step, std::span<const double> energies) {
    EnergyTraceRow row;
    row.step = step;
    if (energies.empty()) {
        return row;
    }
    double sum = 0.0;
    row.min_energy = energies[0];
    row.max_energy = energies[0];
    for (double e : energies) {
        sum += e;
        row.min_energy = std::min(row.min_energy, e);
        row.max_energy = std::max(row.max_energy, e);
    }
    row.mean_energy = sum / static_cast<double>(energies.size());
    return row;
}

void check_state(const ClassEBM& ebm, const ChainState& state) {
    if (state.positions.rows() != state.streams.size()) {
        throw DimensionMismatch("chain state has mismatched streams");
    }
    if (state.positions.rows() > 0 && state.positions.cols() != ebm.dim()) {
        throw DimensionMismatch("chain dimension does not match the energy model");
    }
    for (double v : state.positions.data()) {
        if (!std::isfinite(v)) {
            throw NonFiniteState("chain state contains non-finite positions");
        }
    }
}

}  // namespace

ChainState sgld_step(const ClassEBM& ebm, ChainState state, const SGLDConfig& cfg) {
    check_state(ebm, state);
    parallel_for(state.positions.rows(), [&](std::size_t i) {
        thread_local Vector gradient;
        step_chain(ebm, state, i, state.step, cfg, gradient);
    });
    ++state.step;
    return state;
}

ChainState run_sgld(const ClassEBM& ebm, ChainState state, const SGLDConfig& cfg) {
    check_state(ebm, state);
    const std::size_t n = state.positions.rows();
    const std::size_t steps = cfg.steps;
    // energies[t * n + i]: energy of chain i after t updates.
    std::vector<double> energies;
    if (cfg.record_trace) {
        energies.resize((steps + 1) * n);
    }
    const std::size_t start_step = state.step;
    parallel_for(n, [&](std::size_t i) {
        thread_local Vector gradient;
        for (std::size_t t = 0; t < steps; ++t) {
            const double e = step_chain(ebm, state, i, start_step + t, cfg, gradient);
            if (cfg.record_trace) {
                energies[t * n + i] = e;
            }
        }
        if (cfg.record_trace) {
            energies[steps * n + i] = ebm.energy(state.positions.row(i));
        }
    });
    state.step = start_step + steps;
    if (cfg.record_trace) {
        for (std::size_t t = 0; t <= steps; ++t) {
            state.trace.push_back(
                summarize(start_step + t, std::span<const double>(energies).subspan(t * n, n)));
        }
    }
    return state;
}

void write_energy_trace_csv(const std::vector<EnergyTraceRow>& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FileError("cannot write '" + path.string() + "'");
    }
    out << "step,mean_energy,min_energy,max_energy\n";
    for (const auto& row : trace) {
        out << row.step << ',' << format_double(row.mean_energy) << ',' << format_double(row.min_energy)
            << ',' << format_double(row.max_energy) << '\n';
    }
}

}  // namespace tabebm
