#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace tabebm {

using Engine = std::mt19937_64;

/// Stream tags keep independent consumers of one seed from sharing draws.
enum class Stream : std::uint64_t {
    negatives = 1,
    mlp_init = 2,
    chain = 3,
    class_draw = 4,
    split = 5,
    subsample = 6,
    profile = 7,
    toy = 8,
};

/// Builds an engine for the substream identified by (seed, stream, indices...).
/// Two different index tuples give statistically independent streams, so work
/// can be spread across threads without changing results.
inline Engine make_engine(std::uint64_t seed, Stream stream,
                          std::initializer_list<std::uint64_t> indices = {}) {
    std::vector<std::uint32_t> words;
    words.reserve(4 + 2 * indices.size());
    auto push = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    push(static_cast<std::uint64_t>(stream));
    for (auto i : indices) {
        push(i);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Engine(seq);
}

}  // namespace tabebm
