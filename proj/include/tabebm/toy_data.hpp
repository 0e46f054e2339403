#pragma once

#include <cstdint>
#include <span>

#include "tabebm/dataset.hpp"

namespace tabebm::toy {

/// Isotropic Gaussian clusters; class c has rows_per_class[c] rows around means.row(c).
TabularDataset gaussian_blobs(std::span<const std::size_t> rows_per_class, const Matrix& means,
                              double stddev, std::uint64_t seed);

/// Two classes with means -1 and +1 in every coordinate and identity covariance.
TabularDataset two_class_blobs(std::size_t rows_per_class, std::size_t dims, std::uint64_t seed);

/// Interleaved half circles in 2-D with Gaussian noise.
TabularDataset two_moons(std::size_t rows_per_class, double noise, std::uint64_t seed);

/// Many imbalanced classes (class c has 6 + (7c mod 37) rows) with centres
/// spread uniformly over [-4, 4]^dims.
TabularDataset many_class_blobs(std::size_t classes, std::size_t dims, std::uint64_t seed);

}  // namespace tabebm::toy
