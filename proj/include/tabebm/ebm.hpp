#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tabebm/classifier.hpp"
#include "tabebm/dataset.hpp"
#include "tabebm/matrix.hpp"

namespace tabebm {

struct NegativeSampleConfig {
    std::size_t count = 4;
    double alpha_dist = 5.0;
    double sigma_floor = 1e-6;
    std::uint64_t seed = 0;
};

/// Where the per-dimension spread used to place negatives comes from.
enum class SigmaSource { per_class, global };

/// Hypercube corners: coordinate d of every sample is +-alpha_dist * max(sigma_d, floor),
/// with an independent random sign. Samples are kept distinct when 2^D >= count.
Matrix generate_negative_samples(std::span<const double> sigma, const NegativeSampleConfig& cfg);

/// Population standard deviation of every column.
Vector column_std(const Matrix& points);

/// Energy model of one class, E_c(x) = -log(exp f0(x) + exp f1(x)), built from
/// a binary classifier separating the class rows from hypercube negatives.
class ClassEBM {
public:
    ClassEBM(std::size_t class_id, ClassifierModel classifier, Matrix negatives, Vector sigma);

    std::size_t class_id() const noexcept { return class_id_; }
    const ClassifierModel& classifier() const noexcept { return classifier_; }
    const Matrix& negatives() const noexcept { return negatives_; }
    const Vector& sigma() const noexcept { return sigma_; }
    std::size_t dim() const { return classifier_.input_dim(); }

    LogitPair logits(std::span<const double> x) const { return classifier_.logits(x); }
    double energy(std::span<const double> x) const;
    Vector energy_gradient(std::span<const double> x) const;
    /// Energy and gradient from one classifier pass; `gradient` is resized to dim().
    double energy_with_gradient(std::span<const double> x, Vector& gradient) const;

    bool operator==(const ClassEBM&) const = default;

private:
    std::size_t class_id_;
    ClassifierModel classifier_;
    Matrix negatives_;
    Vector sigma_;
};

/// -log(exp a + exp b) without overflow or underflow.
double energy_from_logits(LogitPair logits);

/// Fits the EBM of one class. `sigma_override`, when non-empty, replaces the
/// class's own column spread (used for the global-sigma variant).
ClassEBM fit_class_ebm(std::size_t class_id, const Matrix& class_rows, const NegativeSampleConfig& cfg,
                       const BackendConfig& backend, std::span<const double> sigma_override = {});

/// One EBM per class, each from its own rows only. Class c uses seed ^ c for
/// both negative placement and classifier initialization.
std::vector<ClassEBM> fit_all_class_ebms(const TabularDataset& train, const NegativeSampleConfig& cfg,
                                         const BackendConfig& backend,
                                         SigmaSource sigma_source = SigmaSource::per_class);

}  // namespace tabebm
