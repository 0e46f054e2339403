#include "tabebm/toy_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tabebm/errors.hpp"
#include "tabebm/random.hpp"

namespace tabebm::toy {

TabularDataset gaussian_blobs(std::span<const std::size_t> rows_per_class, const Matrix& means,
                              double stddev, std::uint64_t seed) {
    if (rows_per_class.size() != means.rows()) {
        throw InvalidArgument("one mean per class required");
    }
    auto engine = make_engine(seed, Stream::toy);
    std::normal_distribution<double> normal(0.0, stddev);
    Matrix x(0, means.cols());
    std::vector<std::size_t> y;
    Vector row(means.cols());
    for (std::size_t c = 0; c < rows_per_class.size(); ++c) {
        for (std::size_t i = 0; i < rows_per_class[c]; ++i) {
            for (std::size_t d = 0; d < means.cols(); ++d) {
                row[d] = means(c, d) + normal(engine);
            }
            x.append_row(row);
            y.push_back(c);
        }
    }
    return make_numeric_dataset(std::move(x), std::move(y), rows_per_class.size());
}

TabularDataset two_class_blobs(std::size_t rows_per_class, std::size_t dims, std::uint64_t seed) {
    Matrix means(2, dims);
    for (std::size_t d = 0; d < dims; ++d) {
        means(0, d) = -1.0;
        means(1, d) = 1.0;
    }
    const std::size_t rows[] = {rows_per_class, rows_per_class};
    return gaussian_blobs(rows, means, 1.0, seed);
}

TabularDataset two_moons(std::size_t rows_per_class, double noise, std::uint64_t seed) {
    auto engine = make_engine(seed, Stream::toy);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::normal_distribution<double> jitter(0.0, noise);
    Matrix x(0, 2);
    std::vector<std::size_t> y;
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < rows_per_class; ++i) {
            const double t = angle(engine);
            double px = std::cos(t);
            double py = std::sin(t);
            if (c == 1) {
                px = 1.0 - px;
                py = 0.5 - py;
            }
            const double jx = jitter(engine);
            const double jy = jitter(engine);
            const double point[] = {px + jx, py + jy};
            x.append_row(point);
            y.push_back(c);
        }
    }
    return make_numeric_dataset(std::move(x), std::move(y), 2);
}

TabularDataset many_class_blobs(std::size_t classes, std::size_t dims, std::uint64_t seed) {
    auto engine = make_engine(seed, Stream::toy, {classes});
    std::uniform_real_distribution<double> centre(-4.0, 4.0);
    Matrix means(classes, dims);
    for (double& v : means.data()) {
        v = centre(engine);
    }
    std::vector<std::size_t> rows(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        rows[c] = 6 + (7 * c) % 37;
    }
    return gaussian_blobs(rows, means, 0.5, seed);
}

}  // namespace tabebm::toy
