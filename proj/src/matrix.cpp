#include "tabebm/matrix.hpp"

#include <algorithm>

#include "tabebm/errors.hpp"

namespace tabebm {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    for (const auto& r : rows) {
        append_row(std::span<const double>(r.begin(), r.size()));
    }
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    Matrix m;
    for (const auto& r : rows) {
        m.append_row(r);
    }
    return m;
}

Vector Matrix::column(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = (*this)(r, c);
    }
    return out;
}

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    } else if (values.size() != cols_) {
        throw DimensionMismatch("row has " + std::to_string(values.size()) + " values, expected " +
                                std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

void Matrix::append_rows(const Matrix& other) {
    if (other.rows_ == 0) {
        return;
    }
    if (rows_ == 0 && cols_ == 0) {
        cols_ = other.cols_;
    } else if (other.cols_ != cols_) {
        throw DimensionMismatch("cannot append matrix with " + std::to_string(other.cols_) +
                                " columns to one with " + std::to_string(cols_));
    }
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    rows_ += other.rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace tabebm
