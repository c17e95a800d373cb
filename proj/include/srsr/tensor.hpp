// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace srsr {

/// Dense row-major matrix of doubles. Deliberately minimal: the sizes in
/// this project are tiny, so clarity and a fixed accumulation order beat
/// BLAS dispatch.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a[m x k] * b[k x n]
Matrix matmul(const Matrix& a, const Matrix& b);

/// a[m x d] * b[n x d]^T  (row-by-row dot products)
Matrix matmul_nt(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);
bool all_finite(const std::vector<double>& v);

/// Max |a - b| over all entries; shapes must already match.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);

} // namespace srsr
