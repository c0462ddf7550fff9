// Copyright 2026 The fcmqem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "fcmqem/error.hpp"

namespace fcmqem {

/// Small dense row-major matrix. Sizes here never exceed 32x32, so every
/// operation is a plain triple loop.
class Matrix {
   public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
        : rows_(rows), cols_(cols), data_(std::move(row_major)) {
        if (data_.size() != rows * cols) {
            throw invalid_input("matrix data does not match its shape");
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t k = 0; k < n; k++) {
            m(k, k) = 1.0;
        }
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        std::size_t r = rows.size();
        std::size_t c = r == 0 ? 0 : rows.begin()->size();
        std::vector<double> data;
        data.reserve(r * c);
        for (const auto &row : rows) {
            if (row.size() != c) {
                throw invalid_input("ragged matrix rows");
            }
            data.insert(data.end(), row.begin(), row.end());
        }
        return Matrix(r, c, std::move(data));
    }

    std::size_t rows() const {
        return rows_;
    }
    std::size_t cols() const {
        return cols_;
    }
    bool is_square() const {
        return rows_ == cols_;
    }

    double &operator()(std::size_t r, std::size_t c) {
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    std::span<const double> data() const {
        return data_;
    }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; r++) {
            out[r] = (*this)(r, c);
        }
        return out;
    }

    void set_column(std::size_t c, std::span<const double> values) {
        for (std::size_t r = 0; r < rows_; r++) {
            (*this)(r, c) = values[r];
        }
    }

    bool operator==(const Matrix &other) const = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix &a, const Matrix &b) {
    if (a.cols() != b.rows()) {
        throw invalid_input("matrix product dimension mismatch");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t k = 0; k < a.cols(); k++) {
            double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); j++) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

inline std::vector<double> multiply(const Matrix &a, std::span<const double> x) {
    if (a.cols() != x.size()) {
        throw invalid_input("dimension mismatch");
    }
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); i++) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); j++) {
            acc += a(i, j) * x[j];
        }
        out[i] = acc;
    }
    return out;
}

/// Induced 1-norm: maximum absolute column sum.
inline double norm_1(const Matrix &a) {
    double best = 0.0;
    for (std::size_t c = 0; c < a.cols(); c++) {
        double s = 0.0;
        for (std::size_t r = 0; r < a.rows(); r++) {
            s += std::abs(a(r, c));
        }
        best = std::max(best, s);
    }
    return best;
}

inline double max_abs_diff(const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw invalid_input("shape mismatch");
    }
    double best = 0.0;
    for (std::size_t k = 0; k < a.data().size(); k++) {
        best = std::max(best, std::abs(a.data()[k] - b.data()[k]));
    }
    return best;
}

/// Kronecker product; `a` supplies the most significant index.
inline Matrix kronecker(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t j = 0; j < a.cols(); j++) {
            for (std::size_t k = 0; k < b.rows(); k++) {
                for (std::size_t l = 0; l < b.cols(); l++) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

/// Packed LU factors of P·A = L·U with unit-diagonal L.
struct LuFactorization {
    Matrix lu;
    std::vector<std::size_t> perm;  // row perm[k] of A sits at row k of P·A
    bool singular = false;
};

/// Doolittle elimination with partial (row) pivoting.
inline LuFactorization lu_factor(Matrix a) {
    if (!a.is_square()) {
        throw invalid_input("LU factorization requires a square matrix");
    }
    std::size_t n = a.rows();
    LuFactorization f{std::move(a), std::vector<std::size_t>(n), false};
    for (std::size_t k = 0; k < n; k++) {
        f.perm[k] = k;
    }
    Matrix &m = f.lu;
    for (std::size_t k = 0; k < n; k++) {
        std::size_t pivot = k;
        for (std::size_t r = k + 1; r < n; r++) {
            if (std::abs(m(r, k)) > std::abs(m(pivot, k))) {
                pivot = r;
            }
        }
        if (m(pivot, k) == 0.0) {
            f.singular = true;
            continue;
        }
        if (pivot != k) {
            for (std::size_t c = 0; c < n; c++) {
                std::swap(m(k, c), m(pivot, c));
            }
            std::swap(f.perm[k], f.perm[pivot]);
        }
        for (std::size_t r = k + 1; r < n; r++) {
            double factor = m(r, k) / m(k, k);
            m(r, k) = factor;
            for (std::size_t c = k + 1; c < n; c++) {
                m(r, c) -= factor * m(k, c);
            }
        }
    }
    return f;
}

inline std::vector<double> lu_solve(const LuFactorization &f, std::span<const double> b) {
    const Matrix &m = f.lu;
    std::size_t n = m.rows();
    if (f.singular) {
        throw numerical_error("cannot solve with a singular LU factorization");
    }
    std::vector<double> x(n);
    for (std::size_t r = 0; r < n; r++) {
        double acc = b[f.perm[r]];
        for (std::size_t c = 0; c < r; c++) {
            acc -= m(r, c) * x[c];
        }
        x[r] = acc;
    }
    for (std::size_t r = n; r-- > 0;) {
        double acc = x[r];
        for (std::size_t c = r + 1; c < n; c++) {
            acc -= m(r, c) * x[c];
        }
        x[r] = acc / m(r, r);
    }
    return x;
}

inline Matrix lu_inverse(const LuFactorization &f) {
    std::size_t n = f.lu.rows();
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; c++) {
        e[c] = 1.0;
        inv.set_column(c, lu_solve(f, e));
        e[c] = 0.0;
    }
    return inv;
}

/// Moore-Penrose pseudo-inverse via a complete orthogonal decomposition.
inline Matrix pseudo_inverse(const Matrix &a) {
    Eigen::MatrixXd e(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); r++) {
        for (std::size_t c = 0; c < a.cols(); c++) {
            e(r, c) = a(r, c);
        }
    }
    Eigen::MatrixXd p = e.completeOrthogonalDecomposition().pseudoInverse();
    Matrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < out.rows(); r++) {
        for (std::size_t c = 0; c < out.cols(); c++) {
            out(r, c) = p(r, c);
        }
    }
    return out;
}

}  // namespace fcmqem
