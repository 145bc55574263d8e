#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace asymspec {

using cplx = std::complex<double>;

// Dense row-major matrix of doubles. Row pointers are contiguous, so hot
// loops can run on raw spans.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
        std::size_t i = 0;
        for (const auto& r : rows) {
            if (r.size() != m.cols_) throw std::invalid_argument("Matrix::from: ragged rows");
            std::size_t j = 0;
            for (double v : r) m(i, j++) = v;
            ++i;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix select_rows(const std::vector<std::size_t>& idx) const {
        Matrix s(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < cols_; ++j) s(i, j) = (*this)(idx[i], j);
        return s;
    }

    Matrix select_square(const std::vector<std::size_t>& idx) const {
        Matrix s(idx.size(), idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = (*this)(idx[i], idx[j]);
        return s;
    }

    Matrix select(const std::vector<std::size_t>& row_idx,
                  const std::vector<std::size_t>& col_idx) const {
        Matrix s(row_idx.size(), col_idx.size());
        for (std::size_t i = 0; i < row_idx.size(); ++i)
            for (std::size_t j = 0; j < col_idx.size(); ++j)
                s(i, j) = (*this)(row_idx[i], col_idx[j]);
        return s;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_)
            if (std::abs(v) > m) m = std::abs(v);
        return m;
    }

    double max_abs_diff(const Matrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw std::invalid_argument("max_abs_diff: shape mismatch");
        double m = 0.0;
        for (std::size_t k = 0; k < data_.size(); ++k) {
            double d = std::abs(data_[k] - other.data_[k]);
            if (d > m) m = d;
        }
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ar = a.row(i);
        double* cr = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = ar[k];
            if (aik == 0.0) continue;
            const double* br = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) cr[j] += aik * br[j];
        }
    }
    return c;
}

// Neumaier-compensated dot product; used wherever correlations are
// accumulated so that long time axes do not erode the low bits.
inline double kahan_dot(const double* a, const double* b, std::size_t n) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double term = a[t] * b[t];
        double next = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - next) + term;
        else
            comp += (term - next) + sum;
        sum = next;
    }
    return sum + comp;
}

inline double kahan_sum(const double* a, std::size_t n) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double term = a[t];
        double next = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - next) + term;
        else
            comp += (term - next) + sum;
        sum = next;
    }
    return sum + comp;
}

}  // namespace asymspec
