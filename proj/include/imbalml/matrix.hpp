#pragma once

#include <cstddef>
#include <vector>

#include "imbalml/errors.hpp"

namespace imbalml {

// Dense row-major matrix of doubles. The whole pipeline runs in double so the
// finite-difference checks have headroom.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    static Matrix zeros_like(const Matrix& other) { return Matrix(other.rows_, other.cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* row(std::size_t r) { return v_.data() + r * cols_; }
    const double* row(std::size_t r) const { return v_.data() + r * cols_; }

    bool operator==(const Matrix& other) const = default;

    bool all_finite() const;

    void check_shape(std::size_t rows, std::size_t cols, const char* what) const {
        if (rows_ != rows || cols_ != cols)
            throw ContractError(std::string(what) + ": shape mismatch");
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// c = a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// c = a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// acc += a^T * b, shapes must already agree
void add_matmul_tn(Matrix& acc, const Matrix& a, const Matrix& b);

void add_inplace(Matrix& a, const Matrix& b);
void scale_inplace(Matrix& a, double s);
Matrix hadamard(const Matrix& a, const Matrix& b);

// Per-row binary label matrix used by the metric suite.
struct LabelMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> v;

    LabelMatrix() = default;
    LabelMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0) {}

    std::uint8_t& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    std::uint8_t operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }

    bool operator==(const LabelMatrix& other) const = default;
};

} // namespace imbalml
