#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace phnet {

// Dense row-major matrix of doubles. The shapes handled here are small
// (weights and Jacobians of a single-hidden-layer network), so there is no
// sparse or blocked storage. Constructors that accept data reject NaN/Inf.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);  // zero-filled
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    std::string shape_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Standard product; throws ShapeError naming both operand shapes when the
// inner dimensions disagree.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// a * x for a vector x of length a.cols().
std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);

// Solves a*x = b for symmetric positive definite a via Cholesky. The
// symmetry check is relative to the largest entry (tolerance 1e-9). Throws
// NotPositiveDefinite when a pivot collapses, which the LM trainer treats as
// a rejected step.
std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b);

}  // namespace phnet
