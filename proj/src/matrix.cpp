#include "phnet/matrix.hpp"

#include <cmath>

#include "phnet/errors.hpp"

namespace phnet {

namespace {

void require_finite(const std::vector<double>& data) {
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw RangeError("Matrix: non-finite entry rejected");
        }
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("Matrix: dimensions must be positive, got " + std::to_string(rows) +
                         "x" + std::to_string(cols));
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("Matrix: dimensions must be positive, got " + std::to_string(rows) +
                         "x" + std::to_string(cols));
    }
    if (data_.size() != rows * cols) {
        throw ShapeError("Matrix: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    require_finite(data_);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

std::string Matrix::shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions disagree, " + a.shape_string() + " * " +
                         b.shape_string());
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) {
        throw ShapeError("matvec: matrix " + a.shape_string() + " against vector of length " +
                         std::to_string(x.size()));
    }
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            acc += a(i, j) * x[j];
        }
        out[i] = acc;
    }
    return out;
}

std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b) {
    const std::size_t n = a.rows();
    if (a.cols() != n) {
        throw ShapeError("solve_spd: matrix must be square, got " + a.shape_string());
    }
    if (b.size() != n) {
        throw ShapeError("solve_spd: rhs length " + std::to_string(b.size()) +
                         " against matrix " + a.shape_string());
    }

    double max_abs = 0.0;
    for (double v : a.data()) {
        max_abs = std::max(max_abs, std::fabs(v));
    }
    const double sym_tol = 1e-9 * std::max(max_abs, 1e-300);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::fabs(a(i, j) - a(j, i)) > sym_tol) {
                throw ShapeError("solve_spd: matrix is not symmetric at (" + std::to_string(i) +
                                 "," + std::to_string(j) + ")");
            }
        }
    }

    // Lower-triangular Cholesky factor, in place on a copy.
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            diag -= l(j, k) * l(j, k);
        }
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw NotPositiveDefinite("solve_spd: non-positive pivot at row " +
                                      std::to_string(j));
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                acc -= l(i, k) * l(j, k);
            }
            l(i, j) = acc / ljj;
        }
    }

    // Forward then backward substitution.
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            acc -= l(i, k) * y[k];
        }
        y[i] = acc / l(i, i);
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) {
            acc -= l(k, ii) * x[k];
        }
        x[ii] = acc / l(ii, ii);
    }
    return x;
}

}  // namespace phnet
