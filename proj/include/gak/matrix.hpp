#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gak {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    const std::vector<double>& data() const noexcept { return data_; }

    /// Rows `ri` and columns `ci`, in the given orders.
    Matrix submatrix(std::span<const std::size_t> ri, std::span<const std::size_t> ci) const;

    double max_abs() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Throws ValidationError unless `a` is square, finite, and symmetric to
/// rel_tol * max(1, max|a_ij|).
void require_symmetric(const Matrix& a, double rel_tol = 1e-12);

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations. Sweeps stop once the off-diagonal Frobenius norm drops below
/// `tol`; by default 1e-12 times the matrix Frobenius norm.
std::vector<double> symmetric_eigenvalues(const Matrix& a, double tol = 0.0);

}  // namespace gak
