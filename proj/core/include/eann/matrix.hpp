#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eann {

// Dense row-major matrix. Sized for the small systems this library solves
// (at most a few hundred parameters), not for general numerics.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
bool all_finite(std::span<const double> v);

// x := A^T A (A is m x n, result n x n, symmetric).
Matrix gram(const Matrix& a);

// y := A^T v (A is m x n, v length m).
std::vector<double> transpose_times(const Matrix& a, std::span<const double> v);

// Solves A x = b for symmetric positive definite A by Cholesky
// factorization. When the factorization breaks down, retries with a
// progressively boosted diagonal; returns false once the boost exceeds a
// generous cap (the system is treated as singular). A is taken by value
// and destroyed.
bool solve_spd(Matrix a, std::span<const double> b, std::vector<double>& x);

}  // namespace eann
