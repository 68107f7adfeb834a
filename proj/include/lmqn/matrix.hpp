#pragma once

#include <cstddef>
#include <vector>

#include "lmqn/vec.hpp"

namespace lmqn {

/// Dense row-major matrix. Used for the small middle factors of the compact
/// representations (order <= ~2(m+1)) and for the brute-force reference
/// matrices in tests; never for length-n solver data.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double alpha, const Matrix& a);
Matrix transpose(const Matrix& a);

Vec matvec(const Matrix& a, const Vec& x);

/// (A + A') / 2, in place.
void symmetrize(Matrix& a);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

/// max |A(i,j) - A(j,i)|
double symmetry_gap(const Matrix& a);

/// LDL' factorization with Bunch-Kaufman pivoting, for symmetric matrices
/// that may be indefinite. A = P' L D L' P with D block diagonal (1x1 and
/// 2x2 blocks). Factorization never throws; singular() reports whether a
/// pivot fell below pivot_rel_tol * max|A|, and solve()/inverse() refuse to
/// run on a singular factor.
class SymIndefFactor {
public:
    explicit SymIndefFactor(const Matrix& a, double pivot_rel_tol = 1e-14);

    bool singular() const { return singular_; }

    /// Smallest effective pivot magnitude seen, relative to max|A|.
    double min_pivot_ratio() const { return min_pivot_ratio_; }

    Vec solve(const Vec& b) const;
    Matrix inverse() const;

private:
    void factor();
    void sym_swap(std::size_t i, std::size_t j);

    std::size_t n_ = 0;
    double tol_ = 0.0;
    double scale_ = 0.0;
    Matrix w_;                       // lower triangle: L below blocks, D on them
    std::vector<int> block_start_;   // 1 or 2 at the start of each D block, 0 inside
    std::vector<std::size_t> perm_;  // (P x)[i] = x[perm_[i]]
    bool singular_ = false;
    double min_pivot_ratio_ = 0.0;
};

} // namespace lmqn
