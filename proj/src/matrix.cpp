#include "lmqn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lmqn/errors.hpp"

namespace lmqn {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

namespace {
void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}
} // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "matrix add");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "matrix sub");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix mul: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix operator*(double alpha, const Matrix& a) {
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = alpha * a(i, j);
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix c(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
    return c;
}

Vec matvec(const Matrix& a, const Vec& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

void symmetrize(Matrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

double symmetry_gap(const Matrix& a) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            g = std::max(g, std::abs(a(i, j) - a(j, i)));
    return g;
}

// ---------------------------------------------------------------------------
// SymIndefFactor

SymIndefFactor::SymIndefFactor(const Matrix& a, double pivot_rel_tol)
    : n_(a.rows()), tol_(pivot_rel_tol), w_(a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("SymIndefFactor: square matrix required");
    scale_ = max_abs(a);
    block_start_.assign(n_, 0);
    perm_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    min_pivot_ratio_ = n_ == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    factor();
}

// Symmetric row/column interchange i<->j (i < j) on lower-triangle storage.
// Rows of already-computed L columns sit to the left and are swapped by the
// first loop.
void SymIndefFactor::sym_swap(std::size_t i, std::size_t j) {
    if (i == j) return;
    if (i > j) std::swap(i, j);
    for (std::size_t c = 0; c < i; ++c) std::swap(w_(i, c), w_(j, c));
    std::swap(w_(i, i), w_(j, j));
    for (std::size_t r = i + 1; r < j; ++r) std::swap(w_(r, i), w_(j, r));
    for (std::size_t r = j + 1; r < n_; ++r) std::swap(w_(r, i), w_(r, j));
    std::swap(perm_[i], perm_[j]);
}

void SymIndefFactor::factor() {
    // threshold that balances element growth between 1x1 and 2x2 pivots
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    const double tiny = tol_ * (scale_ > 0.0 ? scale_ : 1.0);

    std::size_t k = 0;
    while (k < n_) {
        double absakk = std::abs(w_(k, k));
        std::size_t imax = k;
        double colmax = 0.0;
        for (std::size_t i = k + 1; i < n_; ++i) {
            const double v = std::abs(w_(i, k));
            if (v > colmax) {
                colmax = v;
                imax = i;
            }
        }

        int kstep = 1;
        if (std::max(absakk, colmax) <= tiny) {
            // Whole remaining column is negligible: singular pivot.
            singular_ = true;
            min_pivot_ratio_ = 0.0;
            block_start_[k] = 1;
            // zero out the column so solve() on a forced path stays finite
            for (std::size_t i = k + 1; i < n_; ++i) w_(i, k) = 0.0;
            ++k;
            continue;
        }

        bool swap_needed = false;
        std::size_t pivot_row = k;
        if (absakk < alpha * colmax) {
            double rowmax = 0.0;
            for (std::size_t i = k; i < n_; ++i) {
                if (i == imax) continue;
                const double v = i < imax ? std::abs(w_(imax, i)) : std::abs(w_(i, imax));
                rowmax = std::max(rowmax, v);
            }
            if (absakk * rowmax >= alpha * colmax * colmax) {
                kstep = 1;
            } else if (std::abs(w_(imax, imax)) >= alpha * rowmax) {
                kstep = 1;
                swap_needed = true;
                pivot_row = imax;
            } else {
                kstep = 2;
                swap_needed = true;
                pivot_row = imax;
            }
        }

        if (kstep == 1) {
            if (swap_needed) sym_swap(k, pivot_row);
            const double d = w_(k, k);
            min_pivot_ratio_ = std::min(min_pivot_ratio_, std::abs(d) / (scale_ > 0.0 ? scale_ : 1.0));
            if (std::abs(d) <= tiny) {
                singular_ = true;
                block_start_[k] = 1;
                for (std::size_t i = k + 1; i < n_; ++i) w_(i, k) = 0.0;
                ++k;
                continue;
            }
            std::vector<double> l(n_ - k - 1);
            for (std::size_t i = k + 1; i < n_; ++i) l[i - k - 1] = w_(i, k) / d;
            for (std::size_t i = k + 1; i < n_; ++i)
                for (std::size_t j = k + 1; j <= i; ++j)
                    w_(i, j) -= l[i - k - 1] * w_(j, k);
            for (std::size_t i = k + 1; i < n_; ++i) w_(i, k) = l[i - k - 1];
            block_start_[k] = 1;
            ++k;
        } else {
            // 2x2 pivot on rows (k, k+1) after moving the off-diagonal
            // candidate into row k+1.
            if (swap_needed && pivot_row != k + 1) sym_swap(k + 1, pivot_row);
            const double e00 = w_(k, k);
            const double e10 = w_(k + 1, k);
            const double e11 = w_(k + 1, k + 1);
            const double det = e00 * e11 - e10 * e10;
            const double emax = std::max({std::abs(e00), std::abs(e10), std::abs(e11)});
            const double eff = emax > 0.0 ? std::abs(det) / emax : 0.0;
            min_pivot_ratio_ = std::min(min_pivot_ratio_, eff / (scale_ > 0.0 ? scale_ : 1.0));
            if (eff <= tiny) {
                singular_ = true;
                block_start_[k] = 2;
                for (std::size_t i = k + 2; i < n_; ++i) w_(i, k) = w_(i, k + 1) = 0.0;
                k += 2;
                continue;
            }
            std::vector<double> l1(n_ - k - 2), l2(n_ - k - 2);
            for (std::size_t i = k + 2; i < n_; ++i) {
                const double b0 = w_(i, k);
                const double b1 = w_(i, k + 1);
                l1[i - k - 2] = (e11 * b0 - e10 * b1) / det;
                l2[i - k - 2] = (e00 * b1 - e10 * b0) / det;
            }
            for (std::size_t i = k + 2; i < n_; ++i)
                for (std::size_t j = k + 2; j <= i; ++j)
                    w_(i, j) -= l1[i - k - 2] * w_(j, k) + l2[i - k - 2] * w_(j, k + 1);
            for (std::size_t i = k + 2; i < n_; ++i) {
                w_(i, k) = l1[i - k - 2];
                w_(i, k + 1) = l2[i - k - 2];
            }
            block_start_[k] = 2;
            k += 2;
        }
    }
}

Vec SymIndefFactor::solve(const Vec& b) const {
    if (b.size() != n_) throw std::invalid_argument("SymIndefFactor::solve: length mismatch");
    if (singular_) throw BreakdownError("SymIndefFactor: singular middle matrix");

    Vec y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = b[perm_[i]];

    // forward substitution with unit lower factor
    for (std::size_t k = 0; k < n_;) {
        const int bs = block_start_[k];
        if (bs == 1) {
            for (std::size_t i = k + 1; i < n_; ++i) y[i] -= w_(i, k) * y[k];
            ++k;
        } else {
            for (std::size_t i = k + 2; i < n_; ++i)
                y[i] -= w_(i, k) * y[k] + w_(i, k + 1) * y[k + 1];
            k += 2;
        }
    }

    // block diagonal solve
    for (std::size_t k = 0; k < n_;) {
        const int bs = block_start_[k];
        if (bs == 1) {
            y[k] /= w_(k, k);
            ++k;
        } else {
            const double e00 = w_(k, k);
            const double e10 = w_(k + 1, k);
            const double e11 = w_(k + 1, k + 1);
            const double det = e00 * e11 - e10 * e10;
            const double y0 = y[k];
            const double y1 = y[k + 1];
            y[k] = (e11 * y0 - e10 * y1) / det;
            y[k + 1] = (e00 * y1 - e10 * y0) / det;
            k += 2;
        }
    }

    // back substitution with the transposed factor
    for (std::size_t k = n_; k > 0;) {
        const std::size_t kk = k - 1;
        std::size_t start = kk;
        if (block_start_[kk] == 0) --start;  // inside a 2x2 block
        if (block_start_[start] == 1) {
            for (std::size_t i = start + 1; i < n_; ++i) y[start] -= w_(i, start) * y[i];
            k = start;
        } else {
            for (std::size_t i = start + 2; i < n_; ++i) {
                y[start] -= w_(i, start) * y[i];
                y[start + 1] -= w_(i, start + 1) * y[i];
            }
            k = start;
        }
    }

    Vec x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[perm_[i]] = y[i];
    return x;
}

Matrix SymIndefFactor::inverse() const {
    Matrix inv(n_, n_);
    for (std::size_t j = 0; j < n_; ++j) {
        Vec e(n_, 0.0);
        e[j] = 1.0;
        const Vec col = solve(e);
        for (std::size_t i = 0; i < n_; ++i) inv(i, j) = col[i];
    }
    symmetrize(inv);
    return inv;
}

} // namespace lmqn
