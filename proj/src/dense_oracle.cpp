#include "lmqn/dense_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "lmqn/errors.hpp"

namespace lmqn {

namespace {

constexpr double kDenseTol = 1e-14;

void add_scaled_outer(Matrix& m, double c, const Vec& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m(i, j) += c * a[i] * a[j];
}

void guard_small_n(const PairStore& store) {
    if (store.dimension() > 1000)
        throw std::invalid_argument("dense oracle: n too large for dense references");
}

} // namespace

DensePair dense_broyden(const PairStore& store, const BroydenConfig& config) {
    guard_small_n(store);
    if (config.gamma != store.gamma())
        throw std::invalid_argument("dense_broyden: config gamma differs from the store's");
    const std::size_t n = store.dimension();
    const double phi = config.phi;

    Matrix b = config.gamma * Matrix::identity(n);
    Matrix h = (1.0 / config.gamma) * Matrix::identity(n);

    for (std::size_t j = 0; j < store.count(); ++j) {
        const Vec& s = store.s(j);
        const Vec& y = store.y(j);
        const double sty = dot(s, y);

        const Vec bs = matvec(b, s);
        const double sbs = dot(s, bs);
        if (std::abs(sty) < kDenseTol * nrm2(s) * nrm2(y) || std::abs(sbs) < kDenseTol)
            throw BreakdownError("dense_broyden: degenerate denominator");

        Vec w = scaled(1.0 / sty, y);
        axpy(-1.0 / sbs, bs, w);
        add_scaled_outer(b, -1.0 / sbs, bs);
        add_scaled_outer(b, 1.0 / sty, y);
        add_scaled_outer(b, phi * sbs, w);
        symmetrize(b);

        const Vec hy = matvec(h, y);
        const double yhy = dot(y, hy);
        if (std::abs(yhy) < kDenseTol) throw BreakdownError("dense_broyden: y'Hy underflow");
        const double num = (1.0 - phi) * sty * sty;
        const double weight = num / (num + phi * yhy * sbs);
        Vec v = scaled(1.0 / sty, s);
        axpy(-1.0 / yhy, hy, v);
        add_scaled_outer(h, 1.0 / sty, s);
        add_scaled_outer(h, -1.0 / yhy, hy);
        add_scaled_outer(h, weight * yhy, v);
        symmetrize(h);
    }
    return {std::move(b), std::move(h)};
}

DensePair dense_sr1(const PairStore& store) {
    guard_small_n(store);
    const std::size_t n = store.dimension();
    const double gamma = store.gamma();

    Matrix b = gamma * Matrix::identity(n);
    Matrix h = (1.0 / gamma) * Matrix::identity(n);

    for (std::size_t j = 0; j < store.count(); ++j) {
        const Vec& s = store.s(j);
        const Vec& y = store.y(j);

        Vec res_b = y;
        axpy(-1.0, matvec(b, s), res_b);
        const double den_b = dot(s, res_b);
        if (std::abs(den_b) < kDenseTol * nrm2(s) * nrm2(res_b) || den_b == 0.0)
            throw BreakdownError("dense_sr1: zero update denominator");
        add_scaled_outer(b, 1.0 / den_b, res_b);
        symmetrize(b);

        Vec res_h = s;
        axpy(-1.0, matvec(h, y), res_h);
        const double den_h = dot(y, res_h);
        if (std::abs(den_h) < kDenseTol * nrm2(y) * nrm2(res_h) || den_h == 0.0)
            throw BreakdownError("dense_sr1: zero dual denominator");
        add_scaled_outer(h, 1.0 / den_h, res_h);
        symmetrize(h);
    }
    return {std::move(b), std::move(h)};
}

Vec dense_solve(const Matrix& a, const Vec& rhs) {
    if (a.rows() != a.cols() || a.rows() != rhs.size())
        throw std::invalid_argument("dense_solve: shape mismatch");
    const std::size_t n = a.rows();
    Matrix lu = a;
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t imax = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu(i, k));
            if (v > best) {
                best = v;
                imax = i;
            }
        }
        if (best == 0.0) throw BreakdownError("dense_solve: singular matrix");
        if (imax != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(imax, j));
            std::swap(piv[k], piv[imax]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            lu(i, k) /= lu(k, k);
            const double lik = lu(i, k);
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= lik * lu(k, j);
        }
    }

    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[piv[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
        x[i] /= lu(i, i);
    }
    return x;
}

bool cholesky_pd(const Matrix& a) {
    if (a.rows() != a.cols()) return false;
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0 || !std::isfinite(d)) return false;
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return true;
}

PairStore swapped_store(const PairStore& store) {
    PairStore sw(store.dimension(), store.memory(), 1.0 / store.gamma());
    for (std::size_t i = 0; i < store.count(); ++i) sw.push(store.y(i), store.s(i), false);
    return sw;
}

namespace {

/// H assembled from a 2p x 2p middle matrix against columns [S  H0*Y].
Matrix assemble_inverse_form(const PairStore& store, const Matrix& middle) {
    const std::size_t n = store.dimension();
    const std::size_t p = store.count();
    const double hg = 1.0 / store.gamma();

    std::vector<Vec> cols;
    cols.reserve(2 * p);
    for (std::size_t i = 0; i < p; ++i) cols.push_back(store.s(i));
    for (std::size_t i = 0; i < p; ++i) cols.push_back(scaled(hg, store.y(i)));

    Matrix h = hg * Matrix::identity(n);
    for (std::size_t a = 0; a < 2 * p; ++a)
        for (std::size_t b = 0; b < 2 * p; ++b) {
            if (middle(a, b) == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    h(i, j) += cols[a][i] * middle(a, b) * cols[b][j];
        }
    return h;
}

/// B assembled from a 2p x 2p middle matrix against columns [B0*S  Y].
Matrix assemble_forward_form(const PairStore& store, const Matrix& middle) {
    const std::size_t n = store.dimension();
    const std::size_t p = store.count();
    const double gamma = store.gamma();

    std::vector<Vec> cols;
    cols.reserve(2 * p);
    for (std::size_t i = 0; i < p; ++i) cols.push_back(scaled(gamma, store.s(i)));
    for (std::size_t i = 0; i < p; ++i) cols.push_back(store.y(i));

    Matrix b = gamma * Matrix::identity(n);
    for (std::size_t a = 0; a < 2 * p; ++a)
        for (std::size_t c = 0; c < 2 * p; ++c) {
            if (middle(a, c) == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    b(i, j) += cols[a][i] * middle(a, c) * cols[c][j];
        }
    return b;
}

/// Upper-triangular inverse by back substitution.
Matrix upper_inverse(const Matrix& u) {
    const std::size_t p = u.rows();
    Matrix inv(p, p);
    for (std::size_t c = 0; c < p; ++c) {
        Vec x(p, 0.0);
        x[c] = 1.0;
        for (std::size_t ii = p; ii > 0; --ii) {
            const std::size_t i = ii - 1;
            for (std::size_t j = i + 1; j < p; ++j) x[i] -= u(i, j) * x[j];
            x[i] /= u(i, i);
        }
        for (std::size_t i = 0; i < p; ++i) inv(i, c) = x[i];
    }
    return inv;
}

} // namespace

DualityReport check_duality(const PairStore& store) {
    guard_small_n(store);
    const std::size_t p = store.count();
    if (p == 0) return {};
    const double hg = 1.0 / store.gamma();
    const LdrSplit ldr = store.gram().ldr_views();
    const Matrix& yty = store.gram().yty();

    DualityReport report;

    // (a) closed two-block form of the BFGS inverse middle matrix vs dense H
    {
        const Matrix rbar = ldr.r + ldr.d;
        const Matrix rbar_inv = upper_inverse(rbar);
        Matrix dyy(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) dyy(i, j) = ldr.d(i, j) + hg * yty(i, j);

        Matrix middle(2 * p, 2 * p);
        const Matrix tl = transpose(rbar_inv) * dyy * rbar_inv;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                middle(i, j) = tl(i, j);
                middle(i, p + j) = -rbar_inv(j, i);  // -Rbar^{-T}
                middle(p + i, j) = -rbar_inv(i, j);  // -Rbar^{-1}
            }
        const Matrix h_closed = assemble_inverse_form(store, middle);
        const Matrix h_dense = dense_broyden(store, BroydenConfig{0.0, store.gamma()}).h;
        report.bfgs_closed_form_dev = max_abs(h_closed - h_dense);
    }

    // (b) DFP inverse compact form on swapped data == BFGS forward compact
    // form on the original data
    {
        const PairStore sw = swapped_store(store);
        const BroydenConfig dfp{1.0, sw.gamma()};
        // at phi = 1 the middle-matrix scales reduce to -s'y
        std::vector<double> sw_lambdas(p);
        for (std::size_t i = 0; i < p; ++i) sw_lambdas[i] = -sw.gram().sty()(i, i);
        // "H" of the swapped DFP data is the BFGS B of the original data
        const Matrix swapped_mtilde = assemble_mtilde_direct(sw.gram(), sw_lambdas, dfp);
        const Matrix b_via_swap = assemble_inverse_form(sw, swapped_mtilde);

        Matrix forward_block(2 * p, 2 * p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                forward_block(i, j) = store.gamma() * store.gram().sts()(i, j);
                forward_block(i, p + j) = ldr.l(i, j);
                forward_block(p + i, j) = ldr.l(j, i);
                forward_block(p + i, p + j) = -ldr.d(i, j);
            }
        SymIndefFactor factor(forward_block);
        const Matrix m_bfgs = -1.0 * factor.inverse();
        const Matrix b_direct = assemble_forward_form(store, m_bfgs);
        const Matrix b_dense = dense_broyden(store, BroydenConfig{0.0, store.gamma()}).b;
        report.dfp_swap_dev =
            std::max(max_abs(b_via_swap - b_direct), max_abs(b_via_swap - b_dense));
    }

    // (c) SR1 inverse compact form on swapped data == dense SR1 B
    {
        const PairStore sw = swapped_store(store);
        const LdrSplit ldr_sw = sw.gram().ldr_views();
        const Matrix& yty_sw = sw.gram().yty();
        Matrix middle(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                middle(i, j) = ldr_sw.d(i, j) + ldr_sw.r(i, j) + ldr_sw.r(j, i) -
                               yty_sw(i, j) / sw.gamma();
        SymIndefFactor factor(middle);
        const Matrix mt = factor.inverse();

        const std::size_t n = store.dimension();
        Matrix b_via_swap = (1.0 / sw.gamma()) * Matrix::identity(n);
        std::vector<Vec> psi;
        for (std::size_t i = 0; i < p; ++i) {
            Vec col = sw.s(i);
            axpy(-1.0 / sw.gamma(), sw.y(i), col);
            psi.push_back(std::move(col));
        }
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t c = 0; c < p; ++c)
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        b_via_swap(i, j) += psi[a][i] * mt(a, c) * psi[c][j];

        const Matrix b_dense = dense_sr1(store).b;
        report.sr1_swap_dev = max_abs(b_via_swap - b_dense);
    }

    return report;
}

} // namespace lmqn
