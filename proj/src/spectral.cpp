#include "lmqn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lmqn {

namespace {
constexpr double kNearSingularTol = 1e-12;
}

ThinQrFactors thin_qr(const std::vector<Vec>& columns) {
    const std::size_t p = columns.size();
    if (p == 0) throw std::invalid_argument("thin_qr: no columns");
    const std::size_t n = columns.front().size();
    if (n < p) throw std::invalid_argument("thin_qr: need n >= p");
    for (const Vec& c : columns)
        if (c.size() != n) throw std::invalid_argument("thin_qr: ragged columns");

    std::vector<Vec> a = columns;                 // working copy, reduced in place
    std::vector<Vec> hh(p);                       // Householder vectors (length n - j)
    double scale = 0.0;
    for (const Vec& c : columns) scale = std::max(scale, nrm2(c));

    Matrix r(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        // reflector from the trailing part of column j
        double norm2 = 0.0;
        for (std::size_t i = j; i < n; ++i) norm2 += a[j][i] * a[j][i];
        const double norm = std::sqrt(norm2);
        if (norm <= 1e-15 * (scale > 0.0 ? scale : 1.0)) {
            hh[j] = Vec();  // identity reflector; rank deficiency leaves R(j,j) = 0
            r(j, j) = 0.0;
            continue;
        }
        const double alpha = a[j][j] >= 0.0 ? -norm : norm;
        Vec v(n - j);
        v[0] = a[j][j] - alpha;
        for (std::size_t i = j + 1; i < n; ++i) v[i - j] = a[j][i];
        const double vnorm = nrm2(v);
        scal(1.0 / vnorm, v);
        r(j, j) = alpha;

        for (std::size_t c = j + 1; c < p; ++c) {
            double proj = 0.0;
            for (std::size_t i = j; i < n; ++i) proj += v[i - j] * a[c][i];
            for (std::size_t i = j; i < n; ++i) a[c][i] -= 2.0 * proj * v[i - j];
            r(j, c) = a[c][j];
        }
        hh[j] = std::move(v);
    }

    // Q1 = H_0 ... H_{p-1} applied to the leading identity columns
    ThinQrFactors out;
    out.r = std::move(r);
    out.q_columns.resize(p);
    for (std::size_t c = 0; c < p; ++c) {
        Vec q(n, 0.0);
        q[c] = 1.0;
        for (std::size_t j = p; j > 0; --j) {
            const std::size_t jj = j - 1;
            if (hh[jj].empty()) continue;
            double proj = 0.0;
            for (std::size_t i = jj; i < n; ++i) proj += hh[jj][i - jj] * q[i];
            for (std::size_t i = jj; i < n; ++i) q[i] -= 2.0 * proj * hh[jj][i - jj];
        }
        out.q_columns[c] = std::move(q);
    }
    return out;
}

EigenDecomp eigen_small(const Matrix& a_sym) {
    if (a_sym.rows() != a_sym.cols())
        throw std::invalid_argument("eigen_small: square matrix required");
    const std::size_t p = a_sym.rows();
    const double amax = max_abs(a_sym);
    if (symmetry_gap(a_sym) > 1e-10 * (amax > 0.0 ? amax : 1.0))
        throw std::invalid_argument("eigen_small: matrix is not symmetric");

    Matrix a = a_sym;
    symmetrize(a);
    Matrix v = Matrix::identity(p);

    auto off_norm = [&a, p]() {
        double s = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const double tol = 1e-15 * (amax > 0.0 ? amax : 1.0) * static_cast<double>(p);
    for (int sweep = 0; sweep < 64 && off_norm() > tol; ++sweep) {
        for (std::size_t q = 1; q < p; ++q) {
            for (std::size_t r = 0; r < q; ++r) {
                const double apq = a(r, q);
                if (std::abs(apq) <= tol / static_cast<double>(p)) continue;
                const double theta = (a(q, q) - a(r, r)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < p; ++i) {
                    const double air = a(i, r);
                    const double aiq = a(i, q);
                    a(i, r) = c * air - s * aiq;
                    a(i, q) = s * air + c * aiq;
                }
                for (std::size_t i = 0; i < p; ++i) {
                    const double ari = a(r, i);
                    const double aqi = a(q, i);
                    a(r, i) = c * ari - s * aqi;
                    a(q, i) = s * ari + c * aqi;
                }
                for (std::size_t i = 0; i < p; ++i) {
                    const double vir = v(i, r);
                    const double viq = v(i, q);
                    v(i, r) = c * vir - s * viq;
                    v(i, q) = s * vir + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&a](std::size_t l, std::size_t r) { return a(l, l) < a(r, r); });

    EigenDecomp out;
    out.values.resize(p);
    out.vectors = Matrix(p, p);
    for (std::size_t c = 0; c < p; ++c) {
        out.values[c] = a(order[c], order[c]);
        for (std::size_t i = 0; i < p; ++i) out.vectors(i, c) = v(i, order[c]);
    }
    return out;
}

namespace {

SpectrumReport spectrum_from_factor(const std::vector<Vec>& psi_columns, const Matrix& mt,
                                    double gamma, std::size_t n) {
    const std::size_t p = psi_columns.size();
    const double bulk = 1.0 / gamma;

    SpectrumReport report;
    report.bulk_eigenvalue = bulk;
    report.bulk_multiplicity = n - p;

    if (p > 0) {
        const ThinQrFactors qr = thin_qr(psi_columns);
        Matrix t = qr.r * mt * transpose(qr.r);
        symmetrize(t);
        const EigenDecomp eig = eigen_small(t);
        report.shifted_eigenvalues.resize(p);
        for (std::size_t i = 0; i < p; ++i) report.shifted_eigenvalues[i] = bulk + eig.values[i];
        std::sort(report.shifted_eigenvalues.begin(), report.shifted_eigenvalues.end());
    }

    double lo = report.bulk_multiplicity > 0 ? std::abs(bulk)
                                             : std::numeric_limits<double>::infinity();
    double hi = report.bulk_multiplicity > 0 ? std::abs(bulk) : 0.0;
    for (double ev : report.shifted_eigenvalues) {
        lo = std::min(lo, std::abs(ev));
        hi = std::max(hi, std::abs(ev));
    }
    report.min_abs_eigenvalue = lo;
    report.max_abs_eigenvalue = hi;
    report.near_singular = lo < kNearSingularTol * hi;
    report.cond_h = report.near_singular && lo == 0.0 ? std::numeric_limits<double>::infinity()
                                                      : hi / lo;
    report.cond_b = report.cond_h;
    return report;
}

} // namespace

std::vector<double> SpectrumReport::full_spectrum() const {
    std::vector<double> all(bulk_multiplicity, bulk_eigenvalue);
    all.insert(all.end(), shifted_eigenvalues.begin(), shifted_eigenvalues.end());
    std::sort(all.begin(), all.end());
    return all;
}

SpectrumReport spectrum(const CompactInverseState& state) {
    if (state.store == nullptr) throw std::logic_error("spectrum: state not built");
    const PairStore& store = *state.store;
    const std::size_t p = store.count();
    const double hg = 1.0 / state.config.gamma;

    std::vector<Vec> psi;
    psi.reserve(2 * p);
    for (std::size_t i = 0; i < p; ++i) psi.push_back(store.s(i));
    for (std::size_t i = 0; i < p; ++i) psi.push_back(scaled(hg, store.y(i)));
    return spectrum_from_factor(psi, state.Mt, state.config.gamma, store.dimension());
}

SpectrumReport spectrum(const Sr1InverseState& state) {
    if (state.store == nullptr) throw std::logic_error("spectrum: state not built");
    return spectrum_from_factor(state.psi, state.Mt, state.gamma, state.store->dimension());
}

} // namespace lmqn
