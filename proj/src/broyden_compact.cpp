#include "lmqn/broyden_compact.hpp"

#include <cmath>
#include <stdexcept>

#include "lmqn/errors.hpp"

namespace lmqn {

namespace {

constexpr double kDegenerateTol = 1e-14;

double dot_small(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> small_matvec(const Matrix& m, const std::vector<double>& x) {
    std::vector<double> y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

void check_config(const BroydenConfig& config) {
    if (config.phi < 0.0 || config.phi > 1.0)
        throw std::invalid_argument("BroydenConfig: phi must lie in [0, 1]");
    if (config.gamma <= 0.0)
        throw std::invalid_argument("BroydenConfig: gamma must be positive");
}

/// Bordered growth of a middle matrix: both halves gain one trailing slot.
/// Old index a maps to a (S half, a < j) or a + 1 (Y half); the new s slot is
/// row j and the new y slot is row 2j + 1.
Matrix grow_middle(const Matrix& old, const std::vector<double>& u, double uu, double cs,
                   double cy, double diag_s, double off, double diag_y) {
    const std::size_t j = old.rows() / 2;
    Matrix next(2 * (j + 1), 2 * (j + 1));
    const auto map = [j](std::size_t a) { return a < j ? a : a + 1; };
    for (std::size_t a = 0; a < 2 * j; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            const double v = old(a, b) + uu * (u[a] * u[b]);
            next(map(a), map(b)) = v;
            next(map(b), map(a)) = v;
        }
    for (std::size_t a = 0; a < 2 * j; ++a) {
        next(map(a), j) = cs * u[a];
        next(j, map(a)) = cs * u[a];
        next(map(a), 2 * j + 1) = cy * u[a];
        next(2 * j + 1, map(a)) = cy * u[a];
    }
    next(j, j) = diag_s;
    next(j, 2 * j + 1) = off;
    next(2 * j + 1, j) = off;
    next(2 * j + 1, 2 * j + 1) = diag_y;
    return next;
}

/// Weight of the inverse rank-two update. The endpoint cases skip the
/// quotient entirely.
double phi_weight(double phi, double sTy, double yHy, double sBs) {
    if (phi == 0.0) return 1.0;
    if (phi == 1.0) return 0.0;
    const double num = (1.0 - phi) * sTy * sTy;
    const double den = num + phi * yHy * sBs;
    const double scale = sTy * sTy + std::abs(yHy * sBs);
    if (std::abs(den) < kDegenerateTol * scale)
        throw BreakdownError("degenerate update: inverse-weight denominator underflow");
    return num / den;
}

void check_denominator(double value, double scale, const char* what) {
    if (std::abs(value) <= kDegenerateTol * scale)
        throw BreakdownError(std::string("degenerate update: ") + what + " underflow");
}

} // namespace

double lambda_scalar(double phi, double sBs, double sTy) {
    const double den = -(1.0 - phi) / sBs - phi / sTy;
    const double scale = 1.0 / std::abs(sBs) + 1.0 / std::abs(sTy);
    if (std::abs(den) < kDegenerateTol * scale)
        throw BreakdownError("degenerate update: lambda denominator underflow");
    return 1.0 / den;
}

BroydenStates build_states(const PairStore& store, const BroydenConfig& config) {
    check_config(config);
    if (config.gamma != store.gamma())
        throw std::invalid_argument("build_states: config gamma differs from the store's");
    const double phi = config.phi;
    const double gamma = config.gamma;
    const std::size_t p = store.count();

    BroydenStates out;
    out.forward.store = &store;
    out.forward.config = config;
    out.forward.revision = store.revision();
    out.inverse.store = &store;
    out.inverse.config = config;
    out.inverse.revision = store.revision();
    if (p == 0) return out;

    const Matrix& sts = store.gram().sts();
    const Matrix& sty = store.gram().sty();
    const Matrix& yty = store.gram().yty();

    auto& sBs = out.forward.sBs;
    auto& lambda = out.forward.lambda;
    auto& yHy = out.inverse.yHy;
    auto& Phi = out.inverse.Phi;

    // seed from the first pair
    {
        const double sTy0 = sty(0, 0);
        check_denominator(sTy0, std::sqrt(sts(0, 0) * yty(0, 0)), "s'y");
        const double sBs0 = gamma * sts(0, 0);
        const double yHy0 = yty(0, 0) / gamma;
        const double lam0 = lambda_scalar(phi, sBs0, sTy0);
        sBs.push_back(sBs0);
        lambda.push_back(lam0);
        yHy.push_back(yHy0);

        // forward 2x2: M0 = -inverse of the seed block
        const double a = sBs0 - phi * lam0;
        const double b = -phi * lam0;
        const double d = -(sTy0 + phi * lam0);
        const double det = a * d - b * b;
        check_denominator(det, std::abs(a * d) + b * b + 1e-300, "forward seed determinant");
        Matrix m0(2, 2);
        m0(0, 0) = -d / det;
        m0(0, 1) = b / det;
        m0(1, 0) = b / det;
        m0(1, 1) = -a / det;
        out.forward.M = std::move(m0);

        // inverse 2x2 from the closed-form scalars
        const double phi0 = phi_weight(phi, sTy0, yHy0, sBs0);
        Phi.push_back(phi0);
        const double at = (1.0 + phi0 * yHy0 / sTy0) / sTy0;
        const double bt = -phi0 / sTy0;
        double dt = 0.0;
        if (phi0 != 1.0) {
            check_denominator(yHy0, yty(0, 0) / gamma, "y'Hy");
            dt = -(1.0 - phi0) / yHy0;
        }
        out.inverse.alpha_t.push_back(at);
        out.inverse.beta_t.push_back(bt);
        out.inverse.delta_t.push_back(dt);
        Matrix mt0(2, 2);
        mt0(0, 0) = at;
        mt0(0, 1) = bt;
        mt0(1, 0) = bt;
        mt0(1, 1) = dt;
        out.inverse.Mt = std::move(mt0);
    }

    for (std::size_t j = 1; j < p; ++j) {
        const double sTyj = sty(j, j);
        check_denominator(sTyj, std::sqrt(sts(j, j) * yty(j, j)), "s'y");

        // Part 1: s_j' B_j s_j and the forward growth. Psi_{j-1}' s_j is read
        // off the Gram cache: gamma * (column j of S'S) stacked over (row j
        // of S'Y).
        std::vector<double> t(2 * j);
        for (std::size_t i = 0; i < j; ++i) {
            t[i] = gamma * sts(i, j);
            t[j + i] = sty(j, i);
        }
        const std::vector<double> u = small_matvec(out.forward.M, t);
        const double sBsj = gamma * sts(j, j) + dot_small(t, u);
        check_denominator(sBsj, gamma * sts(j, j), "s'Bs");
        const double lamj = lambda_scalar(phi, sBsj, sTyj);
        const double aj = -(1.0 - phi) / sBsj;
        const double bj = -phi / sTyj;
        const double dj = (1.0 + phi * sBsj / sTyj) / sTyj;
        out.forward.M = grow_middle(out.forward.M, u, aj, aj, bj, aj, bj, dj);
        sBs.push_back(sBsj);
        lambda.push_back(lamj);

        // Part 2: y_j' H_j y_j and the inverse growth. Psi~_{j-1}' y_j is
        // (column j of S'Y) stacked over (1/gamma) * (column j of Y'Y).
        std::vector<double> tt(2 * j);
        for (std::size_t i = 0; i < j; ++i) {
            tt[i] = sty(i, j);
            tt[j + i] = yty(i, j) / gamma;
        }
        const std::vector<double> ut = small_matvec(out.inverse.Mt, tt);
        const double yHyj = yty(j, j) / gamma + dot_small(tt, ut);
        const double phij = phi_weight(phi, sTyj, yHyj, sBsj);
        const double atj = (1.0 + phij * yHyj / sTyj) / sTyj;
        const double btj = -phij / sTyj;
        double dtj = 0.0;
        if (phij != 1.0) {
            check_denominator(yHyj, yty(j, j) / gamma, "y'Hy");
            dtj = -(1.0 - phij) / yHyj;
        }
        out.inverse.Mt = grow_middle(out.inverse.Mt, ut, dtj, btj, dtj, atj, btj, dtj);
        yHy.push_back(yHyj);
        Phi.push_back(phij);
        out.inverse.alpha_t.push_back(atj);
        out.inverse.beta_t.push_back(btj);
        out.inverse.delta_t.push_back(dtj);
    }

    return out;
}

namespace {
void check_state(const PairStore* store, std::uint64_t revision, std::size_t zlen) {
    if (store == nullptr) throw std::logic_error("compact state: not built");
    if (store->revision() != revision)
        throw std::logic_error("compact state: pair store changed since build");
    if (zlen != store->dimension())
        throw std::invalid_argument("compact solve/multiply: dimension mismatch");
}
} // namespace

Vec solve(const CompactInverseState& state, const Vec& z) {
    check_state(state.store, state.revision, z.size());
    const PairStore& store = *state.store;
    const std::size_t p = store.count();
    const double hg = 1.0 / state.config.gamma;

    std::vector<double> t(2 * p);
    for (std::size_t i = 0; i < p; ++i) {
        t[i] = dot(store.s(i), z);
        t[p + i] = hg * dot(store.y(i), z);
    }
    const std::vector<double> w = small_matvec(state.Mt, t);

    Vec r = scaled(hg, z);
    for (std::size_t i = 0; i < p; ++i) {
        axpy(w[i], store.s(i), r);
        axpy(hg * w[p + i], store.y(i), r);
    }
    return r;
}

Vec multiply_forward(const CompactForwardState& state, const Vec& v) {
    check_state(state.store, state.revision, v.size());
    const PairStore& store = *state.store;
    const std::size_t p = store.count();
    const double gamma = state.config.gamma;

    std::vector<double> t(2 * p);
    for (std::size_t i = 0; i < p; ++i) {
        t[i] = gamma * dot(store.s(i), v);
        t[p + i] = dot(store.y(i), v);
    }
    const std::vector<double> w = small_matvec(state.M, t);

    Vec r = scaled(gamma, v);
    for (std::size_t i = 0; i < p; ++i) {
        axpy(gamma * w[i], store.s(i), r);
        axpy(w[p + i], store.y(i), r);
    }
    return r;
}

Matrix assemble_mtilde_direct(const GramCache& gram, const std::vector<double>& lambdas,
                              const BroydenConfig& config) {
    check_config(config);
    const std::size_t p = gram.sty().rows();
    if (lambdas.size() != p)
        throw std::invalid_argument("assemble_mtilde_direct: lambda count mismatch");
    const double phi = config.phi;
    const LdrSplit ldr = gram.ldr_views();
    const Matrix& yty = gram.yty();

    Matrix block(2 * p, 2 * p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            const double lam = i == j ? phi * lambdas[i] : 0.0;
            block(i, j) = -lam;
            const double rd = ldr.r(i, j) + ldr.d(i, j);
            block(i, p + j) = -rd - lam;
            block(p + j, i) = -rd - lam;
            block(p + i, p + j) = -ldr.d(i, j) - lam - yty(i, j) / config.gamma;
        }
    }

    SymIndefFactor factor(block);
    if (factor.singular())
        throw BreakdownError("assemble_mtilde_direct: singular block matrix");
    return factor.inverse();
}

} // namespace lmqn
