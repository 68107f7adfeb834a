#include "lmqn/sr1_compact.hpp"

#include <stdexcept>

#include "lmqn/errors.hpp"

namespace lmqn {

namespace {

constexpr double kPivotTol = 1e-12;

std::vector<double> small_matvec(const Matrix& m, const std::vector<double>& x) {
    std::vector<double> y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

} // namespace

Sr1InverseState build_sr1(const PairStore& store) {
    const std::size_t p = store.count();
    const double gamma = store.gamma();
    const double hg = 1.0 / gamma;

    Sr1InverseState state;
    state.store = &store;
    state.gamma = gamma;
    state.revision = store.revision();
    if (p == 0) return state;

    const LdrSplit ldr = store.gram().ldr_views();
    const Matrix& yty = store.gram().yty();

    Matrix middle(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            middle(i, j) = ldr.d(i, j) + ldr.r(i, j) + ldr.r(j, i) - hg * yty(i, j);

    SymIndefFactor factor(middle, kPivotTol);
    if (factor.singular())
        throw BreakdownError("build_sr1: singular middle matrix (skip update)");
    state.Mt = factor.inverse();

    state.psi.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
        Vec col = store.s(i);
        axpy(-hg, store.y(i), col);
        state.psi.push_back(std::move(col));
    }
    return state;
}

Vec solve_sr1(const Sr1InverseState& state, const Vec& z) {
    if (state.store == nullptr) throw std::logic_error("solve_sr1: state not built");
    if (state.store->revision() != state.revision)
        throw std::logic_error("solve_sr1: pair store changed since build");
    if (z.size() != state.store->dimension())
        throw std::invalid_argument("solve_sr1: dimension mismatch");

    const std::size_t p = state.psi.size();
    const double hg = 1.0 / state.gamma;

    std::vector<double> t(p);
    for (std::size_t i = 0; i < p; ++i) t[i] = dot(state.psi[i], z);
    const std::vector<double> w = small_matvec(state.Mt, t);

    Vec r = scaled(hg, z);
    for (std::size_t i = 0; i < p; ++i) axpy(w[i], state.psi[i], r);
    return r;
}

Vec multiply_sr1_forward(const PairStore& store, const Vec& v) {
    if (v.size() != store.dimension())
        throw std::invalid_argument("multiply_sr1_forward: dimension mismatch");
    const std::size_t p = store.count();
    const double gamma = store.gamma();

    Vec r = scaled(gamma, v);
    if (p == 0) return r;

    const LdrSplit ldr = store.gram().ldr_views();
    const Matrix& sts = store.gram().sts();

    Matrix middle(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            middle(i, j) = ldr.d(i, j) + ldr.l(i, j) + ldr.l(j, i) - gamma * sts(i, j);

    SymIndefFactor factor(middle, kPivotTol);
    if (factor.singular())
        throw BreakdownError("multiply_sr1_forward: singular middle matrix");

    std::vector<Vec> psi_hat;
    psi_hat.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
        Vec col = store.y(i);
        axpy(-gamma, store.s(i), col);
        psi_hat.push_back(std::move(col));
    }

    std::vector<double> t(p);
    for (std::size_t i = 0; i < p; ++i) t[i] = dot(psi_hat[i], v);
    const std::vector<double> w = factor.solve(t);

    for (std::size_t i = 0; i < p; ++i) axpy(w[i], psi_hat[i], r);
    return r;
}

} // namespace lmqn
