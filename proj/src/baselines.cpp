#include "lmqn/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "lmqn/errors.hpp"

namespace lmqn {

namespace {
constexpr double kBreakdownTol = 1e-14;
}

Vec two_loop_solve(const PairStore& store, const Vec& z) {
    if (z.size() != store.dimension())
        throw std::invalid_argument("two_loop_solve: dimension mismatch");
    const std::size_t p = store.count();
    const Matrix& sty = store.gram().sty();

    Vec q = z;
    std::vector<double> a(p, 0.0);
    for (std::size_t ii = p; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        a[i] = dot(store.s(i), q) / sty(i, i);
        axpy(-a[i], store.y(i), q);
    }
    scal(1.0 / store.gamma(), q);
    Vec& r = q;
    for (std::size_t i = 0; i < p; ++i) {
        const double b = dot(store.y(i), r) / sty(i, i);
        axpy(a[i] - b, store.s(i), r);
    }
    return r;
}

UnrolledUpdate unroll_forward(const PairStore& store, const BroydenConfig& config) {
    if (config.gamma != store.gamma())
        throw std::invalid_argument("unroll_forward: config gamma differs from the store's");
    const std::size_t p = store.count();
    const double phi = config.phi;
    const double gamma = config.gamma;
    const Matrix& sty = store.gram().sty();
    const Matrix& sts = store.gram().sts();

    UnrolledUpdate u;
    u.gamma = gamma;
    u.alphas.assign(3 * p, 0.0);
    u.us.resize(3 * p);

    for (std::size_t j = 0; j < p; ++j) {
        u.us[3 * j] = store.y(j);
        u.alphas[3 * j] = 1.0 / sty(j, j);

        // B_j s_j as a running sum over the earlier slots
        Vec bs = scaled(gamma, store.s(j));
        for (std::size_t i = 0; i < 3 * j; ++i)
            axpy(u.alphas[i] * dot(u.us[i], store.s(j)), u.us[i], bs);
        const double sbs = dot(store.s(j), bs);
        if (sbs <= kBreakdownTol * gamma * sts(j, j))
            throw BreakdownError("unroll_forward: s'Bs underflow");
        u.us[3 * j + 2] = std::move(bs);
        u.alphas[3 * j + 2] = -1.0 / sbs;

        Vec w = scaled(u.alphas[3 * j], store.y(j));
        axpy(u.alphas[3 * j + 2], u.us[3 * j + 2], w);
        u.us[3 * j + 1] = std::move(w);
        u.alphas[3 * j + 1] = -phi / u.alphas[3 * j + 2];  // = phi * s'Bs
    }
    return u;
}

Vec smw_solve(UnrolledUpdate& unrolled, const Vec& z) {
    const std::size_t slots = unrolled.us.size();
    const double hg = 1.0 / unrolled.gamma;

    unrolled.taus.assign(slots, 0.0);
    unrolled.ps.assign(slots, Vec());
    unrolled.smw_denoms.assign(slots, 0.0);

    Vec r = scaled(hg, z);
    for (std::size_t j = 0; j < slots; ++j) {
        const Vec& uj = unrolled.us[j];
        const double aj = unrolled.alphas[j];
        Vec pj = scaled(hg, uj);
        for (std::size_t l = 0; l < j; ++l)
            axpy(-unrolled.taus[l] * dot(unrolled.ps[l], uj), unrolled.ps[l], pj);
        const double den = 1.0 + aj * dot(pj, uj);
        unrolled.smw_denoms[j] = den;
        if (std::abs(den) < kBreakdownTol)
            throw BreakdownError("smw_solve: update denominator underflow");
        const double tau = aj / den;
        unrolled.taus[j] = tau;
        axpy(-tau * dot(pj, z), pj, r);
        unrolled.ps[j] = std::move(pj);
    }
    return r;
}

UnrolledUpdate unroll_inverse(const PairStore& store, const BroydenConfig& config) {
    if (config.gamma != store.gamma())
        throw std::invalid_argument("unroll_inverse: config gamma differs from the store's");
    const std::size_t p = store.count();
    const double phi = config.phi;
    const double gamma = config.gamma;
    const double hg = 1.0 / gamma;
    const Matrix& sty = store.gram().sty();
    const Matrix& sts = store.gram().sts();
    const Matrix& yty = store.gram().yty();

    // forward slots ride along; the inverse weight needs s_j' B_j s_j
    UnrolledUpdate fw;
    fw.gamma = gamma;
    fw.alphas.assign(3 * p, 0.0);
    fw.us.resize(3 * p);

    UnrolledUpdate inv;
    inv.gamma = gamma;
    inv.alphas.assign(3 * p, 0.0);
    inv.us.resize(3 * p);

    for (std::size_t j = 0; j < p; ++j) {
        // forward sweep step
        fw.us[3 * j] = store.y(j);
        fw.alphas[3 * j] = 1.0 / sty(j, j);
        Vec bs = scaled(gamma, store.s(j));
        for (std::size_t i = 0; i < 3 * j; ++i)
            axpy(fw.alphas[i] * dot(fw.us[i], store.s(j)), fw.us[i], bs);
        const double sbs = dot(store.s(j), bs);
        if (sbs <= kBreakdownTol * gamma * sts(j, j))
            throw BreakdownError("unroll_inverse: s'Bs underflow");
        fw.us[3 * j + 2] = std::move(bs);
        fw.alphas[3 * j + 2] = -1.0 / sbs;
        Vec w = scaled(fw.alphas[3 * j], store.y(j));
        axpy(fw.alphas[3 * j + 2], fw.us[3 * j + 2], w);
        fw.us[3 * j + 1] = std::move(w);
        fw.alphas[3 * j + 1] = -phi / fw.alphas[3 * j + 2];

        // inverse sweep step
        inv.us[3 * j] = store.s(j);
        inv.alphas[3 * j] = 1.0 / sty(j, j);
        Vec hy = scaled(hg, store.y(j));
        for (std::size_t i = 0; i < 3 * j; ++i)
            axpy(inv.alphas[i] * dot(inv.us[i], store.y(j)), inv.us[i], hy);
        const double yhy = dot(store.y(j), hy);
        if (yhy <= kBreakdownTol * hg * yty(j, j))
            throw BreakdownError("unroll_inverse: y'Hy underflow");
        inv.us[3 * j + 2] = std::move(hy);
        inv.alphas[3 * j + 2] = -1.0 / yhy;

        Vec v = scaled(inv.alphas[3 * j], store.s(j));
        axpy(inv.alphas[3 * j + 2], inv.us[3 * j + 2], v);
        inv.us[3 * j + 1] = std::move(v);

        double weight;  // the inverse-update weight
        if (phi == 0.0)
            weight = 1.0;
        else if (phi == 1.0)
            weight = 0.0;
        else {
            const double a0 = inv.alphas[3 * j];
            weight = (1.0 - phi) /
                     (1.0 - phi + phi * a0 * a0 / (inv.alphas[3 * j + 2] * fw.alphas[3 * j + 2]));
        }
        inv.alphas[3 * j + 1] = -weight / inv.alphas[3 * j + 2];  // = weight * y'Hy
    }
    return inv;
}

Vec recursive_h_solve(const UnrolledUpdate& unrolled, const Vec& z) {
    if (!unrolled.us.empty() && unrolled.us.front().size() != z.size())
        throw std::invalid_argument("recursive_h_solve: dimension mismatch");
    Vec r = scaled(1.0 / unrolled.gamma, z);
    for (std::size_t i = 0; i < unrolled.us.size(); ++i)
        axpy(unrolled.alphas[i] * dot(unrolled.us[i], z), unrolled.us[i], r);
    return r;
}

Vec sr1_self_dual_solve(const PairStore& store, const Vec& z) {
    if (z.size() != store.dimension())
        throw std::invalid_argument("sr1_self_dual_solve: dimension mismatch");
    const std::size_t p = store.count();
    const double hg = 1.0 / store.gamma();
    const Matrix& sty = store.gram().sty();
    const Matrix& yty = store.gram().yty();

    std::vector<Vec> ps(p);
    std::vector<double> pty(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        Vec pi = store.s(i);
        axpy(-hg, store.y(i), pi);
        for (std::size_t j = 0; j < i; ++j)
            axpy(-dot(ps[j], store.y(i)) / pty[j], ps[j], pi);
        pty[i] = dot(pi, store.y(i));
        const double scale = std::abs(sty(i, i)) + hg * yty(i, i);
        if (std::abs(pty[i]) < kBreakdownTol * scale)
            throw BreakdownError("sr1_self_dual_solve: p'y underflow");
        ps[i] = std::move(pi);
    }

    Vec r = scaled(hg, z);
    for (std::size_t i = 0; i < p; ++i) axpy(dot(ps[i], z) / pty[i], ps[i], r);
    return r;
}

} // namespace lmqn
