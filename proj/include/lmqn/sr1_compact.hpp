#pragma once

#include <cstdint>
#include <vector>

#include "lmqn/matrix.hpp"
#include "lmqn/pair_store.hpp"

namespace lmqn {

/// Inverse compact form of a limited-memory SR1 matrix,
/// H = (1/gamma)*I + Psi~ Mt Psi~' with Psi~ = S - (1/gamma)*Y and
/// Mt = (D + R + R' - (1/gamma) Y'Y)^{-1}. The Psi~ columns are materialized
/// because the final accumulation needs them explicitly.
struct Sr1InverseState {
    Matrix Mt;                    // (k+1) x (k+1)
    std::vector<Vec> psi;         // columns of S - (1/gamma) Y
    const PairStore* store = nullptr;
    double gamma = 1.0;
    std::uint64_t revision = 0;
};

/// Forms and inverts the middle matrix via a symmetric-indefinite
/// factorization; SR1 matrices can be indefinite and numerically singular,
/// so a pivot below 1e-12 relative raises BreakdownError instead of
/// producing garbage.
Sr1InverseState build_sr1(const PairStore& store);

/// r = H z with k+1 length-n inner products plus one accumulation.
Vec solve_sr1(const Sr1InverseState& state, const Vec& z);

/// B v = gamma v + Psi^ M^ Psi^' v with Psi^ = Y - gamma*S and
/// M^ = (D + L + L' - gamma S'S)^{-1}. Same pivot safeguard as build_sr1.
Vec multiply_sr1_forward(const PairStore& store, const Vec& v);

} // namespace lmqn
