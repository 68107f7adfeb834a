#pragma once

#include <cstdint>
#include <vector>

#include "lmqn/matrix.hpp"
#include "lmqn/pair_store.hpp"

namespace lmqn {

/// Update-family parameters: the class weight phi in [0, 1] (0 = BFGS,
/// 1 = DFP) and the scale of B0 = gamma * I.
struct BroydenConfig {
    double phi = 0.0;
    double gamma = 1.0;
};

/// Per-pair scale of the forward middle matrix,
///   lambda = 1 / ( -(1-phi)/sBs - phi/sTy ).
/// Throws BreakdownError when the denominator underflows.
double lambda_scalar(double phi, double sBs, double sTy);

/// Forward compact form B = gamma*I + Psi M Psi' with Psi = [gamma*S  Y].
/// Rows/columns of M are laid out as the S half followed by the Y half; the
/// interleaving permutation of the recursion is realized by growing each
/// half by one slot per pair instead of materializing it.
struct CompactForwardState {
    Matrix M;                     // 2p x 2p
    std::vector<double> sBs;      // s_j' B_j s_j per pair
    std::vector<double> lambda;   // per-pair middle-matrix scale
    const PairStore* store = nullptr;
    BroydenConfig config;
    std::uint64_t revision = 0;
};

/// Inverse compact form H = (1/gamma)*I + Psi~ Mt Psi~' with
/// Psi~ = [S  (1/gamma)*Y] held implicitly through the pair store.
struct CompactInverseState {
    Matrix Mt;                    // 2p x 2p, same half layout as above
    std::vector<double> yHy;      // y_j' H_j y_j per pair
    std::vector<double> Phi;      // inverse-update weight per pair
    std::vector<double> alpha_t;  // bordered-expansion scalars per pair
    std::vector<double> beta_t;
    std::vector<double> delta_t;
    const PairStore* store = nullptr;
    BroydenConfig config;
    std::uint64_t revision = 0;
};

struct BroydenStates {
    CompactForwardState forward;
    CompactInverseState inverse;
};

/// Builds both middle matrices in one pass over the stored pairs. All the
/// small products come out of the Gram cache; no length-n work is done here.
/// Pre: every stored pair has positive curvature and phi is in [0, 1].
BroydenStates build_states(const PairStore& store, const BroydenConfig& config);

/// r = H z, computed as (1/gamma) z + Psi~ (Mt (Psi~' z)) with exactly
/// 2p length-n inner products plus the final accumulation.
Vec solve(const CompactInverseState& state, const Vec& z);

/// B v = gamma v + Psi (M (Psi' v)).
Vec multiply_forward(const CompactForwardState& state, const Vec& v);

/// Inverts the block form of the inverse middle matrix assembled directly
/// from L, D, R, the lambda scales and Y'H0Y, via a symmetric-indefinite
/// factorization (the block matrix is indefinite). Serves as the oracle the
/// recursion is validated against. Throws BreakdownError on a singular block.
Matrix assemble_mtilde_direct(const GramCache& gram, const std::vector<double>& lambdas,
                              const BroydenConfig& config);

} // namespace lmqn
