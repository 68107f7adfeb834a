#pragma once

#include <vector>

#include "lmqn/broyden_compact.hpp"
#include "lmqn/pair_store.hpp"
#include "lmqn/vec.hpp"

namespace lmqn {

/// Rank-one pieces of an update sequence unrolled into scalar/vector slots,
/// three per pair. Forward layout per pair j: (y_j, w_j, B_j s_j); inverse
/// layout: (s_j, v_j, H_j y_j). smw_solve fills the tau/p workspace and the
/// per-step denominators (kept around so tests can audit positivity).
struct UnrolledUpdate {
    std::vector<double> alphas;      // 3(k+1)
    std::vector<Vec> us;             // 3(k+1)
    double gamma = 1.0;
    std::vector<double> taus;        // filled by smw_solve
    std::vector<Vec> ps;             // filled by smw_solve
    std::vector<double> smw_denoms;  // 1 + alpha * p'u per step
};

/// Two-loop recursion for the BFGS inverse apply. Curvature products s_i'y_i
/// come from the Gram cache. BFGS semantics only; callers must not use it
/// for phi != 0.
Vec two_loop_solve(const PairStore& store, const Vec& z);

/// Unrolls the forward update sequence: B_j s_j is accumulated as a running
/// sum over earlier slots, so no B_i is ever formed.
UnrolledUpdate unroll_forward(const PairStore& store, const BroydenConfig& config);

/// Rank-one inverse updates applied in sequence via the
/// Sherman-Morrison-Woodbury identity. Builds each p_j by the inner loop
/// over the earlier slots.
Vec smw_solve(UnrolledUpdate& unrolled, const Vec& z);

/// Dual unrolling producing the inverse slots. Runs the forward pass
/// alongside (one combined sweep) because the inverse weight needs
/// s_j' B_j s_j.
UnrolledUpdate unroll_inverse(const PairStore& store, const BroydenConfig& config);

/// r = H z accumulated over all inverse slots.
Vec recursive_h_solve(const UnrolledUpdate& unrolled, const Vec& z);

/// SR1 solve through self-duality: p_i = s_i - H_0 y_i orthogonalized
/// against the earlier p_j, then r = H_0 z + sum (p_i'z)/(p_i'y_i) p_i.
Vec sr1_self_dual_solve(const PairStore& store, const Vec& z);

} // namespace lmqn
