#pragma once

#include "lmqn/broyden_compact.hpp"
#include "lmqn/matrix.hpp"
#include "lmqn/pair_store.hpp"
#include "lmqn/vec.hpp"

namespace lmqn {

/// Brute-force reference pair: B built by the forward rank-two recursion and
/// H built independently by the inverse rank-two recursion, so B*H == I is a
/// genuine cross-check of both. Every rank update is symmetrized to keep the
/// symmetry invariants tight. Small n only.
struct DensePair {
    Matrix b;
    Matrix h;
};

DensePair dense_broyden(const PairStore& store, const BroydenConfig& config);

/// SR1 reference: B by the rank-one recursion, H by the same recursion run
/// on H0 with s and y interchanged (self-duality).
DensePair dense_sr1(const PairStore& store);

/// Dense LU solve with partial pivoting (the matrix may be indefinite).
Vec dense_solve(const Matrix& a, const Vec& rhs);

/// True when the Cholesky factorization succeeds.
bool cholesky_pd(const Matrix& a);

/// Convenience for the duality checks: the store with s and y swapped and
/// gamma replaced by 1/gamma.
PairStore swapped_store(const PairStore& store);

/// Deviations of the complementarity identities, each measured entrywise
/// against a dense reference on the given (small) store:
///  - the closed two-block inverse form of the BFGS middle matrix vs dense H,
///  - the DFP inverse compact form evaluated on swapped data vs the BFGS
///    forward compact form (and dense B),
///  - the SR1 inverse compact form evaluated on swapped data vs dense B.
struct DualityReport {
    double bfgs_closed_form_dev = 0.0;
    double dfp_swap_dev = 0.0;
    double sr1_swap_dev = 0.0;

    bool pass(double tol) const {
        return bfgs_closed_form_dev <= tol && dfp_swap_dev <= tol && sr1_swap_dev <= tol;
    }
};

DualityReport check_duality(const PairStore& store);

} // namespace lmqn
