#pragma once

#include <cstddef>
#include <vector>

#include "lmqn/broyden_compact.hpp"
#include "lmqn/matrix.hpp"
#include "lmqn/sr1_compact.hpp"
#include "lmqn/vec.hpp"

namespace lmqn {

/// Thin QR factors of an n x p matrix given as columns: Q1 has p orthonormal
/// columns, R1 is p x p upper triangular. Rank deficiency is permitted and
/// shows up as (near-)zero diagonal entries of R1.
struct ThinQrFactors {
    std::vector<Vec> q_columns;
    Matrix r;
};

/// Householder factorization; requires n >= p.
ThinQrFactors thin_qr(const std::vector<Vec>& columns);

struct EigenDecomp {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are the corresponding eigenvectors
};

/// Full eigendecomposition of a small symmetric matrix by cyclic Jacobi
/// rotations. Input must be symmetric to 1e-10 relative.
EigenDecomp eigen_small(const Matrix& a_sym);

/// Spectrum of the inverse H = (1/gamma) I + Psi~ Mt Psi~': the bulk
/// eigenvalue 1/gamma with multiplicity n - p, plus p shifted eigenvalues
/// 1/gamma + d_i from the small eigenproblem of R1 Mt R1'. The condition
/// number of B equals that of H (max/min ratio is invariant under taking
/// reciprocals of the spectrum).
struct SpectrumReport {
    double bulk_eigenvalue = 0.0;
    std::size_t bulk_multiplicity = 0;
    std::vector<double> shifted_eigenvalues;  // ascending
    double min_abs_eigenvalue = 0.0;
    double max_abs_eigenvalue = 0.0;
    double cond_h = 0.0;
    double cond_b = 0.0;
    bool near_singular = false;  // min |eig| < 1e-12 * max |eig|

    /// All n eigenvalues of H, sorted ascending.
    std::vector<double> full_spectrum() const;
};

SpectrumReport spectrum(const CompactInverseState& state);
SpectrumReport spectrum(const Sr1InverseState& state);

} // namespace lmqn
