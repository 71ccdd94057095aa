#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pinsync/matrix.hpp"
#include "pinsync/pinning.hpp"
#include "pinsync/topology.hpp"

namespace pinsync {

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // orthogonal; column i pairs with values[i]
};

struct JacobiOptions {
    double relative_threshold = 1e-12;  // stop when off(M) < threshold * ||M||_F
    int max_sweeps = 100;
};

// Cyclic Jacobi eigensolver for real symmetric matrices.
// Throws ContractViolation if |M(i,j) - M(j,i)| > 1e-12 anywhere, and
// NumericalFailure if the sweep cap is reached.
EigenDecomposition eig_symmetric(const Matrix& m, JacobiOptions opts = {});

double largest_eigenvalue(const Matrix& m);

// max_i ||M u_i - lambda_i u_i||_2
double eigen_residual(const Matrix& m, const EigenDecomposition& eig);
// max |U^T U - I|
double orthogonality_error(const EigenDecomposition& eig);

// Spectrum of A - G for the plan's gain matrix G.
EigenDecomposition controlled_spectrum(const CouplingMatrix& a, const PinningPlan& plan);

struct SpectralMargin {
    double k_tilde = 0.0;
    bool satisfied = false;  // lambda_max < -k_tilde
    double lambda_max = 0.0;
};

SpectralMargin spectral_margin(const Matrix& controlled, double k_tilde);

// Gain above which pinning every leaf of star(n) pushes all eigenvalues of
// the controlled matrix below -k_tilde. Requires n - k_tilde - 1 > 0.
double star_leaf_gain_bound(std::size_t n, double k_tilde);

// Same guarantee for a cluster of stars with smallest branch n1 when every
// leaf is pinned. Requires n1 > k_tilde.
double cluster_leaf_gain_bound(std::size_t smallest_branch, double k_tilde);

enum class SchurOutcome { feasible, infeasible, indeterminate };

// Decides A - G < -alpha I through the block partition unpinned/pinned:
// the unpinned block A1 + alpha I must be negative definite and so must the
// Schur complement (A2 - Gp + alpha I) - A12^T (A1 + alpha I)^{-1} A12.
// `gains[i]` is the gain of node `pinned[i]`. Indeterminate when the largest
// eigenvalue of A1 + alpha I lies in (-1e-9, 0), where the inverse is
// too ill-conditioned to trust.
SchurOutcome schur_feasible(const CouplingMatrix& a, std::span<const std::size_t> pinned,
                            std::span<const double> gains, double alpha);

// Smallest uniform gain on `pinned` (within tol) for which the largest
// eigenvalue of A - G drops below -k_tilde. nullopt when no gain can reach
// it: the largest eigenvalue decreases toward that of the unpinned block as
// the gain grows, so the target is unreachable when that block's largest
// eigenvalue is >= -k_tilde.
std::optional<double> min_uniform_gain(const CouplingMatrix& a, std::span<const std::size_t> pinned,
                                       double k_tilde, double tol);

struct DiagonalBounds {
    bool diag_within_spectrum = false;
    // Evaluated only when |lambda_1| <= 1e-9: the two largest diagonal
    // entries sum to at most lambda_2.
    std::optional<bool> lambda2_bound_holds;
};

DiagonalBounds diagonal_spectrum_bounds(const Matrix& m);

// Every eigenvalue lies in some Gershgorin disc (tolerance 1e-9).
// Symmetric input only.
bool gershgorin_contains_spectrum(const Matrix& m);

}  // namespace pinsync
