#include "pinsync/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pinsync/errors.hpp"
#include "pinsync/kernels.hpp"

namespace pinsync {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kPivotBand = 1e-9;

double off_diagonal_norm(const Matrix& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j) sum += m(i, j) * m(i, j);
    return std::sqrt(sum);
}

// Zeroes M(p,q) with one Jacobi rotation. Rows p and q are rotated in place
// with the SIMD kernel, the 2x2 pivot block is set in closed form, and the
// symmetric columns are mirrored from the rows. `vt` holds eigenvectors as
// rows so the accumulation is a row rotation too.
void rotate_pair(Matrix& m, Matrix& vt, std::size_t p, std::size_t q) {
    const double apq = m(p, q);
    const double app = m(p, p);
    const double aqq = m(q, q);
    const double theta = (aqq - app) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    kernels::rotate(m.row(p), m.row(q), c, s);
    m(p, p) = app - t * apq;
    m(q, q) = aqq + t * apq;
    m(p, q) = 0.0;
    m(q, p) = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r == p || r == q) continue;
        m(r, p) = m(p, r);
        m(r, q) = m(q, r);
    }
    kernels::rotate(vt.row(p), vt.row(q), c, s);
}

std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> subset) {
    std::vector<bool> in(n, false);
    for (std::size_t i : subset) {
        if (i >= n) throw ContractViolation("node index out of range");
        if (in[i]) throw ContractViolation("duplicate node index");
        in[i] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (!in[i]) out.push_back(i);
    return out;
}

// Solves the symmetric negative definite system X Y = B column by column
// through the eigendecomposition of X.
Matrix solve_with_eigen(const EigenDecomposition& ex, const Matrix& b) {
    const Matrix& u = ex.vectors;
    Matrix ut_b = u.transpose() * b;
    for (std::size_t i = 0; i < ut_b.rows(); ++i)
        for (std::size_t j = 0; j < ut_b.cols(); ++j) ut_b(i, j) /= ex.values[i];
    return u * ut_b;
}

}  // namespace

EigenDecomposition eig_symmetric(const Matrix& input, JacobiOptions opts) {
    if (!input.is_square()) throw ContractViolation("eigensolver needs a square matrix");
    if (input.asymmetry() > kSymmetryTolerance) throw ContractViolation("eigensolver needs a symmetric matrix");

    const std::size_t n = input.rows();
    Matrix m = input;
    // Use the exact symmetric part so mirrored columns stay consistent.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
    Matrix vt = Matrix::identity(n);

    const double target = opts.relative_threshold * m.frobenius_norm();
    int sweep = 0;
    while (off_diagonal_norm(m) > target || (target == 0.0 && off_diagonal_norm(m) > 0.0)) {
        if (sweep++ >= opts.max_sweeps)
            throw NumericalFailure("Jacobi eigensolver did not converge in " + std::to_string(opts.max_sweeps) + " sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                if (m(p, q) != 0.0) rotate_pair(m, vt, p, q);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m(a, a) > m(b, b); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = m(order[k], order[k]);
        const auto v = vt.row(order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v[i];
    }
    return out;
}

double largest_eigenvalue(const Matrix& m) {
    const auto eig = eig_symmetric(m);
    return eig.values.empty() ? 0.0 : eig.values.front();
}

double eigen_residual(const Matrix& m, const EigenDecomposition& eig) {
    const std::size_t n = m.rows();
    double worst = 0.0;
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto u = eig.vectors.column(k);
        r = m * std::span<const double>(u);
        kernels::axpy(-eig.values[k], u, r);
        worst = std::max(worst, std::sqrt(kernels::dot(r, r)));
    }
    return worst;
}

double orthogonality_error(const EigenDecomposition& eig) {
    const Matrix& u = eig.vectors;
    const Matrix ut = u.transpose();
    double worst = 0.0;
    for (std::size_t i = 0; i < ut.rows(); ++i)
        for (std::size_t j = 0; j < ut.rows(); ++j)
            worst = std::max(worst, std::abs(kernels::dot(ut.row(i), ut.row(j)) - (i == j ? 1.0 : 0.0)));
    return worst;
}

EigenDecomposition controlled_spectrum(const CouplingMatrix& a, const PinningPlan& plan) {
    return eig_symmetric(controlled_coupling(a, plan));
}

SpectralMargin spectral_margin(const Matrix& controlled, double k_tilde) {
    const double lmax = largest_eigenvalue(controlled);
    return {k_tilde, lmax < -k_tilde, lmax};
}

double star_leaf_gain_bound(std::size_t n, double k_tilde) {
    const double nn = static_cast<double>(n);
    if (!(k_tilde > 0.0)) throw BoundUndefined("margin must be positive");
    if (!(nn - k_tilde - 1.0 > 0.0)) throw BoundUndefined("star gain bound needs N - k - 1 > 0");
    return std::max(k_tilde - 1.0, k_tilde * (nn - k_tilde) / (nn - k_tilde - 1.0));
}

double cluster_leaf_gain_bound(std::size_t smallest_branch, double k_tilde) {
    const double n1 = static_cast<double>(smallest_branch);
    if (!(k_tilde > 0.0)) throw BoundUndefined("margin must be positive");
    if (!(n1 > k_tilde)) throw BoundUndefined("cluster gain bound needs n1 > k");
    return std::max(k_tilde - 1.0, k_tilde * (n1 + 1.0 - k_tilde) / (n1 - k_tilde));
}

SchurOutcome schur_feasible(const CouplingMatrix& a, std::span<const std::size_t> pinned,
                            std::span<const double> gains, double alpha) {
    if (!a.is_square()) throw DimensionMismatch("coupling matrix must be square");
    if (pinned.size() != gains.size()) throw DimensionMismatch("one gain per pinned node");
    const std::size_t n = a.rows();
    const auto unpinned = complement(n, pinned);
    if (pinned.empty() || unpinned.empty())
        throw ContractViolation("pinned set must be a nonempty proper subset");
    if (!(alpha > 0.0)) throw ContractViolation("alpha must be positive");

    Matrix a1 = a.select(unpinned, unpinned);
    for (std::size_t i = 0; i < a1.rows(); ++i) a1(i, i) += alpha;
    const auto e1 = eig_symmetric(a1);
    const double top = e1.values.front();
    // Interlacing: lambda_max(A - G) >= lambda_max(A1), so a block that is not
    // negative definite settles the answer without an inverse.
    if (top >= 0.0) return SchurOutcome::infeasible;
    if (top > -kPivotBand) return SchurOutcome::indeterminate;

    const Matrix a12 = a.select(unpinned, pinned);
    Matrix lower = a.select(pinned, pinned);
    for (std::size_t i = 0; i < lower.rows(); ++i) lower(i, i) += alpha - gains[i];
    Matrix schur = lower - a12.transpose() * solve_with_eigen(e1, a12);
    // Restore exact symmetry lost to rounding in the product.
    for (std::size_t i = 0; i < schur.rows(); ++i)
        for (std::size_t j = i + 1; j < schur.cols(); ++j) {
            const double avg = 0.5 * (schur(i, j) + schur(j, i));
            schur(i, j) = avg;
            schur(j, i) = avg;
        }
    return largest_eigenvalue(schur) < 0.0 ? SchurOutcome::feasible : SchurOutcome::infeasible;
}

std::optional<double> min_uniform_gain(const CouplingMatrix& a, std::span<const std::size_t> pinned,
                                       double k_tilde, double tol) {
    if (!(tol > 0.0)) throw ContractViolation("tolerance must be positive");
    if (!a.is_square()) throw DimensionMismatch("coupling matrix must be square");
    const std::size_t n = a.rows();
    const auto unpinned = complement(n, pinned);
    if (pinned.empty() || unpinned.empty())
        throw ContractViolation("pinned set must be a nonempty proper subset");

    if (largest_eigenvalue(a.select(unpinned, unpinned)) >= -k_tilde) return std::nullopt;

    auto satisfied = [&](double eps) {
        Matrix m = a;
        for (std::size_t i : pinned) m(i, i) -= eps;
        return largest_eigenvalue(m) < -k_tilde;
    };

    double lo = 0.0;
    if (satisfied(lo)) return lo;
    double hi = 1.0;
    while (!satisfied(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e15) throw NumericalFailure("gain bracket expansion did not reach the margin");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (satisfied(mid) ? hi : lo) = mid;
    }
    return hi;
}

DiagonalBounds diagonal_spectrum_bounds(const Matrix& m) {
    const auto eig = eig_symmetric(m);
    auto d = m.diag();
    DiagonalBounds out;
    if (d.empty()) {
        out.diag_within_spectrum = true;
        return out;
    }
    const double lmax = eig.values.front();
    const double lmin = eig.values.back();
    out.diag_within_spectrum = std::all_of(d.begin(), d.end(), [&](double x) {
        return x >= lmin - kPivotBand && x <= lmax + kPivotBand;
    });
    if (std::abs(lmax) <= kPivotBand && d.size() >= 2) {
        std::partial_sort(d.begin(), d.begin() + 2, d.end(), std::greater<>());
        out.lambda2_bound_holds = d[0] + d[1] <= eig.values[1] + kPivotBand;
    }
    return out;
}

bool gershgorin_contains_spectrum(const Matrix& m) {
    const auto eig = eig_symmetric(m);
    const std::size_t n = m.rows();
    std::vector<double> radius(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) radius[i] += std::abs(m(i, j));
    for (double lambda : eig.values) {
        bool inside = false;
        for (std::size_t i = 0; i < n && !inside; ++i)
            inside = std::abs(lambda - m(i, i)) <= radius[i] + kPivotBand;
        if (!inside) return false;
    }
    return true;
}

}  // namespace pinsync
