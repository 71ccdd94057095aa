#pragma once

// Test-side oracles, independent of the library's eigensolver.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pinsync/matrix.hpp"
#include "pinsync/rng.hpp"
#include "pinsync/topology.hpp"

namespace testing {

// Number of eigenvalues of symmetric M strictly below sigma, by Sylvester's
// law of inertia on the LDL^T factorization of M - sigma I.
inline std::size_t count_below(const pinsync::Matrix& m, double sigma) {
    const std::size_t n = m.rows();
    std::vector<double> l(n * n, 0.0), d(n, 0.0);
    std::size_t negative = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double djj = m(j, j) - sigma;
        for (std::size_t k = 0; k < j; ++k) djj -= l[j * n + k] * l[j * n + k] * d[k];
        if (djj == 0.0) djj = -1e-300;  // perturb off the pivot
        d[j] = djj;
        if (djj < 0.0) ++negative;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = m(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k] * d[k];
            l[i * n + j] = v / djj;
        }
    }
    return negative;
}

// Largest eigenvalue by bisection on the inertia count.
inline double largest_by_inertia(const pinsync::Matrix& m, double tol = 1e-11) {
    double bound = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) r += std::abs(m(i, j));
        bound = std::max(bound, r);
    }
    double lo = -bound - 1.0, hi = bound + 1.0;
    while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(m, mid) == m.rows())
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

inline pinsync::Matrix random_symmetric(pinsync::Rng& rng, std::size_t n, double lo, double hi) {
    pinsync::Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(lo, hi);
    return m;
}

// Random spanning tree plus extra edges with probability p.
inline pinsync::Graph random_connected(pinsync::Rng& rng, std::size_t n, double p) {
    std::vector<pinsync::Edge> edges;
    for (std::size_t i = 1; i < n; ++i) edges.emplace_back(rng.below(i), i);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform01() < p) edges.emplace_back(i, j);
    return pinsync::Graph(n, std::move(edges));
}

}  // namespace testing
