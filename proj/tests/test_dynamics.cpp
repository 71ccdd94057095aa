#include <doctest.h>

#include <cmath>
#include <complex>

#include "pinsync/dynamics.hpp"
#include "pinsync/errors.hpp"
#include "pinsync/harness.hpp"
#include "pinsync/pinning.hpp"
#include "pinsync/rng.hpp"
#include "pinsync/spectral.hpp"
#include "pinsync/topology.hpp"
#include "support.hpp"

using namespace pinsync;
using doctest::Approx;

namespace {

const std::vector<double> kGamma{0.0, 1.0, 0.0};

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

NetworkSystem chen_network(const Graph& g, const PinningPlan& plan) {
    return NetworkSystem(chen_field(), coupling_matrix(g), plan, kGamma, chen_equilibrium());
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo, double hi) {
    Matrix m(r, c);
    for (auto& x : m.flat()) x = rng.uniform(lo, hi);
    return m;
}

// Central differences of the field.
Matrix numeric_jacobian(const NodeDynamics& dyn, std::vector<double> x) {
    const std::size_t n = dyn.dimension;
    Matrix j(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double step = 1e-6 * std::max(1.0, std::abs(x[k]));
        const double keep = x[k];
        x[k] = keep + step;
        const auto up = dyn(x);
        x[k] = keep - step;
        const auto down = dyn(x);
        x[k] = keep;
        for (std::size_t i = 0; i < n; ++i) j(i, k) = (up[i] - down[i]) / (2 * step);
    }
    return j;
}

// Largest real part of the eigenvalues of a 3x3 matrix by Durand-Kerner
// iteration on its characteristic polynomial.
double abscissa_oracle(const Matrix& m) {
    const double a1 = -(m(0, 0) + m(1, 1) + m(2, 2));
    const double a2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                      m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double a3 = -(m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                        m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                        m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)));
    using C = std::complex<double>;
    auto p = [&](C s) { return ((s + a1) * s + a2) * s + a3; };
    C r[3] = {C(0.4, 0.9), C(0.4, 0.9) * C(0.4, 0.9), C(0.4, 0.9) * C(0.4, 0.9) * C(0.4, 0.9)};
    const double scale = 1.0 + std::abs(a1) + std::sqrt(std::abs(a2)) + std::cbrt(std::abs(a3));
    for (auto& z : r) z *= scale;
    for (int it = 0; it < 2000; ++it)
        for (int i = 0; i < 3; ++i) {
            C d = 1.0;
            for (int j = 0; j < 3; ++j)
                if (j != i) d *= r[i] - r[j];
            r[i] -= p(r[i]) / d;
        }
    return std::max({r[0].real(), r[1].real(), r[2].real()});
}

Matrix kron_operator(const Matrix& f, const Matrix& at, double c, const std::vector<double>& gamma) {
    const std::size_t nn = at.rows(), n = f.rows();
    Matrix op(nn * n, nn * n);
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) op(i * n + a, i * n + b) += f(a, b);
            for (std::size_t j = 0; j < nn; ++j) op(i * n + a, j * n + a) += c * at(i, j) * gamma[a];
        }
    return op;
}

}  // namespace

TEST_CASE("chen field") {
    const auto chen = chen_field();
    CHECK(chen.dimension == 3);
    CHECK(chen.lipschitz == 80.0);
    const auto near = chen(std::vector<double>{7.9373, 7.9373, 21});
    for (double v : near) CHECK(std::abs(v) < 1e-3);
    CHECK(norm2(chen(chen_equilibrium())) < 1e-12);
    CHECK(chen(std::vector<double>{0, 0, 0}) == std::vector<double>{0, 0, 0});
    CHECK(chen_equilibrium()[0] == std::sqrt(63.0));
    CHECK(chen_equilibrium()[2] == 21.0);
    CHECK(chen(std::vector<double>{1, 2, 3}) == std::vector<double>{35, -7 - 3 + 56, 2 - 9});
    CHECK_THROWS_AS(chen_field({.a = 35, .b = 3, .c_node = 17}), ContractViolation);
}

TEST_CASE("jacobians match finite differences") {
    Rng rng(4);
    Matrix f = random_matrix(rng, 4, 4, -3, 3);
    for (const auto& dyn : {chen_field(), chen_field({.a = 36, .b = 3, .c_node = 20}), linear_field(f)}) {
        CAPTURE(dyn.name);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x(dyn.dimension);
            for (auto& v : x) v = rng.uniform(-30, 30);
            const Matrix exact = dyn.jacobian(x, 0.0);
            const Matrix approx = numeric_jacobian(dyn, x);
            CHECK((exact - approx).max_abs() <= std::max(1e-5, 1e-4 * exact.max_abs()));
        }
    }
}

TEST_CASE("network system validation") {
    const Graph g = star(4);
    const auto plan = PinningPlan::uncontrolled(4, 1);
    CHECK_THROWS_AS(NetworkSystem(chen_field(), coupling_matrix(g), plan, {0, 2, 0}, chen_equilibrium()),
                    ContractViolation);
    CHECK_THROWS_AS(NetworkSystem(chen_field(), coupling_matrix(g), plan, kGamma, {1, 1, 1}), ContractViolation);
    CHECK_THROWS_AS(NetworkSystem(chen_field(), coupling_matrix(g), PinningPlan::uncontrolled(3, 1), kGamma,
                                  chen_equilibrium()),
                    DimensionMismatch);
    CHECK_NOTHROW(NetworkSystem(chen_field(), coupling_matrix(g), plan, kGamma, {7.9373, 7.9373, 21}));
}

TEST_CASE("network right-hand side") {
    SUBCASE("vanishes on the synchronization manifold") {
        const auto sys = chen_network(cluster_stars({{2, 3, 4}}),
                                      plan_by_degree(cluster_stars({{2, 3, 4}}), DegreeStrategy::smallest, 9, 2.5, 10));
        Matrix x(12, 3);
        for (std::size_t i = 0; i < 12; ++i)
            for (std::size_t k = 0; k < 3; ++k) x(i, k) = chen_equilibrium()[k];
        CHECK(network_rhs(sys, x, 0.0).max_abs() < 1e-12);
    }
    SUBCASE("single node is the isolated field") {
        const NetworkSystem sys(chen_field(), Matrix(1, 1), PinningPlan::uncontrolled(1, 5), kGamma, chen_equilibrium());
        const Matrix x{{1, 2, 3}};
        const auto f = chen_field()(x.row(0));
        const Matrix out = network_rhs(sys, x, 0.0);
        for (std::size_t k = 0; k < 3; ++k) CHECK(out(0, k) == f[k]);
    }
    SUBCASE("linear field matches the Kronecker operator") {
        Rng rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t nn = 2 + rng.below(5), n = 1 + rng.below(4);
            const Graph g = testing::random_connected(rng, nn, 0.4);
            std::vector<double> gains(nn), gamma(n);
            for (auto& e : gains) e = rng.uniform01() < 0.5 ? 0.0 : rng.uniform(0, 5);
            for (auto& v : gamma) v = rng.uniform01() < 0.5 ? 0.0 : 1.0;
            const double c = rng.uniform(0.1, 3);
            const Matrix f = random_matrix(rng, n, n, -2, 2);
            const PinningPlan plan(gains, c);
            const NetworkSystem sys(linear_field(f), coupling_matrix(g), plan, gamma, std::vector<double>(n, 0.0));
            const Matrix e = random_matrix(rng, nn, n, -1, 1);
            const Matrix got = network_rhs(sys, e, 0.0);
            const auto want = kron_operator(f, controlled_coupling(coupling_matrix(g), plan), c, gamma) * e.flat();
            for (std::size_t i = 0; i < want.size(); ++i) CHECK(got.flat()[i] == Approx(want[i]).epsilon(1e-12));
        }
    }
    SUBCASE("dimension mismatch") {
        const auto sys = chen_network(star(3), PinningPlan::uncontrolled(3, 1));
        CHECK_THROWS_AS(network_rhs(sys, Matrix(2, 3), 0.0), DimensionMismatch);
    }
}

TEST_CASE("rk4 integration") {
    SUBCASE("exponential decay") {
        const NetworkSystem sys(linear_field(Matrix{{-1}}), Matrix(1, 1), PinningPlan::uncontrolled(1, 1), {0},
                                {0});
        const auto res = integrate_rk4(sys, Matrix{{1}}, 0.01, 1.0, {.state_stride = 100});
        CHECK(res.times.size() == 101);
        CHECK(std::abs(res.states.back()(0, 0) - std::exp(-1.0)) < 1e-9);
        for (std::size_t i = 1; i < res.times.size(); ++i) CHECK(res.times[i] > res.times[i - 1]);
        for (double e : res.error_metric) CHECK(e >= 0.0);
    }
    SUBCASE("fourth order on the chen node") {
        const NetworkSystem sys(chen_field(), Matrix(1, 1), PinningPlan::uncontrolled(1, 1), kGamma, chen_equilibrium());
        const Matrix x0{{-3, 2, 20}};
        const double T = 0.5;
        auto end = [&](double h) { return integrate_rk4(sys, x0, h, T, {.state_stride = 1}).states.back(); };
        const Matrix a = end(1e-3), b = end(5e-4), c = end(2.5e-4);
        const double p = std::log2((a - b).frobenius_norm() / (b - c).frobenius_norm());
        CHECK(p >= 3.7);
        CHECK(p <= 4.3);
    }
    SUBCASE("step guard") {
        const auto sys = chen_network(star(9), plan_by_degree(star(9), DegreeStrategy::largest, 1, 300, 10));
        CHECK(sys.max_stable_step() == Approx(2.5 / (80 + 10 * (9 + 300))));
        const Matrix x0 = initial_state(9, chen_equilibrium(), 1);
        CHECK_THROWS_AS(integrate_rk4(sys, x0, 1e-3, 1.0), ContractViolation);
        CHECK_NOTHROW(integrate_rk4(sys, x0, 1e-4, 1e-3));
    }
    SUBCASE("divergence carries its time") {
        const NetworkSystem sys(linear_field(Matrix{{300}}), Matrix(1, 1), PinningPlan::uncontrolled(1, 1), {0}, {0});
        try {
            integrate_rk4(sys, Matrix{{1}}, 0.01, 100.0, {.skip_step_guard = true});
            FAIL("expected divergence");
        } catch (const DivergenceError& e) {
            CHECK(e.time() > 0.0);
            CHECK(e.time() < 100.0);
        }
    }
    SUBCASE("synchronization manifold is invariant") {
        for (const char* name : {"fig2a", "fig2b", "fig5b"}) {
            const auto analysis = analyze_scenario(find_scenario(name));
            const NetworkSystem sys(chen_field(), analysis.coupling, analysis.plan, kGamma, chen_equilibrium());
            Matrix x0(sys.n_nodes(), 3);
            for (std::size_t i = 0; i < sys.n_nodes(); ++i)
                for (std::size_t k = 0; k < 3; ++k) x0(i, k) = chen_equilibrium()[k];
            const auto res = integrate_rk4(sys, x0, 1e-4, 1.0);
            for (double e : res.error_metric) CHECK(e <= 1e-9);
        }
    }
    SUBCASE("leaf pinning of star(9) drives the error below tolerance") {
        const Scenario s = find_scenario("fig2b");
        const auto analysis = analyze_scenario(s);
        const NetworkSystem sys(chen_field(), analysis.coupling, analysis.plan, kGamma, chen_equilibrium());
        const auto res = integrate_rk4(sys, initial_state(9, chen_equilibrium(), s.integration.init_seed), 1e-4, 5.0);
        CHECK(res.error_metric.back() < 1e-2);
        CHECK(res.error_metric.back() < res.error_metric.front());
    }
}

TEST_CASE("sync error") {
    const auto s = chen_equilibrium();
    Matrix x(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) x(i, k) = s[k];
    CHECK(sync_error(x, s) == 0.0);
    x(1, 0) += 3;
    x(1, 1) += 4;
    CHECK(sync_error(x, s) == Approx(5.0).epsilon(1e-14));

    Rng rng(2);
    const Matrix r = random_matrix(rng, 6, 3, -5, 5);
    double brute = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
        brute = std::max(brute, std::hypot(r(i, 0) - s[0], r(i, 1) - s[1], r(i, 2) - s[2]));
    CHECK(sync_error(r, s) == Approx(brute).epsilon(1e-14));
}

TEST_CASE("sync time") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    CHECK(sync_time(t, std::vector<double>(5, 0.0), 1e-2) == 0.0);
    CHECK(sync_time(t, std::vector<double>{5, 1, 0.5, 0.005, 0.001}, 1e-2) == 3.0);
    CHECK(sync_time(t, std::vector<double>{5, 0.001, 0.5, 0.005, 0.001}, 1e-2) == 3.0);
    CHECK_FALSE(sync_time(t, std::vector<double>{5, 0, 0, 0, 1}, 1e-2).has_value());
    CHECK_THROWS_AS(sync_time(t, std::vector<double>(5, 0.0), 0.0), ContractViolation);
}

TEST_CASE("mode matrix") {
    const auto sys = chen_network(star(3), PinningPlan::uncontrolled(3, 1));
    const Matrix df = chen_field().jacobian(chen_equilibrium(), 0.0);
    CHECK(mode_matrix(sys, 0.0) == df);
    const Matrix m = mode_matrix(sys, -100.0);
    CHECK(m(1, 1) == 28.0 - 100.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != 1 || j != 1) CHECK(m(i, j) == df(i, j));

    const Matrix f{{1, 2, 0}, {3, 4, 5}, {0, 6, 7}};
    const std::vector<double> gamma{1, 0, 1};
    const Matrix lm = mode_matrix(linear_field(f), std::vector<double>(3, 0.0), gamma, 2.0);
    CHECK(lm == Matrix{{3, 2, 0}, {3, 4, 5}, {0, 6, 9}});
}

TEST_CASE("spectral abscissa of 3x3 matrices") {
    CHECK(spectral_abscissa_3(Matrix{{-1, 0, 0}, {0, -2, 0}, {0, 0, -3}}) == Approx(-1.0));
    const Matrix df = chen_field().jacobian(chen_equilibrium(), 0.0);
    CHECK(spectral_abscissa_3(df) == Approx(4.2139819542891255).epsilon(1e-10));  // derive.py
    // (s + 1)(s^2 + 1) = s^3 + s^2 + s + 1
    const Matrix companion{{0, 1, 0}, {0, 0, 1}, {-1, -1, -1}};
    CHECK(std::abs(spectral_abscissa_3(companion)) < 1e-12);
    CHECK_THROWS_AS(spectral_abscissa_3(Matrix(2, 2)), DimensionMismatch);

    Rng rng(19);
    for (int trial = 0; trial < 2000; ++trial) {
        const Matrix m = random_matrix(rng, 3, 3, -10, 10);
        const double got = spectral_abscissa_3(m);
        CAPTURE(trial);
        CHECK(got == Approx(abscissa_oracle(m)).epsilon(1e-7).scale(10));
        if (std::abs(got) > 1e-6) CHECK(routh_hurwitz_stable_3(m) == (got < 0.0));
    }
}

TEST_CASE("mode threshold") {
    const auto dyn = chen_field();
    const auto s = chen_equilibrium();
    const double sigma = mode_threshold(dyn, s, kGamma, {.tol = 1e-4});
    CHECK(std::abs(sigma - -6.058734856724812) <= 1e-4);  // derive.py
    CHECK(spectral_abscissa_3(mode_matrix(dyn, s, kGamma, 0.0)) > 0.0);
    CHECK(spectral_abscissa_3(mode_matrix(dyn, s, kGamma, -1e4)) < 0.0);
    CHECK(spectral_abscissa_3(mode_matrix(dyn, s, kGamma, sigma)) >= 0.0);
    const double finer = mode_threshold(dyn, s, kGamma, {.tol = 5e-5});
    CHECK(std::abs(finer - sigma) <= 2e-4);

    // With no coupled component the mode matrix never changes.
    CHECK_THROWS_AS(mode_threshold(dyn, s, std::vector<double>{0, 0, 0}), RegionShapeError);
}

TEST_CASE("modal decomposition of linear networks") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = testing::random_connected(rng, 5, 0.4);
        std::vector<double> gains(5, 0.0);
        gains[rng.below(5)] = rng.uniform(0.5, 5);
        const Matrix at = controlled_coupling(coupling_matrix(g), PinningPlan(gains, 1));
        const Matrix f = random_matrix(rng, 3, 3, -1, 1);
        const Matrix e0 = random_matrix(rng, 5, 3, -1, 1);
        CHECK(modal_equivalence_check(f, at, rng.uniform(0.5, 2), kGamma, e0, 1e-3, 1.0) < 1e-6);
    }
    const Matrix f{{-1, 2}, {0, -3}};
    CHECK(modal_equivalence_check(f, Matrix{{-2}}, 1.0, std::vector<double>{1, 1}, Matrix{{1, 1}}, 1e-3, 1.0) < 1e-12);
    const Matrix at = controlled_coupling(coupling_matrix(star(4)), PinningPlan({1, 0, 0, 0}, 1));
    Matrix e0(4, 2, 0.5);
    CHECK(modal_equivalence_check(f, at, 0.0, std::vector<double>{1, 1}, e0, 1e-3, 1.0) < 1e-9);
}

TEST_CASE("quad condition sampler") {
    const Box box{{-1, -1, -1}, {1, 1, 1}};
    const std::vector<double> p{1, 1, 1};

    Matrix minus3 = Matrix::identity(3);
    minus3 *= -3.0;
    const auto lin = quad_condition_sample(linear_field(minus3), p, 0, 0, kGamma, box, 1000, 1);
    CHECK(lin.holds_on_samples);
    CHECK(lin.mu_estimate == Approx(3.0).epsilon(1e-12));

    const Box attractor{{-30, -30, 0}, {30, 30, 50}};
    const auto chen = quad_condition_sample(chen_field(), p, 0, 0, kGamma, attractor, 10000, 2);
    CHECK_FALSE(chen.holds_on_samples);

    CHECK_THROWS_AS(quad_condition_sample(chen_field(), p, 0, 0, kGamma, Box{{0, 0, 0}, {1, 0, 1}}, 10, 1),
                    InvalidDomain);

    const auto a = quad_condition_sample(chen_field(), p, 6, 1, kGamma, attractor, 500, 9);
    const auto b = quad_condition_sample(chen_field(), p, 6, 1, kGamma, attractor, 500, 9);
    CHECK(a.mu_estimate == b.mu_estimate);
}
