#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinsync/matrix.hpp"
#include "pinsync/pinning.hpp"

namespace pinsync {

// Vector field f(x, t) of an isolated node together with its Jacobian.
struct NodeDynamics {
    using Field = std::function<void(std::span<const double> x, double t, std::span<double> out)>;
    using Jacobian = std::function<Matrix(std::span<const double> x, double t)>;

    std::string name;
    std::size_t dimension = 0;
    Field field;
    Jacobian jacobian;
    // Lipschitz estimate used by the integrator's step-size guard.
    double lipschitz = 0.0;

    std::vector<double> operator()(std::span<const double> x, double t = 0.0) const;
};

struct ChenParameters {
    double a = 35.0;
    double b = 3.0;
    double c_node = 28.0;
};

// Chen oscillator: (a(y-x), (c-a)x - xz + cy, xy - bz).
NodeDynamics chen_field(const ChenParameters& p = {});

// Nontrivial equilibrium (r, r, 2c - a) with r = +sqrt(b(2c - a)).
std::vector<double> chen_equilibrium(const ChenParameters& p = {});

// f(x) = F x
NodeDynamics linear_field(const Matrix& f);

// Controlled network: x_i' = f(x_i) + c sum_j A_ij Gamma x_j - c eps_i Gamma (x_i - s).
// `coupling` is any symmetric N x N matrix; gamma is the 0/1 diagonal of the
// inner linking matrix; target is a constant equilibrium of the node.
class NetworkSystem {
public:
    NetworkSystem(NodeDynamics dynamics, Matrix coupling, PinningPlan plan,
                  std::vector<double> gamma, std::vector<double> target);

    const NodeDynamics& dynamics() const noexcept { return dynamics_; }
    const Matrix& coupling() const noexcept { return coupling_; }
    const PinningPlan& plan() const noexcept { return plan_; }
    const std::vector<double>& gamma() const noexcept { return gamma_; }
    const std::vector<double>& target() const noexcept { return target_; }
    std::size_t n_nodes() const noexcept { return coupling_.rows(); }
    std::size_t dimension() const noexcept { return dynamics_.dimension; }

    // Largest step the guard admits: 2.5 / (L_f + c (|lambda_N(A)| + max eps)).
    double max_stable_step() const;

private:
    NodeDynamics dynamics_;
    Matrix coupling_;
    PinningPlan plan_;
    std::vector<double> gamma_;
    std::vector<double> target_;
    double stiffness_ = 0.0;
};

// Row i of the N x n result is the time derivative of node i.
Matrix network_rhs(const NetworkSystem& sys, const Matrix& x, double t);

// Same, writing into `out` and using `scratch` (length N) as work space.
void network_rhs(const NetworkSystem& sys, const Matrix& x, double t, Matrix& out,
                 std::vector<double>& scratch);

struct IntegrationOptions {
    // Keep every k-th state snapshot (0 keeps only the initial state).
    std::size_t state_stride = 0;
    // Allow steps above the stability guard (tests of the guard itself).
    bool skip_step_guard = false;
};

struct SimulationResult {
    std::vector<double> times;         // k * h, k = 0..steps
    std::vector<double> error_metric;  // E(t) at each time
    std::vector<std::size_t> state_steps;  // step index of each stored state
    std::vector<Matrix> states;
    double cf = 0.0;
};

double sync_error(const Matrix& states, std::span<const double> target);

// Fixed-step classical RK4 over round(T/h) steps. Throws ContractViolation
// when h exceeds the stability guard and DivergenceError on a non-finite
// state.
SimulationResult integrate_rk4(const NetworkSystem& sys, const Matrix& x0, double h, double T,
                               const IntegrationOptions& opts = {});

// Earliest recorded t* with E(tau) < tol for every recorded tau >= t*.
std::optional<double> sync_time(const SimulationResult& result, double tol);
std::optional<double> sync_time(std::span<const double> times, std::span<const double> error,
                                double tol);

// Df(s) + c lambda Gamma
Matrix mode_matrix(const NetworkSystem& sys, double c_lambda);
Matrix mode_matrix(const NodeDynamics& dyn, std::span<const double> target,
                   std::span<const double> gamma, double c_lambda);

// Largest real part of the eigenvalues of a 3x3 matrix via its
// characteristic cubic.
double spectral_abscissa_3(const Matrix& m);

// Routh-Hurwitz test on s^3 + a1 s^2 + a2 s + a3: all roots in the open
// left half plane.
bool routh_hurwitz_stable_3(const Matrix& m);

struct ThresholdOptions {
    double tol = 1e-4;
    double search_floor = -1e4;
    int region_samples = 400;
};

// sigma* < 0 with abscissa(Df(s) + sigma Gamma) >= 0 at sigma* and < 0 for
// sampled sigma in [search_floor, sigma*). Throws RegionShapeError when the
// region does not have that shape.
double mode_threshold(const NodeDynamics& dyn, std::span<const double> target,
                      std::span<const double> gamma, const ThresholdOptions& opts = {});
double mode_threshold(const NetworkSystem& sys, double tol);

// Integrates the coupled linear error system e_i' = F e_i + c sum_j At_ij Gamma e_j
// and its N decoupled eigenmodes, maps the modes back, and returns the
// largest absolute deviation over every step.
double modal_equivalence_check(const Matrix& f, const Matrix& a_tilde, double c,
                               std::span<const double> gamma, const Matrix& e0, double h, double T);

struct Box {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct QuadSample {
    bool holds_on_samples = false;
    double mu_estimate = 0.0;
    std::size_t pairs_evaluated = 0;
};

// Sampling check (not a proof) of the one-sided contraction inequality
// (x-y)^T P (f(x)-f(y) - c k Gamma (x-y)) <= -mu |x-y|^2 over uniform pairs
// from the box. mu_estimate = -max of the sampled quotients.
QuadSample quad_condition_sample(const NodeDynamics& dyn, std::span<const double> p_diag, double c,
                                 double k_tilde, std::span<const double> gamma, const Box& box,
                                 std::size_t samples, std::uint64_t seed);

}  // namespace pinsync
