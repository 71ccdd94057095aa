#include "pinsync/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pinsync/errors.hpp"
#include "pinsync/kernels.hpp"
#include "pinsync/rng.hpp"
#include "pinsync/spectral.hpp"

namespace pinsync {

namespace {

constexpr double kStepGuard = 2.5;
constexpr double kChenLipschitz = 80.0;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct Cubic {
    double a1, a2, a3;  // s^3 + a1 s^2 + a2 s + a3
    double operator()(double s) const { return ((s + a1) * s + a2) * s + a3; }
    double derivative(double s) const { return (3.0 * s + 2.0 * a1) * s + a2; }
};

Cubic characteristic(const Matrix& m) {
    const double tr = m(0, 0) + m(1, 1) + m(2, 2);
    const double minors = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) +
                          (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
                          (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
    const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    return {-tr, minors, -det};
}

// One real root of the cubic: Cardano when the discriminant is positive,
// the trigonometric form (largest root) otherwise, then Newton polishing.
double real_root(const Cubic& poly) {
    const double shift = poly.a1 / 3.0;
    const double p = poly.a2 - poly.a1 * shift;
    const double q = 2.0 * shift * shift * shift - shift * poly.a2 + poly.a3;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    double t = 0.0;
    if (disc > 0.0) {
        const double u = std::cbrt(-0.5 * q - std::copysign(std::sqrt(disc), q));
        t = u == 0.0 ? 0.0 : u - p / (3.0 * u);
    } else if (p < 0.0) {
        const double r = std::sqrt(-p / 3.0);
        const double cos_phi = std::clamp(-0.5 * q / (r * r * r), -1.0, 1.0);
        t = 2.0 * r * std::cos(std::acos(cos_phi) / 3.0);
    }
    double s = t - shift;
    for (int it = 0; it < 4; ++it) {
        const double d = poly.derivative(s);
        if (d == 0.0) break;
        const double next = s - poly(s) / d;
        if (!(std::abs(poly(next)) < std::abs(poly(s)))) break;
        s = next;
    }
    return s;
}

}  // namespace

std::vector<double> NodeDynamics::operator()(std::span<const double> x, double t) const {
    std::vector<double> out(dimension);
    field(x, t, out);
    return out;
}

NodeDynamics chen_field(const ChenParameters& p) {
    if (!(2.0 * p.c_node - p.a > 0.0)) throw ContractViolation("Chen parameters need 2c - a > 0");
    NodeDynamics d;
    d.name = "chen";
    d.dimension = 3;
    d.lipschitz = kChenLipschitz;
    d.field = [p](std::span<const double> x, double, std::span<double> out) {
        out[0] = p.a * (x[1] - x[0]);
        out[1] = (p.c_node - p.a) * x[0] - x[0] * x[2] + p.c_node * x[1];
        out[2] = x[0] * x[1] - p.b * x[2];
    };
    d.jacobian = [p](std::span<const double> x, double) {
        return Matrix{{-p.a, p.a, 0.0},
                      {p.c_node - p.a - x[2], p.c_node, -x[0]},
                      {x[1], x[0], -p.b}};
    };
    return d;
}

std::vector<double> chen_equilibrium(const ChenParameters& p) {
    const double z = 2.0 * p.c_node - p.a;
    const double r = std::sqrt(p.b * z);
    return {r, r, z};
}

NodeDynamics linear_field(const Matrix& f) {
    if (!f.is_square()) throw DimensionMismatch("linear field needs a square matrix");
    NodeDynamics d;
    d.name = "linear";
    d.dimension = f.rows();
    d.lipschitz = f.frobenius_norm();
    d.field = [f](std::span<const double> x, double, std::span<double> out) {
        for (std::size_t i = 0; i < f.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < f.cols(); ++j) s += f(i, j) * x[j];
            out[i] = s;
        }
    };
    d.jacobian = [f](std::span<const double>, double) { return f; };
    return d;
}

NetworkSystem::NetworkSystem(NodeDynamics dynamics, Matrix coupling, PinningPlan plan,
                             std::vector<double> gamma, std::vector<double> target)
    : dynamics_(std::move(dynamics)),
      coupling_(std::move(coupling)),
      plan_(std::move(plan)),
      gamma_(std::move(gamma)),
      target_(std::move(target)) {
    const std::size_t n = dynamics_.dimension;
    if (!coupling_.is_square()) throw DimensionMismatch("coupling matrix must be square");
    if (coupling_.asymmetry() > 1e-12) throw ContractViolation("coupling matrix must be symmetric");
    for (std::size_t i = 0; i < coupling_.rows(); ++i)
        for (std::size_t j = i + 1; j < coupling_.cols(); ++j) coupling_(j, i) = coupling_(i, j);
    if (plan_.n_nodes() != coupling_.rows()) throw DimensionMismatch("plan size differs from network size");
    if (gamma_.size() != n || target_.size() != n) throw DimensionMismatch("gamma and target need the node dimension");
    for (double g : gamma_)
        if (g != 0.0 && g != 1.0) throw ContractViolation("inner linking entries must be 0 or 1");
    if (norm2(dynamics_(target_)) > 1e-3) throw ContractViolation("target is not an equilibrium of the node dynamics");

    const double lambda_n = coupling_.rows() == 0 ? 0.0 : eig_symmetric(coupling_).values.back();
    stiffness_ = dynamics_.lipschitz + plan_.coupling_strength() * (std::abs(lambda_n) + plan_.max_gain());
}

double NetworkSystem::max_stable_step() const {
    return stiffness_ > 0.0 ? kStepGuard / stiffness_ : std::numeric_limits<double>::infinity();
}

void network_rhs(const NetworkSystem& sys, const Matrix& x, double t, Matrix& out,
                 std::vector<double>& scratch) {
    const std::size_t nn = sys.n_nodes();
    const std::size_t dim = sys.dimension();
    if (x.rows() != nn || x.cols() != dim) throw DimensionMismatch("state must be N x n");
    if (out.rows() != nn || out.cols() != dim) out = Matrix(nn, dim);
    scratch.resize(2 * nn);

    for (std::size_t i = 0; i < nn; ++i) sys.dynamics().field(x.row(i), t, out.row(i));

    const double c = sys.plan().coupling_strength();
    const auto& a = sys.coupling();
    const auto& s = sys.target();
    std::span<double> component(scratch.data(), nn);
    std::span<double> coupled(scratch.data() + nn, nn);
    for (std::size_t k = 0; k < dim; ++k) {
        if (sys.gamma()[k] == 0.0) continue;
        for (std::size_t j = 0; j < nn; ++j) component[j] = x(j, k);
        std::fill(coupled.begin(), coupled.end(), 0.0);
        // A is symmetric, so column j is row j: contiguous axpy per neighbor.
        for (std::size_t j = 0; j < nn; ++j)
            if (component[j] != 0.0) kernels::axpy(component[j], a.row(j), coupled);
        for (std::size_t i = 0; i < nn; ++i)
            out(i, k) += c * coupled[i] - c * sys.plan().gain(i) * (component[i] - s[k]);
    }
}

Matrix network_rhs(const NetworkSystem& sys, const Matrix& x, double t) {
    Matrix out(sys.n_nodes(), sys.dimension());
    std::vector<double> scratch;
    network_rhs(sys, x, t, out, scratch);
    return out;
}

double sync_error(const Matrix& states, std::span<const double> target) {
    if (states.cols() != target.size()) throw DimensionMismatch("target dimension differs from state");
    double worst = 0.0;
    for (std::size_t i = 0; i < states.rows(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < states.cols(); ++k) {
            const double d = states(i, k) - target[k];
            s += d * d;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

SimulationResult integrate_rk4(const NetworkSystem& sys, const Matrix& x0, double h, double T,
                               const IntegrationOptions& opts) {
    if (!(h > 0.0) || !(T >= h)) throw ContractViolation("need h > 0 and T >= h");
    if (x0.rows() != sys.n_nodes() || x0.cols() != sys.dimension())
        throw DimensionMismatch("initial state must be N x n");
    if (!opts.skip_step_guard && h > sys.max_stable_step())
        throw ContractViolation("step " + std::to_string(h) + " exceeds the stability guard " +
                                std::to_string(sys.max_stable_step()));

    const auto steps = static_cast<std::size_t>(std::llround(T / h));
    const auto& s = sys.target();
    SimulationResult res;
    res.cf = cost(sys.plan());
    res.times.reserve(steps + 1);
    res.error_metric.reserve(steps + 1);

    Matrix x = x0;
    Matrix k1(x.rows(), x.cols()), k2 = k1, k3 = k1, k4 = k1, tmp = k1;
    std::vector<double> scratch;
    auto record = [&](std::size_t step) {
        res.times.push_back(static_cast<double>(step) * h);
        res.error_metric.push_back(sync_error(x, s));
        if (step == 0 || (opts.state_stride > 0 && step % opts.state_stride == 0)) {
            res.state_steps.push_back(step);
            res.states.push_back(x);
        }
    };

    if (!all_finite(x.flat())) throw DivergenceError("non-finite initial state", 0.0);
    record(0);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t = static_cast<double>(step) * h;
        network_rhs(sys, x, t, k1, scratch);
        kernels::add_scaled(x.flat(), 0.5 * h, k1.flat(), tmp.flat());
        network_rhs(sys, tmp, t + 0.5 * h, k2, scratch);
        kernels::add_scaled(x.flat(), 0.5 * h, k2.flat(), tmp.flat());
        network_rhs(sys, tmp, t + 0.5 * h, k3, scratch);
        kernels::add_scaled(x.flat(), h, k3.flat(), tmp.flat());
        network_rhs(sys, tmp, t + h, k4, scratch);
        kernels::rk4_combine(x.flat(), k1.flat(), k2.flat(), k3.flat(), k4.flat(), h);
        if (!all_finite(x.flat())) {
            const double when = static_cast<double>(step + 1) * h;
            throw DivergenceError("state diverged at t=" + std::to_string(when), when);
        }
        record(step + 1);
    }
    return res;
}

std::optional<double> sync_time(std::span<const double> times, std::span<const double> error,
                                double tol) {
    if (!(tol > 0.0)) throw ContractViolation("sync tolerance must be positive");
    if (times.size() != error.size()) throw DimensionMismatch("times and errors differ in length");
    if (times.empty()) return std::nullopt;
    std::size_t first_good = error.size();
    while (first_good > 0 && error[first_good - 1] < tol) --first_good;
    if (first_good == error.size()) return std::nullopt;
    return times[first_good];
}

std::optional<double> sync_time(const SimulationResult& result, double tol) {
    return sync_time(result.times, result.error_metric, tol);
}

Matrix mode_matrix(const NodeDynamics& dyn, std::span<const double> target,
                   std::span<const double> gamma, double c_lambda) {
    if (gamma.size() != dyn.dimension || target.size() != dyn.dimension)
        throw DimensionMismatch("gamma and target need the node dimension");
    Matrix m = dyn.jacobian(target, 0.0);
    for (std::size_t k = 0; k < gamma.size(); ++k) m(k, k) += c_lambda * gamma[k];
    return m;
}

Matrix mode_matrix(const NetworkSystem& sys, double c_lambda) {
    return mode_matrix(sys.dynamics(), sys.target(), sys.gamma(), c_lambda);
}

double spectral_abscissa_3(const Matrix& m) {
    if (m.rows() != 3 || m.cols() != 3) throw DimensionMismatch("spectral_abscissa_3 needs a 3x3 matrix");
    const Cubic poly = characteristic(m);
    const double r = real_root(poly);
    // Deflate: s^3 + a1 s^2 + a2 s + a3 = (s - r)(s^2 + b s + c).
    const double b = poly.a1 + r;
    const double c = poly.a2 + r * b;
    const double disc = b * b - 4.0 * c;
    double quad_max;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (b + std::copysign(sq, b));
        quad_max = q == 0.0 ? 0.0 : std::max(q, c / q);
    } else {
        quad_max = -0.5 * b;
    }
    return std::max(r, quad_max);
}

bool routh_hurwitz_stable_3(const Matrix& m) {
    if (m.rows() != 3 || m.cols() != 3) throw DimensionMismatch("Routh-Hurwitz test needs a 3x3 matrix");
    const Cubic p = characteristic(m);
    return p.a1 > 0.0 && p.a3 > 0.0 && p.a1 * p.a2 > p.a3;
}

double mode_threshold(const NodeDynamics& dyn, std::span<const double> target,
                      std::span<const double> gamma, const ThresholdOptions& opts) {
    if (dyn.dimension != 3) throw DimensionMismatch("mode threshold is implemented for 3-dimensional nodes");
    if (!(opts.tol > 0.0)) throw ContractViolation("threshold tolerance must be positive");
    const Matrix base = mode_matrix(dyn, target, gamma, 0.0);
    auto abscissa = [&](double sigma) {
        Matrix m = base;
        for (std::size_t k = 0; k < 3; ++k) m(k, k) += sigma * gamma[k];
        return spectral_abscissa_3(m);
    };
    double lo = opts.search_floor;
    double hi = 0.0;
    if (!(abscissa(hi) >= 0.0) || !(abscissa(lo) < 0.0))
        throw RegionShapeError("no stability sign change in [" + std::to_string(lo) + ", 0]");
    while (hi - lo > opts.tol) {
        const double mid = 0.5 * (lo + hi);
        (abscissa(mid) < 0.0 ? lo : hi) = mid;
    }
    // Sample below the crossing, densely near it, to confirm the region
    // extends all the way to the floor.
    for (int j = 0; j <= opts.region_samples; ++j) {
        const double frac = static_cast<double>(j) / opts.region_samples;
        const double sigma = lo - (lo - opts.search_floor) * frac * frac;
        if (!(abscissa(sigma) < 0.0))
            throw RegionShapeError("stability region is not an interval ending at the threshold (sigma=" +
                                   std::to_string(sigma) + ")");
    }
    return hi;
}

double mode_threshold(const NetworkSystem& sys, double tol) {
    ThresholdOptions opts;
    opts.tol = tol;
    return mode_threshold(sys.dynamics(), sys.target(), sys.gamma(), opts);
}

double modal_equivalence_check(const Matrix& f, const Matrix& a_tilde, double c,
                               std::span<const double> gamma, const Matrix& e0, double h, double T) {
    const std::size_t nn = a_tilde.rows();
    const std::size_t dim = f.rows();
    if (e0.rows() != nn || e0.cols() != dim) throw DimensionMismatch("initial error must be N x n");
    const std::vector<double> zero(dim, 0.0);
    const std::vector<double> g(gamma.begin(), gamma.end());
    IntegrationOptions every_step;
    every_step.state_stride = 1;

    const NetworkSystem full(linear_field(f), a_tilde, PinningPlan::uncontrolled(nn, c), g, zero);
    const auto coupled = integrate_rk4(full, e0, h, T, every_step);

    const auto eig = eig_symmetric(a_tilde);
    const Matrix& u = eig.vectors;
    const Matrix modes0 = u.transpose() * e0;  // row i: mode i
    std::vector<SimulationResult> modal;
    modal.reserve(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        Matrix x0(1, dim);
        for (std::size_t k = 0; k < dim; ++k) x0(0, k) = modes0(i, k);
        const NetworkSystem single(linear_field(mode_matrix(linear_field(f), zero, g, c * eig.values[i])),
                                   Matrix(1, 1), PinningPlan::uncontrolled(1, c), g, zero);
        modal.push_back(integrate_rk4(single, x0, h, T, every_step));
    }

    double worst = 0.0;
    Matrix stacked(nn, dim);
    for (std::size_t step = 0; step < coupled.states.size(); ++step) {
        for (std::size_t i = 0; i < nn; ++i)
            for (std::size_t k = 0; k < dim; ++k) stacked(i, k) = modal[i].states[step](0, k);
        const Matrix back = u * stacked;
        const Matrix& ref = coupled.states[step];
        for (std::size_t i = 0; i < nn; ++i)
            for (std::size_t k = 0; k < dim; ++k) worst = std::max(worst, std::abs(back(i, k) - ref(i, k)));
    }
    return worst;
}

QuadSample quad_condition_sample(const NodeDynamics& dyn, std::span<const double> p_diag, double c,
                                 double k_tilde, std::span<const double> gamma, const Box& box,
                                 std::size_t samples, std::uint64_t seed) {
    const std::size_t n = dyn.dimension;
    if (p_diag.size() != n || gamma.size() != n || box.lower.size() != n || box.upper.size() != n)
        throw DimensionMismatch("P, gamma and box need the node dimension");
    if (samples < 1) throw ContractViolation("need at least one sample");
    for (double p : p_diag)
        if (!(p > 0.0)) throw ContractViolation("P must be positive diagonal");
    for (std::size_t k = 0; k < n; ++k)
        if (!(box.upper[k] > box.lower[k])) throw InvalidDomain("sampling box has zero volume");

    Rng rng(seed);
    std::vector<double> x(n), y(n), fx(n), fy(n);
    QuadSample out;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t k = 0; k < n; ++k) x[k] = rng.uniform(box.lower[k], box.upper[k]);
        for (std::size_t k = 0; k < n; ++k) y[k] = rng.uniform(box.lower[k], box.upper[k]);
        double dd = 0.0;
        for (std::size_t k = 0; k < n; ++k) dd += (x[k] - y[k]) * (x[k] - y[k]);
        if (dd == 0.0) continue;
        dyn.field(x, 0.0, fx);
        dyn.field(y, 0.0, fy);
        double num = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = x[k] - y[k];
            num += d * p_diag[k] * (fx[k] - fy[k] - c * k_tilde * gamma[k] * d);
        }
        worst = std::max(worst, num / dd);
        ++out.pairs_evaluated;
    }
    out.holds_on_samples = out.pairs_evaluated > 0 && worst < 0.0;
    out.mu_estimate = -worst;
    return out;
}

}  // namespace pinsync
