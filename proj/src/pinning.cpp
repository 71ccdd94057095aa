#include "pinsync/pinning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pinsync/errors.hpp"
#include "pinsync/spectral.hpp"

namespace pinsync {

PinningPlan::PinningPlan(std::vector<double> gains, double coupling_strength)
    : gains_(std::move(gains)), c_(coupling_strength) {
    if (!std::isfinite(c_) || c_ < 0.0) throw ContractViolation("coupling strength must be >= 0");
    for (double g : gains_) {
        if (!std::isfinite(g) || g < 0.0) throw ContractViolation("feedback gains must be finite and >= 0");
    }
}

std::vector<std::size_t> PinningPlan::pinned_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < gains_.size(); ++i)
        if (gains_[i] > 0.0) out.push_back(i);
    return out;
}

std::size_t PinningPlan::pinned_count() const {
    return static_cast<std::size_t>(std::count_if(gains_.begin(), gains_.end(), [](double g) { return g > 0.0; }));
}

double PinningPlan::max_gain() const {
    return gains_.empty() ? 0.0 : *std::max_element(gains_.begin(), gains_.end());
}

DegreeStrategy parse_strategy(const std::string& s) {
    if (s == "largest") return DegreeStrategy::largest;
    if (s == "smallest") return DegreeStrategy::smallest;
    throw ContractViolation("unknown degree strategy '" + s + "' (expected largest|smallest)");
}

const char* to_string(DegreeStrategy s) {
    return s == DegreeStrategy::largest ? "largest" : "smallest";
}

std::vector<std::size_t> degree_order(const Graph& g, DegreeStrategy strategy) {
    const auto deg = degrees(g);
    std::vector<std::size_t> order(g.n_nodes());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return strategy == DegreeStrategy::largest ? deg[a] > deg[b] : deg[a] < deg[b];
    });
    return order;
}

PinningPlan plan_by_degree(const Graph& g, DegreeStrategy strategy, std::size_t count,
                           double epsilon, double c) {
    if (count < 1 || count > g.n_nodes()) throw ContractViolation("pin count out of range");
    if (!(epsilon > 0.0)) throw ContractViolation("pinning gain must be positive");
    if (!(c > 0.0)) throw ContractViolation("coupling strength must be positive");
    const auto order = degree_order(g, strategy);
    std::vector<double> gains(g.n_nodes(), 0.0);
    for (std::size_t i = 0; i < count; ++i) gains[order[i]] = epsilon;
    return PinningPlan(std::move(gains), c);
}

PinningPlan plan_explicit(std::size_t n, const std::map<std::size_t, double>& gains, double c) {
    if (!(c > 0.0)) throw ContractViolation("coupling strength must be positive");
    std::vector<double> g(n, 0.0);
    for (const auto& [node, gain] : gains) {
        if (node >= n) throw ContractViolation("pinned node " + std::to_string(node) + " out of range");
        if (!(gain > 0.0)) throw ContractViolation("pinned node " + std::to_string(node) + " needs a positive gain");
        g[node] = gain;
    }
    return PinningPlan(std::move(g), c);
}

double cost(const PinningPlan& plan) {
    double sum = 0.0;
    for (double g : plan.gains()) sum += g;
    return plan.coupling_strength() * sum;
}

CostReport cost_report(const Matrix& a, const PinningPlan& plan) {
    return {cost(plan), plan.pinned_count(), largest_eigenvalue(controlled_coupling(a, plan))};
}

Matrix controlled_coupling(const Matrix& a, const PinningPlan& plan) {
    if (!a.is_square() || a.rows() != plan.n_nodes())
        throw DimensionMismatch("plan has " + std::to_string(plan.n_nodes()) + " nodes, matrix is " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    Matrix out = a;
    for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) -= plan.gain(i);
    return out;
}

}  // namespace pinsync
