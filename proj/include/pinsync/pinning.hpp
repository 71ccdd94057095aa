#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pinsync/matrix.hpp"
#include "pinsync/topology.hpp"

namespace pinsync {

// Feedback gains per node (zero means unpinned) and the coupling strength.
class PinningPlan {
public:
    PinningPlan() = default;

    // Throws ContractViolation for negative or non-finite gains, or a
    // negative coupling strength. c = 0 is accepted for uncoupled baselines.
    PinningPlan(std::vector<double> gains, double coupling_strength);

    static PinningPlan uncontrolled(std::size_t n, double coupling_strength) {
        return PinningPlan(std::vector<double>(n, 0.0), coupling_strength);
    }

    std::size_t n_nodes() const noexcept { return gains_.size(); }
    const std::vector<double>& gains() const noexcept { return gains_; }
    double gain(std::size_t i) const { return gains_.at(i); }
    double coupling_strength() const noexcept { return c_; }

    std::vector<std::size_t> pinned_nodes() const;
    std::size_t pinned_count() const;
    double max_gain() const;

    friend bool operator==(const PinningPlan&, const PinningPlan&) = default;

private:
    std::vector<double> gains_;
    double c_ = 1.0;
};

enum class DegreeStrategy { largest, smallest };

DegreeStrategy parse_strategy(const std::string& s);
const char* to_string(DegreeStrategy s);

// Nodes ordered by degree under the strategy; equal degrees keep ascending
// node index.
std::vector<std::size_t> degree_order(const Graph& g, DegreeStrategy strategy);

// Pins the first `count` nodes of degree_order with a uniform gain.
PinningPlan plan_by_degree(const Graph& g, DegreeStrategy strategy, std::size_t count,
                           double epsilon, double c);

// Pins exactly the keys of `gains` (each gain > 0); all other nodes get 0.
PinningPlan plan_explicit(std::size_t n, const std::map<std::size_t, double>& gains, double c);

// c * sum(gains)
double cost(const PinningPlan& plan);

struct CostReport {
    double cf = 0.0;
    std::size_t pinned_count = 0;
    double lambda_max_controlled = 0.0;
};

CostReport cost_report(const Matrix& a, const PinningPlan& plan);

// A - diag(gains)
Matrix controlled_coupling(const Matrix& a, const PinningPlan& plan);

}  // namespace pinsync
