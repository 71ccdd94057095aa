#include "pinsync/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <mutex>
#include <set>

#include "pinsync/errors.hpp"
#include "pinsync/io.hpp"
#include "pinsync/rng.hpp"
#include "pinsync/spectral.hpp"

namespace pinsync {

namespace {

// First seed returned by scan_ba_seed(0, ...).
constexpr std::uint64_t kShippedBaSeed = 2171;

Scenario make(std::string name, std::string description, TopologySpec topo, PlanSpec plan,
              IntegrationSpec integ, double cf) {
    Scenario s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.topology = std::move(topo);
    s.plan = std::move(plan);
    s.integration = integ;
    s.expected_cf = cf;
    return s;
}

TopologySpec star_topology(std::size_t n) {
    TopologySpec t;
    t.kind = TopologySpec::Kind::star;
    t.n = n;
    return t;
}

TopologySpec cluster_topology(std::vector<std::size_t> branches) {
    TopologySpec t;
    t.kind = TopologySpec::Kind::cluster;
    t.branches = std::move(branches);
    return t;
}

TopologySpec ba_topology() {
    TopologySpec t;
    t.kind = TopologySpec::Kind::ba;
    t.n = kBaNodes;
    t.m0 = kBaSeedNodes;
    t.m = kBaEdgesPerNode;
    t.seed = shipped_ba_seed();
    return t;
}

PlanSpec by_degree(std::size_t largest, std::size_t smallest, double epsilon, double c) {
    PlanSpec p;
    p.largest = largest;
    p.smallest = smallest;
    p.epsilon = epsilon;
    p.c = c;
    return p;
}

IntegrationSpec horizon(double T, std::uint64_t init_seed) {
    IntegrationSpec i;
    i.T = T;
    i.init_seed = init_seed;
    return i;
}

// Initial-condition seeds, one per topology so paired scenarios start from
// the same state.
constexpr std::uint64_t kStarInitSeed = 9;
constexpr std::uint64_t kClusterInitSeed = 12;
constexpr std::uint64_t kBaInitSeed = 20;

std::vector<Scenario> build_shipped_scenarios() {
    const auto star9 = star_topology(9);
    const auto cluster = cluster_topology({2, 3, 4});
    const auto ba = ba_topology();
    std::vector<Scenario> out{
        make("fig2a", "star(9), hub pinned, c=10", star9, by_degree(1, 0, 300, 10), horizon(5, kStarInitSeed), 3000),
        make("fig2b", "star(9), all leaves pinned, c=10", star9, by_degree(0, 8, 1.5, 10), horizon(5, kStarInitSeed), 120),
        make("fig3a", "star(9), hub pinned, c=7", star9, by_degree(1, 0, 500, 7), horizon(10, kStarInitSeed), 3500),
        make("fig3b", "star(9), all leaves pinned, c=7", star9, by_degree(0, 8, 1.5, 7), horizon(10, kStarInitSeed), 84),
        make("fig5a", "cluster [2,3,4], centers pinned", cluster, by_degree(3, 0, 300, 10), horizon(5, kClusterInitSeed), 9000),
        make("fig5b", "cluster [2,3,4], all leaves pinned", cluster, by_degree(0, 9, 2.5, 10), horizon(5, kClusterInitSeed), 225),
        make("fig6a", "BA(20), three hubs, uncoupled and unpinned", ba, by_degree(3, 0, 0, 0), horizon(10, kBaInitSeed), 0),
        make("fig6b", "BA(20), three hubs, coupled, zero gain", ba, by_degree(3, 0, 0, 6), horizon(10, kBaInitSeed), 0),
        make("fig6c", "BA(20), three hubs, eps=500", ba, by_degree(3, 0, 500, 6), horizon(10, kBaInitSeed), 9000),
        make("fig6d", "BA(20), three hubs, eps=1000", ba, by_degree(3, 0, 1000, 6), horizon(10, kBaInitSeed), 18000),
        make("fig7", "BA(20), eleven smallest, eps=5", ba, by_degree(0, 11, 5, 6), horizon(10, kBaInitSeed), 330),
        make("fig8a", "BA(20), three hubs, c=8, eps=500", ba, by_degree(3, 0, 500, 8), horizon(10, kBaInitSeed), 12000),
        make("fig8b", "BA(20), eleven smallest, eps=8", ba, by_degree(0, 11, 8, 6), horizon(10, kBaInitSeed), 528),
        make("fig9a", "BA(20), two hubs, eps=55", ba, by_degree(2, 0, 55, 6), horizon(10, kBaInitSeed), 660),
        make("fig9b", "BA(20), three hubs and two smallest, eps=22", ba, by_degree(3, 2, 22, 6), horizon(10, kBaInitSeed), 660),
        make("fig9c", "BA(20), eleven smallest, eps=10", ba, by_degree(0, 11, 10, 6), horizon(10, kBaInitSeed), 660),
    };
    std::sort(out.begin(), out.end(), [](const Scenario& a, const Scenario& b) { return a.name < b.name; });
    return out;
}

ReportRow row_from_analysis(const Scenario& s, const ScenarioAnalysis& a) {
    ReportRow r;
    r.name = s.name;
    r.cf = a.cf;
    r.pinned = a.plan.pinned_count();
    r.c = a.plan.coupling_strength();
    r.lambda_max = a.lambda_max;
    r.sigma_star = a.sigma_star;
    r.predicted_stable = a.predicted_stable;
    return r;
}

double cached_threshold(double tol) {
    static std::mutex mu;
    static std::vector<std::pair<double, double>> cache;
    std::lock_guard lock(mu);
    for (const auto& [t, v] : cache)
        if (t == tol) return v;
    ThresholdOptions opts;
    opts.tol = tol;
    const double v = mode_threshold(scenario_dynamics(), scenario_target(), scenario_gamma(), opts);
    cache.emplace_back(tol, v);
    return v;
}

ReportRow run_or_diverge(const Scenario& s, const RunOptions& opts) {
    try {
        return run_scenario(s, opts);
    } catch (const DivergenceError& e) {
        ReportRow r = row_from_analysis(s, analyze_scenario(s, opts.threshold_tol));
        r.outcome = Outcome::diverged;
        r.simulated = true;
        r.divergence_time = e.time();
        r.final_error = std::numeric_limits<double>::infinity();
        return r;
    }
}

ComparisonReport run_all(const std::vector<Scenario>& scenarios, const RunOptions& opts) {
    std::vector<std::future<ReportRow>> jobs;
    jobs.reserve(scenarios.size());
    for (const auto& s : scenarios)
        jobs.push_back(std::async(std::launch::async, [&s, &opts] { return run_or_diverge(s, opts); }));
    ComparisonReport report;
    for (auto& j : jobs) report.rows.push_back(j.get());
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ReportRow& a, const ReportRow& b) { return a.name < b.name; });
    return report;
}

}  // namespace

Graph TopologySpec::build() const {
    switch (kind) {
        case Kind::star: return star(n);
        case Kind::cluster: return cluster_stars(ClusterSpec{branches});
        case Kind::ba: return barabasi_albert(n, m0, m, seed);
    }
    throw ScenarioDefinitionError("unknown topology kind");
}

PinningPlan PlanSpec::build(const Graph& g) const {
    const std::size_t n = g.n_nodes();
    if (largest > n || smallest > n) throw ScenarioDefinitionError("pin count exceeds network size");
    if (!(epsilon >= 0.0) || !(c >= 0.0)) throw ScenarioDefinitionError("epsilon and c must be >= 0");
    std::set<std::size_t> pinned(nodes.begin(), nodes.end());
    for (std::size_t i : pinned)
        if (i >= n) throw ScenarioDefinitionError("pinned node " + std::to_string(i) + " out of range");
    const auto big = degree_order(g, DegreeStrategy::largest);
    const auto small = degree_order(g, DegreeStrategy::smallest);
    pinned.insert(big.begin(), big.begin() + static_cast<std::ptrdiff_t>(largest));
    pinned.insert(small.begin(), small.begin() + static_cast<std::ptrdiff_t>(smallest));
    std::vector<double> gains(n, 0.0);
    for (std::size_t i : pinned) gains[i] = epsilon;
    return PinningPlan(std::move(gains), c);
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::synchronized: return "synchronized";
        case Outcome::not_synchronized: return "not-synchronized";
        case Outcome::diverged: return "diverged";
    }
    return "?";
}

Outcome parse_outcome(const std::string& s) {
    if (s == "synchronized") return Outcome::synchronized;
    if (s == "not-synchronized") return Outcome::not_synchronized;
    if (s == "diverged") return Outcome::diverged;
    throw ScenarioDefinitionError("unknown outcome '" + s + "'");
}

NodeDynamics scenario_dynamics() { return chen_field(); }
std::vector<double> scenario_gamma() { return {0.0, 1.0, 0.0}; }
std::vector<double> scenario_target() { return chen_equilibrium(); }

Matrix initial_state(std::size_t n_nodes, std::span<const double> target, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t dim = target.size();
    Matrix x(n_nodes, dim);
    std::vector<double> r(dim);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& v : r) {
                v = rng.uniform(-1.0, 1.0);
                norm2 += v * v;
            }
        } while (norm2 > 1.0);
        for (std::size_t k = 0; k < dim; ++k) x(i, k) = target[k] + r[k];
    }
    return x;
}

ScenarioAnalysis analyze_scenario(const Scenario& s, double threshold_tol) {
    ScenarioAnalysis a;
    try {
        a.graph = s.topology.build();
        a.plan = s.plan.build(a.graph);
    } catch (const ScenarioDefinitionError&) {
        throw;
    } catch (const Error& e) {
        throw ScenarioDefinitionError("scenario '" + s.name + "': " + e.what());
    }
    a.coupling = coupling_matrix(a.graph);
    a.cf = cost(a.plan);
    if (s.expected_cf && *s.expected_cf != a.cf)
        throw ScenarioDefinitionError("scenario '" + s.name + "': cost " + format_exact(a.cf) +
                                      " differs from expected " + format_exact(*s.expected_cf));
    a.lambda_max = largest_eigenvalue(controlled_coupling(a.coupling, a.plan));
    a.sigma_star = cached_threshold(threshold_tol);
    a.predicted_stable = a.plan.coupling_strength() * a.lambda_max < a.sigma_star;
    return a;
}

ScenarioRun simulate_scenario(const Scenario& s, const RunOptions& opts) {
    ScenarioRun run;
    run.analysis = analyze_scenario(s, opts.threshold_tol);
    run.row = row_from_analysis(s, run.analysis);
    if (!opts.simulate) return run;

    const auto target = scenario_target();
    const NetworkSystem sys(scenario_dynamics(), run.analysis.coupling, run.analysis.plan, scenario_gamma(), target);
    if (!opts.skip_step_guard && s.integration.h > sys.max_stable_step())
        throw ScenarioDefinitionError("scenario '" + s.name + "': step " + format_exact(s.integration.h) +
                                      " exceeds the stability guard " + format_sig(sys.max_stable_step(), 6));
    const Matrix x0 = initial_state(run.analysis.graph.n_nodes(), target, s.integration.init_seed);
    IntegrationOptions iopt;
    iopt.state_stride = opts.full_states ? std::max<std::size_t>(opts.csv_stride, 1) : 0;
    iopt.skip_step_guard = opts.skip_step_guard;
    run.result = integrate_rk4(sys, x0, s.integration.h, s.integration.T, iopt);

    run.row.sync_time = sync_time(run.result, s.integration.tol);
    run.row.final_error = run.result.error_metric.back();
    run.row.simulated = true;
    run.row.outcome = run.row.sync_time ? Outcome::synchronized : Outcome::not_synchronized;
    return run;
}

void write_artifacts(const Scenario& s, const ScenarioRun& run, const std::filesystem::path& dir,
                     const RunOptions& opts) {
    std::filesystem::create_directories(dir);
    const std::size_t stride = std::max<std::size_t>(opts.csv_stride, 1);
    const auto& res = run.result;
    if (!res.times.empty()) {
        std::ofstream csv(dir / (s.name + ".csv"));
        if (opts.full_states) {
            csv << "t,node";
            const std::size_t dim = res.states.empty() ? 0 : res.states.front().cols();
            for (std::size_t k = 0; k < dim; ++k) csv << ",x" << (k + 1);
            csv << '\n';
            for (std::size_t m = 0; m < res.states.size(); ++m) {
                const double t = res.times[res.state_steps[m]];
                const Matrix& x = res.states[m];
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    csv << format_sig(t, 9) << ',' << i;
                    for (std::size_t k = 0; k < x.cols(); ++k) csv << ',' << format_sig(x(i, k), 9);
                    csv << '\n';
                }
            }
        } else {
            csv << "t,E\n";
            const std::size_t last = res.times.size() - 1;
            for (std::size_t k = 0; k <= last; ++k) {
                if (k % stride != 0 && k != last) continue;
                csv << format_sig(res.times[k], 9) << ',' << format_sig(res.error_metric[k], 9) << '\n';
            }
        }
    }

    nlohmann::json meta{
        {"scenario", s.name},
        {"rng", Rng::kAlgorithm},
        {"init_seed", s.integration.init_seed},
        {"h", s.integration.h},
        {"T", s.integration.T},
        {"tol", s.integration.tol},
        {"steps", res.times.empty() ? 0 : res.times.size() - 1},
        {"topology", scenario_to_json(s)["topology"]},
        {"plan", plan_to_json(run.analysis.plan)},
        {"cf", run.analysis.cf},
        {"lambda_max", run.analysis.lambda_max},
        {"sigma_star", run.analysis.sigma_star},
        {"predicted_stable", run.analysis.predicted_stable},
        {"sync_time", run.row.sync_time ? nlohmann::json(*run.row.sync_time) : nlohmann::json(nullptr)},
        {"final_error", run.row.final_error},
        {"outcome", to_string(run.row.outcome)},
    };
    std::ofstream(dir / (s.name + ".json")) << meta.dump(2) << '\n';
}

ReportRow run_scenario(const Scenario& s, const RunOptions& opts) {
    const ScenarioRun run = simulate_scenario(s, opts);
    if (opts.out_dir && opts.simulate) write_artifacts(s, run, *opts.out_dir, opts);
    return run.row;
}

ComparisonReport run_comparison(const std::vector<Scenario>& scenarios, const RunOptions& opts) {
    if (scenarios.size() < 2) throw ComparisonDefinitionError("a comparison needs at least two scenarios");
    for (const auto& s : scenarios) {
        if (!(s.topology == scenarios.front().topology))
            throw ComparisonDefinitionError("scenario '" + s.name + "' uses a different topology than '" +
                                            scenarios.front().name + "'");
        if (s.integration.init_seed != scenarios.front().integration.init_seed)
            throw ComparisonDefinitionError("scenario '" + s.name + "' uses a different initial-condition seed");
    }
    return run_all(scenarios, opts);
}

SweepParameter parse_sweep_parameter(const std::string& s) {
    if (s == "epsilon") return SweepParameter::epsilon;
    if (s == "c") return SweepParameter::c;
    throw ContractViolation("sweep parameter must be epsilon or c");
}

ComparisonReport sweep(const Scenario& base, SweepParameter vary, const std::vector<double>& values,
                       const RunOptions& opts) {
    if (values.empty()) throw ContractViolation("sweep needs at least one value");
    std::vector<Scenario> runs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!(v > 0.0)) throw ContractViolation("sweep values must be positive");
        Scenario s = base;
        s.expected_cf.reset();
        s.expected_outcome.reset();
        (vary == SweepParameter::epsilon ? s.plan.epsilon : s.plan.c) = v;
        char idx[16];
        std::snprintf(idx, sizeof idx, "%03zu", i);
        s.name = base.name + "#" + idx + (vary == SweepParameter::epsilon ? ":epsilon=" : ":c=") + format_exact(v);
        runs.push_back(std::move(s));
    }
    return run_all(runs, opts);
}

std::vector<Scenario> shipped_scenarios() {
    static const std::vector<Scenario> all = build_shipped_scenarios();
    return all;
}

const Scenario& find_scenario(const std::string& name) {
    static const std::vector<Scenario> all = build_shipped_scenarios();
    for (const auto& s : all)
        if (s.name == name) return s;
    throw ScenarioDefinitionError("unknown scenario '" + name + "'");
}

std::vector<std::string> figure_groups() { return {"fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9"}; }

std::vector<std::string> figure_group(const std::string& figure) {
    const auto groups = figure_groups();
    if (std::find(groups.begin(), groups.end(), figure) == groups.end())
        throw ScenarioDefinitionError("unknown figure '" + figure + "'");
    std::vector<std::string> out;
    for (const auto& s : shipped_scenarios())
        if (s.name == figure || (s.name.size() == figure.size() + 1 && s.name.starts_with(figure)))
            out.push_back(s.name);
    return out;
}

std::uint64_t shipped_ba_seed() { return kShippedBaSeed; }

bool ba_instance_qualifies(const Graph& g, double sigma_star) {
    auto deg = degrees(g);
    std::sort(deg.begin(), deg.end(), std::greater<>());
    if (deg.size() < 11 || deg[0] != 15 || deg[1] != 13 || deg[2] != 10) return false;
    const Matrix a = coupling_matrix(g);
    const double small = 6.0 * largest_eigenvalue(controlled_coupling(a, plan_by_degree(g, DegreeStrategy::smallest, 11, 5.0, 6.0)));
    const double hubs = 6.0 * largest_eigenvalue(controlled_coupling(a, plan_by_degree(g, DegreeStrategy::largest, 3, 500.0, 6.0)));
    return small < sigma_star && small < hubs;
}

std::optional<std::uint64_t> scan_ba_seed(std::uint64_t first, std::uint64_t last) {
    const double sigma = cached_threshold(1e-4);
    for (std::uint64_t seed = first; seed < last; ++seed)
        if (ba_instance_qualifies(barabasi_albert(kBaNodes, kBaSeedNodes, kBaEdgesPerNode, seed), sigma)) return seed;
    return std::nullopt;
}

}  // namespace pinsync
