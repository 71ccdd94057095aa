// Command-line front end: topology generation, spectra, pinning plans,
// scenario simulation, comparisons, sweeps and figure reproductions.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinsync/errors.hpp"
#include "pinsync/harness.hpp"
#include "pinsync/io.hpp"
#include "pinsync/kernels.hpp"
#include "pinsync/pinning.hpp"
#include "pinsync/spectral.hpp"
#include "pinsync/topology.hpp"

namespace fs = std::filesystem;
using namespace pinsync;

namespace {

constexpr int kExitScenario = 2;
constexpr int kExitDivergence = 3;

struct GlobalFlags {
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> h;
    std::optional<double> T;
    std::optional<double> tol;
    bool no_step_guard = false;
};

void apply_overrides(Scenario& s, const GlobalFlags& g) {
    if (g.seed) s.integration.init_seed = *g.seed;
    if (g.h) s.integration.h = *g.h;
    if (g.T) s.integration.T = *g.T;
    if (g.tol) s.integration.tol = *g.tol;
}

// Writes `text` to <out>/<name> when --out is set, stdout otherwise.
void emit(const GlobalFlags& g, const std::string& name, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    fs::create_directories(g.out);
    std::ofstream(fs::path(g.out) / name) << text;
    std::cerr << "wrote " << (fs::path(g.out) / name).string() << '\n';
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidSize("cannot open " + path);
    return read_edge_list(in);
}

RunOptions run_options(const GlobalFlags& g, bool full, std::size_t stride) {
    RunOptions o;
    if (!g.out.empty()) o.out_dir = fs::path(g.out);
    o.full_states = full;
    o.csv_stride = stride;
    o.skip_step_guard = g.no_step_guard;
    return o;
}

void print_report(const GlobalFlags& g, const ComparisonReport& report) {
    write_report_text(std::cout, report);
    if (!g.out.empty()) {
        fs::create_directories(g.out);
        std::ofstream txt(fs::path(g.out) / "report.txt");
        write_report_text(txt, report);
        std::ofstream csv(fs::path(g.out) / "report.csv");
        write_report_csv(csv, report);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pinning control of diffusively coupled networks"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    GlobalFlags g;
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--seed", g.seed, "Seed (BA topology for `topology`, initial conditions otherwise)");
    app.add_option("--h", g.h, "Integration step");
    app.add_option("--T", g.T, "Integration horizon");
    app.add_option("--tol", g.tol, "Synchronization tolerance");
    app.add_flag("--no-step-guard", g.no_step_guard, "Integrate even when h exceeds the stability guard");

    // topology
    auto* topo = app.add_subcommand("topology", "Emit an edge list");
    std::string kind = "star";
    std::size_t n = 9, m0 = 3, m = 2;
    std::vector<std::size_t> branches;
    topo->add_option("--kind", kind, "star | cluster | ba")->check(CLI::IsMember({"star", "cluster", "ba"}));
    topo->add_option("--n", n, "Number of nodes (star, ba)");
    topo->add_option("--branches", branches, "Leaves per center (cluster)")->delimiter(',');
    topo->add_option("--m0", m0, "Seed clique size (ba)");
    topo->add_option("--m", m, "Edges per new node (ba)");

    // spectrum
    auto* spec = app.add_subcommand("spectrum", "Sorted eigenvalues of A - G as CSV");
    std::string graph_path, plan_path;
    spec->add_option("--graph", graph_path, "Edge-list file")->required();
    spec->add_option("--plan", plan_path, "Pinning-plan JSON (omit for A itself)");

    // pin
    auto* pin = app.add_subcommand("pin", "Build a pinning-plan JSON");
    std::string strategy;
    std::size_t count = 0;
    std::vector<std::size_t> nodes;
    double epsilon = 0.0, coupling = 0.0;
    pin->add_option("--graph", graph_path, "Edge-list file")->required();
    auto* strat_opt = pin->add_option("--strategy", strategy, "largest | smallest")
                          ->check(CLI::IsMember({"largest", "smallest"}));
    pin->add_option("--count", count, "Number of nodes to pin by degree");
    auto* nodes_opt = pin->add_option("--nodes", nodes, "Explicit node list")->delimiter(',');
    strat_opt->excludes(nodes_opt);
    pin->add_option("--epsilon", epsilon, "Feedback gain")->required();
    pin->add_option("--c", coupling, "Coupling strength")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run one scenario file");
    std::string scenario_path;
    bool full = false;
    std::size_t stride = 10;
    sim->add_option("scenario", scenario_path, "Scenario JSON")->required();
    sim->add_flag("--full", full, "Write per-node states instead of t,E");
    sim->add_option("--stride", stride, "Write every k-th step");

    // compare
    auto* cmp = app.add_subcommand("compare", "Run several scenarios on one topology");
    cmp->add_option("scenarios", scenario_path, "Scenario list JSON")->required();
    cmp->add_option("--stride", stride, "Write every k-th step");

    // sweep
    auto* swp = app.add_subcommand("sweep", "Vary epsilon or c over a scenario");
    std::string vary = "epsilon";
    std::vector<double> values;
    swp->add_option("scenario", scenario_path, "Scenario JSON or shipped scenario name")->required();
    swp->add_option("--vary", vary, "epsilon | c")->check(CLI::IsMember({"epsilon", "c"}));
    swp->add_option("--values", values, "Comma-separated values")->delimiter(',')->required();
    swp->add_option("--stride", stride, "Write every k-th step");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "Run a shipped figure group");
    std::string figure;
    bool cf_only = false;
    rep->add_option("figure", figure, "fig2 | fig3 | fig5 | fig6 | fig7 | fig8 | fig9")
        ->required();
    rep->add_flag("--cf-only", cf_only, "Skip integration; report cost and spectra only");
    rep->add_option("--stride", stride, "Write every k-th step");

    // scenarios
    auto* lst = app.add_subcommand("scenarios", "Print the shipped scenarios as JSON");
    std::string only;
    lst->add_option("name", only, "Print a single scenario");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*topo) {
            Graph graph;
            if (kind == "star") {
                graph = star(n);
            } else if (kind == "cluster") {
                graph = cluster_stars(ClusterSpec{branches});
            } else {
                graph = barabasi_albert(n, m0, m, g.seed.value_or(0));
            }
            std::ostringstream os;
            write_edge_list(os, graph);
            emit(g, "edges.txt", os.str());
        } else if (*spec) {
            const Graph graph = load_graph(graph_path);
            const Matrix a = coupling_matrix(graph);
            const PinningPlan plan = plan_path.empty() ? PinningPlan::uncontrolled(graph.n_nodes(), 1.0)
                                                       : plan_from_json(read_json_file(plan_path));
            std::ostringstream os;
            write_spectrum_csv(os, controlled_spectrum(a, plan).values);
            emit(g, "spectrum.csv", os.str());
        } else if (*pin) {
            const Graph graph = load_graph(graph_path);
            PinningPlan plan;
            if (!nodes.empty()) {
                std::map<std::size_t, double> gains;
                for (std::size_t i : nodes) gains[i] = epsilon;
                plan = plan_explicit(graph.n_nodes(), gains, coupling);
            } else {
                if (strategy.empty()) throw ContractViolation("pin needs --strategy with --count, or --nodes");
                plan = plan_by_degree(graph, parse_strategy(strategy), count, epsilon, coupling);
            }
            emit(g, "plan.json", plan_to_json(plan).dump(2) + "\n");
            std::cerr << "CF = " << format_exact(cost(plan)) << '\n';
        } else if (*sim) {
            auto scenarios = scenarios_from_json(read_json_file(scenario_path));
            if (scenarios.size() != 1) throw ScenarioDefinitionError("simulate takes exactly one scenario");
            apply_overrides(scenarios.front(), g);
            ComparisonReport report;
            report.rows.push_back(run_scenario(scenarios.front(), run_options(g, full, stride)));
            print_report(g, report);
        } else if (*cmp) {
            auto scenarios = scenarios_from_json(read_json_file(scenario_path));
            for (auto& s : scenarios) apply_overrides(s, g);
            print_report(g, run_comparison(scenarios, run_options(g, false, stride)));
        } else if (*swp) {
            Scenario base = fs::exists(scenario_path)
                                ? scenarios_from_json(read_json_file(scenario_path)).at(0)
                                : find_scenario(scenario_path);
            apply_overrides(base, g);
            print_report(g, sweep(base, parse_sweep_parameter(vary), values, run_options(g, false, stride)));
        } else if (*rep) {
            std::vector<Scenario> group;
            for (const auto& name : figure_group(figure)) {
                group.push_back(find_scenario(name));
                apply_overrides(group.back(), g);
            }
            RunOptions opts = run_options(g, false, stride);
            opts.simulate = !cf_only;
            ComparisonReport report;
            if (cf_only) {
                for (const auto& s : group) report.rows.push_back(run_scenario(s, opts));
            } else if (group.size() == 1) {
                report.rows.push_back(run_scenario(group.front(), opts));
            } else {
                report = run_comparison(group, opts);
            }
            print_report(g, report);
        } else if (*lst) {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& s : shipped_scenarios())
                if (only.empty() || s.name == only) out.push_back(scenario_to_json(s));
            if (out.empty()) throw ScenarioDefinitionError("unknown scenario '" + only + "'");
            emit(g, "scenarios.json", (only.empty() ? out : out.front()).dump(2) + "\n");
        }
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const ScenarioDefinitionError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return kExitScenario;
    } catch (const ComparisonDefinitionError& e) {
        std::cerr << "comparison error: " << e.what() << '\n';
        return kExitScenario;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
