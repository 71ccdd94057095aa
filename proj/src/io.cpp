#include "pinsync/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include "pinsync/errors.hpp"

namespace pinsync {

using nlohmann::json;

namespace {

const char* kind_name(TopologySpec::Kind k) {
    switch (k) {
        case TopologySpec::Kind::star: return "star";
        case TopologySpec::Kind::cluster: return "cluster";
        case TopologySpec::Kind::ba: return "ba";
    }
    return "?";
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ScenarioDefinitionError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ScenarioDefinitionError(where + ": bad field '" + key + "': " + e.what());
    }
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return left ? s + fill : fill + s;
}

std::string opt_sig(const std::optional<double>& v, int digits) {
    return v ? format_sig(*v, digits) : "-";
}

}  // namespace

json plan_to_json(const PinningPlan& plan) {
    json pins = json::array();
    for (std::size_t i : plan.pinned_nodes()) pins.push_back({{"node", i}, {"gain", plan.gain(i)}});
    return {{"n", plan.n_nodes()}, {"c", plan.coupling_strength()}, {"pins", pins}};
}

PinningPlan plan_from_json(const json& j) {
    const std::string where = "pinning plan";
    const auto n = require<std::size_t>(j, "n", where);
    const auto c = require<double>(j, "c", where);
    std::map<std::size_t, double> gains;
    for (const auto& p : optional_field<json>(j, "pins", json::array())) {
        const auto node = require<std::size_t>(p, "node", where);
        if (!gains.emplace(node, require<double>(p, "gain", where)).second)
            throw ContractViolation("node " + std::to_string(node) + " pinned twice");
    }
    if (gains.empty()) return PinningPlan::uncontrolled(n, c);
    return plan_explicit(n, gains, c);
}

json scenario_to_json(const Scenario& s) {
    json topo{{"kind", kind_name(s.topology.kind)}};
    switch (s.topology.kind) {
        case TopologySpec::Kind::star: topo["n"] = s.topology.n; break;
        case TopologySpec::Kind::cluster: topo["branches"] = s.topology.branches; break;
        case TopologySpec::Kind::ba:
            topo["n"] = s.topology.n;
            topo["m0"] = s.topology.m0;
            topo["m"] = s.topology.m;
            topo["seed"] = s.topology.seed;
            break;
    }
    json plan{{"epsilon", s.plan.epsilon}, {"c", s.plan.c}};
    if (s.plan.largest) plan["largest"] = s.plan.largest;
    if (s.plan.smallest) plan["smallest"] = s.plan.smallest;
    if (!s.plan.nodes.empty()) plan["nodes"] = s.plan.nodes;
    json out{{"name", s.name},
             {"topology", topo},
             {"plan", plan},
             {"integration",
              {{"h", s.integration.h}, {"T", s.integration.T}, {"tol", s.integration.tol},
               {"init_seed", s.integration.init_seed}}}};
    if (!s.description.empty()) out["description"] = s.description;
    json expected = json::object();
    if (s.expected_cf) expected["cf"] = *s.expected_cf;
    if (s.expected_outcome) expected["outcome"] = to_string(*s.expected_outcome);
    if (!expected.empty()) out["expected"] = expected;
    return out;
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.name = require<std::string>(j, "name", "scenario");
    const std::string where = "scenario '" + s.name + "'";
    s.description = optional_field<std::string>(j, "description", "");

    const auto topo = require<json>(j, "topology", where);
    const auto kind = require<std::string>(topo, "kind", where);
    if (kind == "star") {
        s.topology.kind = TopologySpec::Kind::star;
        s.topology.n = require<std::size_t>(topo, "n", where);
    } else if (kind == "cluster") {
        s.topology.kind = TopologySpec::Kind::cluster;
        s.topology.branches = require<std::vector<std::size_t>>(topo, "branches", where);
    } else if (kind == "ba") {
        s.topology.kind = TopologySpec::Kind::ba;
        s.topology.n = require<std::size_t>(topo, "n", where);
        s.topology.m0 = require<std::size_t>(topo, "m0", where);
        s.topology.m = require<std::size_t>(topo, "m", where);
        s.topology.seed = require<std::uint64_t>(topo, "seed", where);
    } else {
        throw ScenarioDefinitionError(where + ": unknown topology kind '" + kind + "'");
    }

    const auto plan = require<json>(j, "plan", where);
    s.plan.epsilon = require<double>(plan, "epsilon", where);
    s.plan.c = require<double>(plan, "c", where);
    s.plan.largest = optional_field<std::size_t>(plan, "largest", 0);
    s.plan.smallest = optional_field<std::size_t>(plan, "smallest", 0);
    s.plan.nodes = optional_field<std::vector<std::size_t>>(plan, "nodes", {});

    if (j.contains("integration")) {
        const auto& in = j.at("integration");
        s.integration.h = optional_field<double>(in, "h", s.integration.h);
        s.integration.T = optional_field<double>(in, "T", s.integration.T);
        s.integration.tol = optional_field<double>(in, "tol", s.integration.tol);
        s.integration.init_seed = optional_field<std::uint64_t>(in, "init_seed", s.integration.init_seed);
    }
    if (j.contains("expected")) {
        const auto& e = j.at("expected");
        if (e.contains("cf")) s.expected_cf = e.at("cf").get<double>();
        if (e.contains("outcome")) s.expected_outcome = parse_outcome(e.at("outcome").get<std::string>());
    }
    return s;
}

std::vector<Scenario> scenarios_from_json(const json& j) {
    const json* list = &j;
    if (j.is_object() && j.contains("scenarios")) list = &j.at("scenarios");
    std::vector<Scenario> out;
    if (list->is_array()) {
        for (const auto& item : *list) out.push_back(scenario_from_json(item));
    } else if (list->is_object()) {
        out.push_back(scenario_from_json(*list));
    } else {
        throw ScenarioDefinitionError("scenario file must hold an object or an array");
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t k = i + 1; k < out.size(); ++k)
            if (out[i].name == out[k].name)
                throw ScenarioDefinitionError("duplicate scenario name '" + out[i].name + "'");
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioDefinitionError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioDefinitionError(path + ": " + e.what());
    }
}

std::string format_exact(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_sig(double v, int digits) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

static const char* outcome_label(const ReportRow& r) {
    if (r.simulated) return to_string(r.outcome);
    return r.predicted_stable ? "predicted-stable" : "predicted-unstable";
}

void write_report_text(std::ostream& os, const ComparisonReport& report) {
    std::size_t w = 20;
    for (const auto& r : report.rows) w = std::max(w, r.name.size() + 2);
    os << pad("scenario", w, true) << pad("CF", 10) << pad("pins", 6) << pad("c", 6)
       << pad("lambda_max", 14) << pad("c*lambda", 14) << pad("sigma*", 14) << pad("sync_time", 12)
       << pad("E(T)", 14) << "  outcome\n";
    for (const auto& r : report.rows) {
        os << pad(r.name, w, true) << pad(format_exact(r.cf), 10) << pad(std::to_string(r.pinned), 6)
           << pad(format_exact(r.c), 6) << pad(format_sig(r.lambda_max, 6), 14)
           << pad(format_sig(r.c * r.lambda_max, 6), 14) << pad(format_sig(r.sigma_star, 6), 14)
           << pad(opt_sig(r.sync_time, 6), 12) << pad(r.simulated ? format_sig(r.final_error, 6) : "-", 14)
           << "  " << outcome_label(r);
        if (r.divergence_time) os << " at t=" << format_sig(*r.divergence_time, 6);
        os << '\n';
    }
}

void write_report_csv(std::ostream& os, const ComparisonReport& report) {
    os << "name,cf,pinned,c,lambda_max,c_lambda_max,sigma_star,predicted_stable,sync_time,final_error,outcome\n";
    for (const auto& r : report.rows) {
        os << r.name << ',' << format_exact(r.cf) << ',' << r.pinned << ',' << format_exact(r.c) << ','
           << format_sig(r.lambda_max, 12) << ',' << format_sig(r.c * r.lambda_max, 12) << ','
           << format_sig(r.sigma_star, 12) << ',' << (r.predicted_stable ? "true" : "false") << ','
           << (r.sync_time ? format_sig(*r.sync_time, 9) : "") << ','
           << (r.simulated ? format_sig(r.final_error, 9) : "") << ',' << outcome_label(r) << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const std::vector<double>& values) {
    os << "index,eigenvalue\n";
    for (std::size_t i = 0; i < values.size(); ++i) os << i << ',' << format_sig(values[i], 12) << '\n';
}

}  // namespace pinsync
