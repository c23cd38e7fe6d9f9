#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mqopt/common.hpp"
#include "mqopt/costing.hpp"
#include "mqopt/instances.hpp"
#include "mqopt/solvers.hpp"
#include "mqopt/workload.hpp"

namespace mqopt {

using json = nlohmann::json;

namespace detail {

inline const json& field(const json& j, const char* name, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path + ": expected an object");
    auto it = j.find(name);
    if (it == j.end()) throw ValidationError(path + "." + name + ": missing");
    return *it;
}

inline const json* opt_field(const json& j, const char* name) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(name);
    return it == j.end() ? nullptr : &*it;
}

inline double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path + ": expected a number");
    return j.get<double>();
}

inline std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw ValidationError(path + ": expected a string");
    return j.get<std::string>();
}

inline const json& array_at(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path + ": expected an array");
    return j;
}

inline void parse_cost_map(const json& j, const std::string& path, std::map<std::string, double>& out,
                           std::optional<double>& dflt) {
    if (j.is_number()) {  // shorthand: a bare number is the flat default
        dflt = j.get<double>();
        return;
    }
    if (!j.is_object()) throw ValidationError(path + ": expected a number or an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const double v = number_at(it.value(), path + "." + it.key());
        if (it.key() == "default")
            dflt = v;
        else
            out[it.key()] = v;
    }
}

}  // namespace detail

inline CostModelSpec parse_cost_model(const json& j, const std::string& path = "cost_model") {
    CostModelSpec spec;
    const std::string mode = detail::string_at(detail::field(j, "mode", path), path + ".mode");
    if (mode == "fixture") {
        spec.mode = CostModelMode::Fixture;
        auto& fx = spec.fixture;
        if (auto* p = detail::opt_field(j, "scan")) detail::parse_cost_map(*p, path + ".scan", fx.scan, fx.scan_default);
        if (auto* p = detail::opt_field(j, "join")) detail::parse_cost_map(*p, path + ".join", fx.join, fx.join_default);
        if (auto* p = detail::opt_field(j, "select"))
            detail::parse_cost_map(*p, path + ".select", fx.select, fx.select_default);
        if (auto* p = detail::opt_field(j, "materialize_write"))
            detail::parse_cost_map(*p, path + ".materialize_write", fx.materialize_write, fx.write_default);
        if (auto* p = detail::opt_field(j, "materialized_read"))
            detail::parse_cost_map(*p, path + ".materialized_read", fx.materialized_read, fx.read_default);
    } else if (mode == "analytical") {
        spec.mode = CostModelMode::Analytical;
        auto& an = spec.analytical;
        const auto num = [&](const char* name, double& target) {
            if (auto* p = detail::opt_field(j, name)) target = detail::number_at(*p, path + "." + name);
        };
        num("read_cost_per_block", an.read_cost_per_block);
        num("write_cost_per_block", an.write_cost_per_block);
        num("seek_cost", an.seek_cost);
        num("cpu_cost_per_block", an.cpu_cost_per_block);
        num("block_size_bytes", an.block_size_bytes);
        num("tuple_width_bytes", an.tuple_width_bytes);
        if (auto* p = detail::opt_field(j, "block_size_tuples"))
            an.block_size_tuples = detail::number_at(*p, path + ".block_size_tuples");
    } else {
        throw ValidationError(path + ".mode: expected 'fixture' or 'analytical'");
    }
    return spec;
}

inline json cost_model_to_json(const CostModelSpec& spec) {
    json j;
    if (spec.mode == CostModelMode::Fixture) {
        j["mode"] = "fixture";
        const auto emit = [&j](const char* name, const std::map<std::string, double>& m,
                               const std::optional<double>& dflt) {
            if (m.empty() && !dflt) return;
            json entry = json::object();
            if (dflt) entry["default"] = *dflt;
            for (const auto& [k, v] : m) entry[k] = v;
            j[name] = entry;
        };
        emit("scan", spec.fixture.scan, spec.fixture.scan_default);
        emit("join", spec.fixture.join, spec.fixture.join_default);
        emit("select", spec.fixture.select, spec.fixture.select_default);
        emit("materialize_write", spec.fixture.materialize_write, spec.fixture.write_default);
        emit("materialized_read", spec.fixture.materialized_read, spec.fixture.read_default);
    } else {
        j["mode"] = "analytical";
        const auto& an = spec.analytical;
        j["read_cost_per_block"] = an.read_cost_per_block;
        j["write_cost_per_block"] = an.write_cost_per_block;
        j["seek_cost"] = an.seek_cost;
        j["cpu_cost_per_block"] = an.cpu_cost_per_block;
        j["block_size_bytes"] = an.block_size_bytes;
        j["tuple_width_bytes"] = an.tuple_width_bytes;
        if (an.block_size_tuples) j["block_size_tuples"] = *an.block_size_tuples;
    }
    return j;
}

inline Workload parse_workload_json(const json& j) {
    Workload w;
    const auto& rels = detail::array_at(detail::field(j, "relations", "workload"), "relations");
    for (std::size_t i = 0; i < rels.size(); ++i) {
        const std::string path = "relations[" + std::to_string(i) + "]";
        const auto& rj = rels[i];
        Relation r;
        r.name = detail::string_at(detail::field(rj, "name", path), path + ".name");
        r.cardinality = detail::number_at(detail::field(rj, "cardinality", path), path + ".cardinality");
        if (auto* p = detail::opt_field(rj, "scan_cost")) r.explicit_scan_cost = detail::number_at(*p, path + ".scan_cost");
        w.relations.push_back(std::move(r));
    }
    const auto& queries = detail::array_at(detail::field(j, "queries", "workload"), "queries");
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const std::string qpath = "queries[" + std::to_string(qi) + "]";
        const auto& qj = queries[qi];
        Query q;
        const auto& qrels = detail::array_at(detail::field(qj, "relations", qpath), qpath + ".relations");
        for (std::size_t ri = 0; ri < qrels.size(); ++ri)
            q.relations.push_back(detail::string_at(qrels[ri], qpath + ".relations[" + std::to_string(ri) + "]"));
        if (auto* preds = detail::opt_field(qj, "predicates")) {
            detail::array_at(*preds, qpath + ".predicates");
            for (std::size_t pi = 0; pi < preds->size(); ++pi) {
                const std::string ppath = qpath + ".predicates[" + std::to_string(pi) + "]";
                const auto& pj = (*preds)[pi];
                if (!pj.is_array() || pj.size() != 3)
                    throw ValidationError(ppath + ": expected [left, right, selectivity]");
                q.predicates.push_back({detail::string_at(pj[0], ppath + "[0]"),
                                        detail::string_at(pj[1], ppath + "[1]"),
                                        detail::number_at(pj[2], ppath + "[2]")});
            }
        }
        if (auto* sels = detail::opt_field(qj, "selections")) {
            detail::array_at(*sels, qpath + ".selections");
            for (std::size_t si = 0; si < sels->size(); ++si) {
                const std::string spath = qpath + ".selections[" + std::to_string(si) + "]";
                const auto& sj = (*sels)[si];
                if (!sj.is_array() || sj.size() != 2)
                    throw ValidationError(spath + ": expected [relation, selectivity]");
                q.selections.push_back(
                    {detail::string_at(sj[0], spath + "[0]"), detail::number_at(sj[1], spath + "[1]")});
            }
        }
        w.queries.push_back(std::move(q));
    }
    w.cost_model = parse_cost_model(detail::field(j, "cost_model", "workload"));
    if (auto* p = detail::opt_field(j, "seed")) w.seed = p->get<std::uint64_t>();
    validate_workload(w);
    return w;
}

inline Workload parse_workload_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("workload is not valid JSON: ") + e.what());
    }
    return parse_workload_json(j);
}

inline Workload load_workload_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open workload file '" + file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_workload_text(ss.str());
}

inline json workload_to_json(const Workload& w) {
    json j;
    j["relations"] = json::array();
    for (const auto& r : w.relations) {
        json rj{{"name", r.name}, {"cardinality", r.cardinality}};
        if (r.explicit_scan_cost) rj["scan_cost"] = *r.explicit_scan_cost;
        j["relations"].push_back(rj);
    }
    j["queries"] = json::array();
    for (const auto& q : w.queries) {
        json qj;
        qj["relations"] = q.relations;
        qj["predicates"] = json::array();
        for (const auto& p : q.predicates) qj["predicates"].push_back(json::array({p.left, p.right, p.selectivity}));
        if (!q.selections.empty()) {
            qj["selections"] = json::array();
            for (const auto& s : q.selections) qj["selections"].push_back(json::array({s.relation, s.selectivity}));
        }
        j["queries"].push_back(qj);
    }
    j["cost_model"] = cost_model_to_json(w.cost_model);
    j["seed"] = w.seed;
    return j;
}

inline json coverage_instance_to_json(const CoverageInstance& inst) {
    json j;
    j["n_elements"] = inst.n_elements;
    j["l"] = inst.budget_l;
    j["gamma"] = inst.gamma;
    j["sets"] = inst.sets;
    return j;
}

inline CoverageInstance parse_coverage_instance_json(const json& j) {
    CoverageInstance inst;
    inst.n_elements = static_cast<std::size_t>(detail::number_at(detail::field(j, "n_elements", "instance"), "n_elements"));
    inst.budget_l = static_cast<std::size_t>(detail::number_at(detail::field(j, "l", "instance"), "l"));
    inst.gamma = detail::number_at(detail::field(j, "gamma", "instance"), "gamma");
    const auto& sets = detail::array_at(detail::field(j, "sets", "instance"), "sets");
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto& sj = detail::array_at(sets[i], "sets[" + std::to_string(i) + "]");
        std::vector<std::size_t> ids;
        for (const auto& e : sj) ids.push_back(e.get<std::size_t>());
        inst.sets.push_back(std::move(ids));
    }
    return inst;
}

/// Infinite ratios (zero-cost picks) serialize as the string "inf";
/// everything else is a plain JSON number.
inline json ratio_to_json(double ratio) {
    if (std::isinf(ratio)) return ratio > 0 ? "inf" : "-inf";
    return ratio;
}

inline const char* to_string(Phase p) {
    return p == Phase::MainLoop ? "main-loop" : "negative-cost-sweep";
}

/// Schema: { total, use_cost, materialization_cost,
///           nodes: [{node, signature, cost, choice, op?}],
///           materialization: [{node, signature, compute_cost, write_cost}] }
inline json cost_report_to_json(const CostReport& r, const QueryDag& dag) {
    json j;
    j["total"] = r.total;
    j["use_cost"] = r.use_cost;
    j["materialization_cost"] = r.materialization_cost;
    json nodes = json::array();
    for (const auto& node : dag.equivalence_nodes()) {
        const auto& entry = r.use.choice.entries[node.id];
        json nj{{"node", node.id},
                {"signature", node.signature.to_string()},
                {"cost", r.use.node_cost[node.id]},
                {"choice", entry.kind == PlanChoice::Kind::Read ? "read" : "compute"}};
        if (entry.kind == PlanChoice::Kind::Compute) nj["op"] = entry.op;
        nodes.push_back(std::move(nj));
    }
    j["nodes"] = nodes;
    json mat = json::array();
    for (const auto& step : r.materialization)
        mat.push_back({{"node", step.node},
                       {"signature", dag.equiv(step.node).signature.to_string()},
                       {"compute_cost", step.compute_cost},
                       {"write_cost", step.write_cost}});
    j["materialization"] = mat;
    return j;
}

/// Schema: { chosen: [ids], labels: [..], objective, oracle_calls,
///           trace: [{element, label, ratio, f_value_after,
///                    f_m_value_after, phase}] }
inline json solver_result_to_json(const SolverResult& r, const GroundSet& universe, bool include_trace = true) {
    json j;
    j["chosen"] = r.chosen.to_ids();
    json labels = json::array();
    for (std::size_t id : r.chosen.to_ids()) labels.push_back(universe.label(id));
    j["labels"] = labels;
    j["objective"] = r.objective;
    j["oracle_calls"] = r.oracle_calls;
    if (include_trace) {
        json trace = json::array();
        for (const auto& rec : r.trace) {
            trace.push_back({{"element", rec.element},
                             {"label", universe.label(rec.element)},
                             {"ratio", ratio_to_json(rec.ratio)},
                             {"f_value_after", rec.f_value_after},
                             {"f_m_value_after", rec.f_m_value_after},
                             {"phase", to_string(rec.phase)}});
        }
        j["trace"] = trace;
    }
    return j;
}

}  // namespace mqopt
