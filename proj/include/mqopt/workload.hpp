#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mqopt/common.hpp"

namespace mqopt {

struct Relation {
    std::string name;
    double cardinality = 0.0;  // tuples
    std::optional<double> explicit_scan_cost;
};

struct JoinPredicate {
    std::string left;
    std::string right;
    double selectivity = 1.0;  // in (0, 1]
};

struct Selection {
    std::string relation;
    double selectivity = 1.0;  // in (0, 1]

    friend bool operator<(const Selection& a, const Selection& b) {
        if (a.relation != b.relation) return a.relation < b.relation;
        return a.selectivity < b.selectivity;
    }
    friend bool operator==(const Selection& a, const Selection& b) {
        return a.relation == b.relation && a.selectivity == b.selectivity;
    }
};

struct Query {
    std::vector<std::string> relations;
    std::vector<JoinPredicate> predicates;
    std::vector<Selection> selections;
};

enum class CostModelMode { Fixture, Analytical };

/// Explicit unit costs. Each category resolves per-key first, then falls
/// back to the flat default; a node with neither is a MissingCostError.
/// Scan costs are keyed by relation name, the other categories by the
/// canonical signature string of the equivalence node (join costs are
/// flat per node, whichever split is used).
struct FixtureCosts {
    std::map<std::string, double> scan;
    std::optional<double> scan_default;
    std::map<std::string, double> join;
    std::optional<double> join_default;
    std::map<std::string, double> select;
    std::optional<double> select_default = 0.0;
    std::map<std::string, double> materialize_write;
    std::optional<double> write_default;
    std::map<std::string, double> materialized_read;
    std::optional<double> read_default;
};

/// Per-block cost constants. Defaults: 4KB blocks, read 2, write 4,
/// seek 10, cpu 0.2 (msec). Result sizes come from estimated
/// cardinalities; tuples per block may be given directly or derived
/// from block and tuple widths.
struct AnalyticalParams {
    double read_cost_per_block = 2.0;
    double write_cost_per_block = 4.0;
    double seek_cost = 10.0;
    double cpu_cost_per_block = 0.2;
    double block_size_bytes = 4096.0;
    double tuple_width_bytes = 100.0;
    std::optional<double> block_size_tuples;

    double tuples_per_block() const {
        if (block_size_tuples) return *block_size_tuples;
        return std::max(1.0, block_size_bytes / tuple_width_bytes);
    }
};

struct CostModelSpec {
    CostModelMode mode = CostModelMode::Analytical;
    FixtureCosts fixture;
    AnalyticalParams analytical;
};

/// A batch of join queries plus the cost model used to price their plans.
struct Workload {
    std::vector<Relation> relations;
    std::vector<Query> queries;
    CostModelSpec cost_model;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_selectivity(double s, const std::string& where) {
    if (!(s > 0.0) || s > 1.0) throw ValidationError(where + ": selectivity must be in (0, 1]");
}

}  // namespace detail

/// Checks structural invariants: unique relation names, known relations in
/// queries, connected join graphs, sane selectivities, consistent
/// predicate selectivities across queries, non-negative costs. Throws
/// ValidationError naming the offending path.
inline void validate_workload(const Workload& w) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < w.relations.size(); ++i) {
        const auto& r = w.relations[i];
        const std::string where = "relations[" + std::to_string(i) + "]";
        if (r.name.empty()) throw ValidationError(where + ".name: empty relation name");
        if (!names.insert(r.name).second) throw ValidationError(where + ".name: duplicate relation '" + r.name + "'");
        if (!(r.cardinality > 0.0)) throw ValidationError(where + ".cardinality: must be positive");
        if (r.explicit_scan_cost && *r.explicit_scan_cost < 0.0)
            throw ValidationError(where + ".scan_cost: must be non-negative");
    }
    if (w.queries.empty()) throw ValidationError("queries: workload has no queries");

    std::map<std::pair<std::string, std::string>, double> global_predicates;
    for (std::size_t qi = 0; qi < w.queries.size(); ++qi) {
        const auto& q = w.queries[qi];
        const std::string qwhere = "queries[" + std::to_string(qi) + "]";
        if (q.relations.empty()) throw ValidationError(qwhere + ".relations: query over no relations");
        std::set<std::string> qrels;
        for (const auto& r : q.relations) {
            if (!names.count(r)) throw ValidationError(qwhere + ".relations: unknown relation '" + r + "'");
            if (!qrels.insert(r).second) throw ValidationError(qwhere + ".relations: duplicate relation '" + r + "'");
        }
        for (std::size_t pi = 0; pi < q.predicates.size(); ++pi) {
            const auto& p = q.predicates[pi];
            const std::string pwhere = qwhere + ".predicates[" + std::to_string(pi) + "]";
            if (!qrels.count(p.left) || !qrels.count(p.right))
                throw ValidationError(pwhere + ": endpoint not among the query's relations");
            if (p.left == p.right) throw ValidationError(pwhere + ": self-join predicate");
            detail::check_selectivity(p.selectivity, pwhere);
            auto key = std::minmax(p.left, p.right);
            auto [it, inserted] = global_predicates.emplace(key, p.selectivity);
            if (!inserted && it->second != p.selectivity)
                throw ValidationError(pwhere + ": predicate " + key.first + "-" + key.second +
                                      " has conflicting selectivities across the batch; signatures identify "
                                      "results by relation set, so shared pairs must agree");
        }
        for (std::size_t si = 0; si < q.selections.size(); ++si) {
            const auto& s = q.selections[si];
            const std::string swhere = qwhere + ".selections[" + std::to_string(si) + "]";
            if (!qrels.count(s.relation)) throw ValidationError(swhere + ": selection on relation not in the query");
            detail::check_selectivity(s.selectivity, swhere);
        }
        // Connectivity of the query's join graph.
        if (q.relations.size() > 1) {
            std::map<std::string, std::size_t> idx;
            for (const auto& r : q.relations) idx.emplace(r, idx.size());
            std::vector<std::vector<std::size_t>> adj(q.relations.size());
            for (const auto& p : q.predicates) {
                adj[idx[p.left]].push_back(idx[p.right]);
                adj[idx[p.right]].push_back(idx[p.left]);
            }
            std::vector<char> seen(q.relations.size(), 0);
            std::vector<std::size_t> stack{0};
            seen[0] = 1;
            std::size_t reached = 1;
            while (!stack.empty()) {
                const std::size_t v = stack.back();
                stack.pop_back();
                for (std::size_t nb : adj[v])
                    if (!seen[nb]) {
                        seen[nb] = 1;
                        ++reached;
                        stack.push_back(nb);
                    }
            }
            if (reached != q.relations.size())
                throw ValidationError(qwhere + ".predicates: join graph is disconnected");
        }
    }

    const auto check_cost_map = [](const std::map<std::string, double>& m, std::optional<double> dflt,
                                   const std::string& where) {
        if (dflt && *dflt < 0.0) throw ValidationError(where + ".default: must be non-negative");
        for (const auto& [key, v] : m)
            if (v < 0.0) throw ValidationError(where + "." + key + ": must be non-negative");
    };
    const auto& fx = w.cost_model.fixture;
    check_cost_map(fx.scan, fx.scan_default, "cost_model.scan");
    check_cost_map(fx.join, fx.join_default, "cost_model.join");
    check_cost_map(fx.select, fx.select_default, "cost_model.select");
    check_cost_map(fx.materialize_write, fx.write_default, "cost_model.materialize_write");
    check_cost_map(fx.materialized_read, fx.read_default, "cost_model.materialized_read");
    const auto& an = w.cost_model.analytical;
    if (an.read_cost_per_block < 0 || an.write_cost_per_block < 0 || an.seek_cost < 0 || an.cpu_cost_per_block < 0)
        throw ValidationError("cost_model: per-block costs must be non-negative");
    if (!(an.tuples_per_block() > 0)) throw ValidationError("cost_model: tuples per block must be positive");
}

/// Selectivities of all distinct join predicates in the batch, keyed by
/// the unordered relation pair. validate_workload guarantees agreement.
inline std::map<std::pair<std::string, std::string>, double> global_predicate_map(const Workload& w) {
    std::map<std::pair<std::string, std::string>, double> preds;
    for (const auto& q : w.queries)
        for (const auto& p : q.predicates) preds.emplace(std::minmax(p.left, p.right), p.selectivity);
    return preds;
}

/// Product-rule cardinality estimate under attribute independence:
/// product of base cardinalities, times the selectivity of every
/// predicate with both endpoints present, times every selection.
inline double estimate_cardinality(const std::vector<std::pair<std::string, double>>& relations,
                                   const std::vector<JoinPredicate>& predicates,
                                   const std::vector<Selection>& selections) {
    std::set<std::string> present;
    double est = 1.0;
    for (const auto& [name, card] : relations) {
        present.insert(name);
        est *= card;
    }
    for (const auto& p : predicates)
        if (present.count(p.left) && present.count(p.right)) est *= p.selectivity;
    for (const auto& s : selections)
        if (present.count(s.relation)) est *= s.selectivity;
    return est;
}

}  // namespace mqopt
