#pragma once

#include <algorithm>
#include <bit>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mqopt/common.hpp"
#include "mqopt/workload.hpp"

namespace mqopt {

/// Canonical key of an equivalence node: the sorted relation-name set
/// plus the sorted set of selections applied to those relations. Order
/// independent and collision free within a workload (it is the exact
/// key, not a hash). The dummy root uses the empty signature.
struct Signature {
    std::vector<std::string> relations;   // sorted, unique
    std::vector<Selection> selections;    // sorted

    friend bool operator==(const Signature& a, const Signature& b) {
        return a.relations == b.relations && a.selections == b.selections;
    }
    friend bool operator<(const Signature& a, const Signature& b) {
        if (a.relations != b.relations) return a.relations < b.relations;
        return a.selections < b.selections;
    }

    bool is_root() const { return relations.empty(); }
    bool is_base_relation() const { return relations.size() == 1 && selections.empty(); }

    std::string to_string() const {
        if (is_root()) return "<root>";
        std::string out;
        for (std::size_t i = 0; i < relations.size(); ++i) {
            if (i) out += ",";
            out += relations[i];
        }
        for (const auto& s : selections) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "|s(%s:%g)", s.relation.c_str(), s.selectivity);
            out += buf;
        }
        return out;
    }
};

inline Signature canonical_signature(std::vector<std::string> relations, std::vector<Selection> selections) {
    std::sort(relations.begin(), relations.end());
    relations.erase(std::unique(relations.begin(), relations.end()), relations.end());
    std::sort(selections.begin(), selections.end());
    selections.erase(std::unique(selections.begin(), selections.end()), selections.end());
    return Signature{std::move(relations), std::move(selections)};
}

enum class OpKind { Scan, Select, Join, DummyRoot };

inline const char* to_string(OpKind k) {
    switch (k) {
        case OpKind::Scan: return "scan";
        case OpKind::Select: return "select";
        case OpKind::Join: return "join";
        case OpKind::DummyRoot: return "dummy-root";
    }
    return "?";
}

/// AND-node: an operator applied to equivalence-node inputs.
struct OperatorNode {
    std::size_t id = 0;
    OpKind kind = OpKind::Scan;
    std::vector<std::size_t> inputs;  // equivalence-node ids, canonically ordered
    std::size_t parent = 0;           // owning equivalence node
    std::string relation;             // scan only: the relation read
};

/// OR-node: the set of expressions producing one result, one per signature.
struct EquivalenceNode {
    std::size_t id = 0;
    Signature signature;
    std::vector<std::size_t> child_ops;
    std::vector<std::size_t> parent_ops;
    double cardinality = 0.0;  // estimated result tuples (0 for the root)
};

/// Combined AND-OR DAG for a batch of queries: alternating equivalence
/// and operator nodes, common subexpressions unified by signature, and a
/// dummy root operator whose inputs are the per-query root nodes. Node
/// ids are topological: every operator's inputs precede its parent.
/// Immutable once built; safe to share across threads read-only.
class QueryDag {
public:
    const std::vector<EquivalenceNode>& equivalence_nodes() const { return equivs_; }
    const std::vector<OperatorNode>& operator_nodes() const { return ops_; }
    const EquivalenceNode& equiv(std::size_t id) const { return equivs_.at(id); }
    const OperatorNode& op(std::size_t id) const { return ops_.at(id); }
    std::size_t root() const { return root_; }
    const std::vector<std::size_t>& query_roots() const { return query_roots_; }
    const Relation& relation(const std::string& name) const {
        auto it = relation_index_.find(name);
        if (it == relation_index_.end()) throw ArgumentError("unknown relation '" + name + "'");
        return relations_[it->second];
    }

    /// Equivalence node of a signature, if present.
    std::optional<std::size_t> find(const Signature& sig) const {
        auto it = node_by_signature_.find(sig);
        if (it == node_by_signature_.end()) return std::nullopt;
        return it->second;
    }

    friend QueryDag build_dag(const Workload& w);

private:
    std::size_t ensure_equiv(const Signature& sig, double cardinality) {
        auto it = node_by_signature_.find(sig);
        if (it != node_by_signature_.end()) return it->second;
        EquivalenceNode node;
        node.id = equivs_.size();
        node.signature = sig;
        node.cardinality = cardinality;
        equivs_.push_back(std::move(node));
        node_by_signature_.emplace(sig, equivs_.back().id);
        return equivs_.back().id;
    }

    std::size_t ensure_op(std::size_t parent, OpKind kind, std::vector<std::size_t> inputs, std::string rel = {}) {
        OpDedupKey key{parent, kind, inputs};
        auto it = op_dedup_.find(key);
        if (it != op_dedup_.end()) return it->second;
        OperatorNode op;
        op.id = ops_.size();
        op.kind = kind;
        op.inputs = std::move(inputs);
        op.parent = parent;
        op.relation = std::move(rel);
        for (std::size_t in : op.inputs) equivs_[in].parent_ops.push_back(op.id);
        equivs_[parent].child_ops.push_back(op.id);
        ops_.push_back(std::move(op));
        op_dedup_.emplace(std::move(key), ops_.back().id);
        return ops_.back().id;
    }

    struct OpDedupKey {
        std::size_t parent;
        OpKind kind;
        std::vector<std::size_t> inputs;
        friend bool operator<(const OpDedupKey& a, const OpDedupKey& b) {
            if (a.parent != b.parent) return a.parent < b.parent;
            if (a.kind != b.kind) return a.kind < b.kind;
            return a.inputs < b.inputs;
        }
    };

    std::vector<EquivalenceNode> equivs_;
    std::vector<OperatorNode> ops_;
    std::size_t root_ = 0;
    std::vector<std::size_t> query_roots_;
    std::vector<Relation> relations_;
    std::map<std::string, std::size_t> relation_index_;
    std::map<Signature, std::size_t> node_by_signature_;
    std::map<OpDedupKey, std::size_t> op_dedup_;
};

namespace detail {

/// Number of distinct relations a single query may span; the expansion
/// enumerates all relation subsets of the query.
inline constexpr std::size_t kMaxRelationsPerQuery = 20;

inline bool mask_connected(std::uint32_t mask, const std::vector<std::uint32_t>& adjacency) {
    if (mask == 0) return false;
    const std::uint32_t start = mask & (~mask + 1);
    std::uint32_t seen = start;
    std::uint32_t frontier = start;
    while (frontier) {
        std::uint32_t next = 0;
        std::uint32_t bits = frontier;
        while (bits) {
            const int v = std::countr_zero(bits);
            bits &= bits - 1;
            next |= adjacency[static_cast<std::size_t>(v)] & mask & ~seen;
        }
        seen |= next;
        frontier = next;
    }
    return seen == mask;
}

}  // namespace detail

/// Expands each query by join associativity over connected relation
/// subsets (commutativity is canonicalized away by ordering join inputs
/// by signature, cross products are never formed), pushes selections
/// down to the base relations, unifies equivalence nodes across the
/// batch by signature, and finally roots the DAG with a dummy operator
/// reading every query's root node.
inline QueryDag build_dag(const Workload& w) {
    validate_workload(w);
    QueryDag dag;
    dag.relations_ = w.relations;
    for (std::size_t i = 0; i < w.relations.size(); ++i) dag.relation_index_.emplace(w.relations[i].name, i);
    const auto predicates = global_predicate_map(w);

    const auto node_cardinality = [&](const Signature& sig) {
        std::vector<std::pair<std::string, double>> rels;
        for (const auto& name : sig.relations) rels.emplace_back(name, dag.relation(name).cardinality);
        std::vector<JoinPredicate> preds;
        for (const auto& [pair, sel] : predicates) preds.push_back({pair.first, pair.second, sel});
        return estimate_cardinality(rels, preds, sig.selections);
    };

    for (const auto& q : w.queries) {
        std::vector<std::string> rels = q.relations;
        std::sort(rels.begin(), rels.end());
        const std::size_t m = rels.size();
        if (m > detail::kMaxRelationsPerQuery)
            throw ValidationError("query spans " + std::to_string(m) + " relations; the expansion guard is " +
                                  std::to_string(detail::kMaxRelationsPerQuery));
        std::map<std::string, std::size_t> local;
        for (std::size_t i = 0; i < m; ++i) local.emplace(rels[i], i);

        std::vector<std::uint32_t> adjacency(m, 0);
        for (const auto& p : q.predicates) {
            const std::size_t a = local[p.left], b = local[p.right];
            adjacency[a] |= std::uint32_t{1} << b;
            adjacency[b] |= std::uint32_t{1} << a;
        }

        const auto subset_signature = [&](std::uint32_t mask) {
            std::vector<std::string> names;
            std::uint32_t bits = mask;
            while (bits) {
                const int v = std::countr_zero(bits);
                bits &= bits - 1;
                names.push_back(rels[static_cast<std::size_t>(v)]);
            }
            std::vector<Selection> sels;
            for (const auto& s : q.selections)
                if ((mask >> local[s.relation]) & 1) sels.push_back(s);
            return canonical_signature(std::move(names), std::move(sels));
        };

        const std::uint32_t full = (m == 32) ? ~std::uint32_t{0} : ((std::uint32_t{1} << m) - 1);
        std::vector<char> connected(std::size_t{full} + 1, 0);
        for (std::uint32_t mask = 1; mask <= full; ++mask)
            connected[mask] = detail::mask_connected(mask, adjacency);

        std::vector<std::uint32_t> masks;
        for (std::uint32_t mask = 1; mask <= full; ++mask)
            if (connected[mask]) masks.push_back(mask);
        std::stable_sort(masks.begin(), masks.end(),
                         [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });

        std::vector<std::size_t> node_of(std::size_t{full} + 1, 0);
        for (std::uint32_t mask : masks) {
            const Signature sig = subset_signature(mask);
            if (std::popcount(mask) == 1) {
                const std::string& rel = sig.relations.front();
                const Signature base = canonical_signature({rel}, {});
                const std::size_t base_id = dag.ensure_equiv(base, node_cardinality(base));
                dag.ensure_op(base_id, OpKind::Scan, {}, rel);
                std::size_t leaf = base_id;
                if (!sig.selections.empty()) {
                    leaf = dag.ensure_equiv(sig, node_cardinality(sig));
                    dag.ensure_op(leaf, OpKind::Select, {base_id});
                }
                node_of[mask] = leaf;
                continue;
            }
            const std::size_t parent = dag.ensure_equiv(sig, node_cardinality(sig));
            // Every unordered split of the mask into two connected halves is
            // one join alternative; any cut of a connected graph is joinable.
            const std::uint32_t low = mask & (~mask + 1);
            for (std::uint32_t sub = (mask - 1) & mask; sub; sub = (sub - 1) & mask) {
                if (!(sub & low)) continue;  // visit each split once
                const std::uint32_t rest = mask ^ sub;
                if (!connected[sub] || !connected[rest]) continue;
                std::size_t a = node_of[sub], b = node_of[rest];
                if (dag.equiv(b).signature < dag.equiv(a).signature) std::swap(a, b);
                dag.ensure_op(parent, OpKind::Join, {a, b});
            }
            node_of[mask] = parent;
        }
        dag.query_roots_.push_back(node_of[full]);
    }

    dag.root_ = dag.ensure_equiv(Signature{}, 0.0);
    dag.ensure_op(dag.root_, OpKind::DummyRoot, dag.query_roots_);
    return dag;
}

/// Materialization candidates: equivalence nodes consumed in at least
/// two places, counting each operator-input reference (the dummy root
/// lists a repeated query once per submission). Base relations are
/// excluded; they are already stored. Returned ascending by id.
inline std::vector<std::size_t> shareable_nodes(const QueryDag& dag) {
    std::vector<std::size_t> refs(dag.equivalence_nodes().size(), 0);
    for (const auto& op : dag.operator_nodes())
        for (std::size_t in : op.inputs) ++refs[in];
    std::vector<std::size_t> out;
    for (const auto& node : dag.equivalence_nodes()) {
        if (node.signature.is_root() || node.signature.is_base_relation()) continue;
        if (refs[node.id] >= 2) out.push_back(node.id);
    }
    return out;
}

/// Graphviz rendering for debugging: boxes are equivalence nodes,
/// ellipses operator nodes.
inline std::string to_dot(const QueryDag& dag) {
    std::string out = "digraph qdag {\n  rankdir=BT;\n";
    for (const auto& node : dag.equivalence_nodes())
        out += "  e" + std::to_string(node.id) + " [shape=box,label=\"" + node.signature.to_string() + "\"];\n";
    for (const auto& op : dag.operator_nodes()) {
        std::string label = to_string(op.kind);
        if (op.kind == OpKind::Scan) label += " " + op.relation;
        out += "  o" + std::to_string(op.id) + " [shape=ellipse,label=\"" + label + "\"];\n";
        out += "  o" + std::to_string(op.id) + " -> e" + std::to_string(op.parent) + ";\n";
        for (std::size_t in : op.inputs) out += "  e" + std::to_string(in) + " -> o" + std::to_string(op.id) + ";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace mqopt
