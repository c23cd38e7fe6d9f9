#pragma once

#include <algorithm>
#include <limits>
#include <set>
#include <vector>

#include "mqopt/mqopt.hpp"

namespace testsupport {

using namespace mqopt;

/// The worked pair over {a=0, b=1}: f(0)=0, f({a})=3, f({b})=-1,
/// f({a,b})=1. Normalized, submodular, not monotone.
inline SetFunction worked_pair() {
    return SetFunction(2, [](const SubsetBitset& s) {
        const bool a = s.test(0), b = s.test(1);
        if (a && b) return 1.0;
        if (a) return 3.0;
        if (b) return -1.0;
        return 0.0;
    });
}

inline SubsetBitset bits(std::size_t n, std::initializer_list<std::size_t> ids) {
    SubsetBitset s(n);
    for (std::size_t id : ids) s.set(id);
    return s;
}

/// Brute-force reference for the costing DP: plain per-use recursion
/// over every plan tree and read decision, no memoization, no
/// topological bookkeeping.
inline double bf_plan_cost(const QueryDag& dag, const CostModel& model, std::size_t node,
                           const std::set<std::size_t>& readable, bool must_compute) {
    double best = std::numeric_limits<double>::infinity();
    if (!must_compute && readable.count(node)) best = model.materialized_read(dag, dag.equiv(node));
    for (std::size_t op_id : dag.equiv(node).child_ops) {
        const auto& op = dag.op(op_id);
        double c = model.op_cost(dag, op);
        for (std::size_t in : op.inputs) c += bf_plan_cost(dag, model, in, readable, false);
        best = std::min(best, c);
    }
    return best;
}

inline double bf_best_cost(const QueryDag& dag, const std::vector<std::size_t>& s, const CostModel& model) {
    std::vector<std::size_t> order(s);
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    std::set<std::size_t> readable;
    double total = 0.0;
    for (std::size_t id : order) {
        total += bf_plan_cost(dag, model, id, readable, true) + model.materialize_write(dag, dag.equiv(id));
        readable.insert(id);
    }
    total += bf_plan_cost(dag, model, dag.root(), readable, false);
    return total;
}

inline Workload demo_workload() { return parse_workload_text(demo_workload_json()); }

/// All subsets of the ground set's active elements.
inline std::vector<SubsetBitset> all_subsets(const GroundSet& u) {
    const auto& ids = u.elements();
    std::vector<SubsetBitset> out;
    out.reserve(std::size_t{1} << ids.size());
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ids.size()); ++mask) {
        SubsetBitset s(u.universe_size());
        for (std::size_t j = 0; j < ids.size(); ++j)
            if ((mask >> j) & 1) s.set(ids[j]);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace testsupport
