#pragma once

#include <algorithm>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "mqopt/bitset.hpp"
#include "mqopt/common.hpp"
#include "mqopt/cost_model.hpp"
#include "mqopt/decomposition.hpp"
#include "mqopt/ground_set.hpp"
#include "mqopt/qdag.hpp"
#include "mqopt/set_function.hpp"

namespace mqopt {

/// Per-equivalence-node plan decision: compute via one chosen child
/// operator, or read the node back from its materialization.
struct PlanChoice {
    enum class Kind { Compute, Read };
    struct Entry {
        Kind kind = Kind::Compute;
        std::size_t op = 0;  // meaningful for Compute
    };
    std::vector<Entry> entries;  // by equivalence-node id
};

struct UseCostResult {
    double use_cost = 0.0;
    std::vector<double> node_cost;  // DP value per equivalence node
    PlanChoice choice;
};

struct MaterializationStep {
    std::size_t node = 0;
    double compute_cost = 0.0;
    double write_cost = 0.0;
};

struct CostReport {
    double total = 0.0;
    double use_cost = 0.0;
    double materialization_cost = 0.0;
    UseCostResult use;
    std::vector<MaterializationStep> materialization;
};

namespace detail {

inline std::vector<char> node_id_flags(const QueryDag& dag, const std::vector<std::size_t>& s,
                                       const char* who) {
    std::vector<char> flags(dag.equivalence_nodes().size(), 0);
    for (std::size_t id : s) {
        if (id >= flags.size()) throw ArgumentError(std::string(who) + ": node id out of range");
        if (id == dag.root()) throw ArgumentError(std::string(who) + ": the dummy root cannot be materialized");
        flags[id] = 1;
    }
    return flags;
}

/// One bottom-up pass over the DAG: cheapest way to produce each node
/// when the flagged nodes may also be read back from disk. Reads win
/// cost ties, then lower operator ids; node ids are topological so a
/// single ascending sweep suffices.
inline void run_dp(const QueryDag& dag, const CostModel& model, const std::vector<char>& readable,
                   std::vector<double>& node_cost, PlanChoice* choice) {
    const auto& equivs = dag.equivalence_nodes();
    node_cost.assign(equivs.size(), 0.0);
    if (choice) choice->entries.assign(equivs.size(), {});
    for (const auto& node : equivs) {
        double best = std::numeric_limits<double>::infinity();
        PlanChoice::Entry entry;
        if (readable[node.id]) {
            best = model.materialized_read(dag, node);
            entry = {PlanChoice::Kind::Read, 0};
        }
        for (std::size_t op_id : node.child_ops) {
            const auto& op = dag.op(op_id);
            double c = model.op_cost(dag, op);
            for (std::size_t in : op.inputs) c += node_cost[in];
            if (c < best) {
                best = c;
                entry = {PlanChoice::Kind::Compute, op_id};
            }
        }
        node_cost[node.id] = best;
        if (choice) choice->entries[node.id] = entry;
    }
}

}  // namespace detail

/// bestUseCost: cost of the optimal combined plan when the nodes in S
/// are assumed already materialized (reads priced, construction free).
/// A node in S is read back only where that is the cheaper option.
inline UseCostResult best_use_cost(const QueryDag& dag, const std::vector<std::size_t>& s,
                                   const CostModel& model) {
    const auto readable = detail::node_id_flags(dag, s, "best_use_cost");
    UseCostResult result;
    detail::run_dp(dag, model, readable, result.node_cost, &result.choice);
    result.use_cost = result.node_cost[dag.root()];
    return result;
}

/// c(S): cost of computing and writing out every node of S, processed
/// bottom-up so each node's construction may read the members of S
/// already built. Not additive in general; when S contains a node and
/// one of its ancestors, the ancestor is priced reading the descendant.
inline double materialization_cost(const QueryDag& dag, const std::vector<std::size_t>& s,
                                   const CostModel& model, std::vector<MaterializationStep>* breakdown = nullptr) {
    detail::node_id_flags(dag, s, "materialization_cost");
    std::vector<std::size_t> order(s);
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());

    std::vector<char> readable(dag.equivalence_nodes().size(), 0);
    std::vector<double> node_cost;
    double total = 0.0;
    if (breakdown) breakdown->clear();
    for (std::size_t id : order) {
        detail::run_dp(dag, model, readable, node_cost, nullptr);
        const double compute = node_cost[id];  // id is not yet readable: pure compute cost
        const double write = model.materialize_write(dag, dag.equiv(id));
        total += compute + write;
        if (breakdown) breakdown->push_back({id, compute, write});
        readable[id] = 1;
    }
    return total;
}

/// bestCost: bc(S) = bestUseCost(S) + c(S).
inline CostReport best_cost(const QueryDag& dag, const std::vector<std::size_t>& s, const CostModel& model) {
    CostReport report;
    report.use = best_use_cost(dag, s, model);
    report.use_cost = report.use.use_cost;
    report.materialization_cost = materialization_cost(dag, s, model, &report.materialization);
    report.total = report.use_cost + report.materialization_cost;
    return report;
}

/// Re-prices an extracted plan by walking it from the root, charging
/// every use of a node separately (reads terminate the walk). Agrees
/// with the DP total; used as a consistency check.
inline double plan_cost(const QueryDag& dag, const CostModel& model, const PlanChoice& choice,
                        std::size_t node_id) {
    const auto& entry = choice.entries.at(node_id);
    if (entry.kind == PlanChoice::Kind::Read) return model.materialized_read(dag, dag.equiv(node_id));
    const auto& op = dag.op(entry.op);
    double c = model.op_cost(dag, op);
    for (std::size_t in : op.inputs) c += plan_cost(dag, model, choice, in);
    return c;
}

/// The materialization-benefit oracle mb(S) = bc(empty) - bc(S) over the
/// shareable nodes of a DAG. Element i of the universe is node_ids()[i];
/// labels are the node signatures. bc values are cached across every
/// evaluation path (the baseline is computed once at construction and
/// not counted); bc_calls() reports distinct bc computations since.
class BenefitOracle {
public:
    BenefitOracle(QueryDag dag, CostModel model)
        : state_(std::make_shared<State>(State{std::move(dag), std::move(model), {}, {}, {}, 0.0, 0})) {
        state_->ids = shareable_nodes(state_->dag);
        std::vector<std::string> labels;
        for (std::size_t id : state_->ids) labels.push_back(state_->dag.equiv(id).signature.to_string());
        state_->universe = GroundSet(state_->ids.size(), std::move(labels));
        state_->baseline = best_cost(state_->dag, {}, state_->model).total;
        state_->cache.emplace(SubsetBitset(state_->ids.size()), state_->baseline);
    }

    const GroundSet& universe() const { return state_->universe; }
    const std::vector<std::size_t>& node_ids() const { return state_->ids; }
    const QueryDag& dag() const { return state_->dag; }
    const CostModel& model() const { return state_->model; }
    double baseline() const { return state_->baseline; }
    std::size_t bc_calls() const { return state_->bc_count; }

    std::vector<std::size_t> nodes_of(const SubsetBitset& s) const {
        std::vector<std::size_t> out;
        for (std::size_t i : s.to_ids()) out.push_back(state_->ids[i]);
        return out;
    }

    double best_cost_of(const SubsetBitset& s) const {
        auto it = state_->cache.find(s);
        if (it != state_->cache.end()) return it->second;
        const double v = best_cost(state_->dag, nodes_of(s), state_->model).total;
        state_->cache.emplace(s, v);
        ++state_->bc_count;
        return v;
    }

    /// mb as a memoized set function (normalized by construction).
    SetFunction function() const {
        auto state = state_;
        return SetFunction(state_->ids.size(),
                           [state](const SubsetBitset& s) { return state->baseline - best_cost_of_state(*state, s); });
    }

private:
    struct State {
        QueryDag dag;
        CostModel model;
        std::vector<std::size_t> ids;
        GroundSet universe;
        std::unordered_map<SubsetBitset, double, SubsetBitsetHash> cache;
        double baseline;
        std::size_t bc_count;
    };

    static double best_cost_of_state(State& st, const SubsetBitset& s) {
        auto it = st.cache.find(s);
        if (it != st.cache.end()) return it->second;
        std::vector<std::size_t> nodes;
        for (std::size_t i : s.to_ids()) nodes.push_back(st.ids[i]);
        const double v = best_cost(st.dag, nodes, st.model).total;
        st.cache.emplace(s, v);
        ++st.bc_count;
        return v;
    }

    std::shared_ptr<State> state_;
};

/// How often the benefit of adding one node shrank (or held) as the
/// context grew: the fraction of submodularity triples mb'(x, A) >=
/// mb'(x, B) - tol with A inside B. Diagnostic only; solver behavior
/// never depends on it.
struct SupermodularityReport {
    std::size_t triples_checked = 0;
    std::size_t triples_satisfied = 0;
    double fraction = 1.0;
    bool exhaustive = true;
};

inline SupermodularityReport supermodularity_report(const SetFunction& benefit, std::size_t sample_budget = 2000,
                                                    std::uint64_t seed = 0) {
    const std::size_t n = benefit.universe_size();
    const SetFunction mb = benefit.fresh();
    SupermodularityReport report;
    const auto record = [&report](bool ok) {
        ++report.triples_checked;
        if (ok) ++report.triples_satisfied;
    };
    const auto gain = [&](std::size_t x, const SubsetBitset& s) { return mb(s.with(x)) - mb(s); };

    if (n <= 16) {
        const std::uint64_t full = (std::uint64_t{1} << n) - 1;
        for (std::size_t x = 0; x < n; ++x) {
            const std::uint64_t others = full & ~(std::uint64_t{1} << x);
            for (std::uint64_t b = others;; b = (b - 1) & others) {
                for (std::uint64_t a = b;; a = (a - 1) & b) {
                    if (a != b) {
                        record(gain(x, SubsetBitset::from_mask(n, a)) >=
                               gain(x, SubsetBitset::from_mask(n, b)) - kTol);
                    }
                    if (a == 0) break;
                }
                if (b == 0) break;
            }
        }
    } else {
        report.exhaustive = false;
        std::mt19937_64 rng(seed);
        for (std::size_t t = 0; t < sample_budget; ++t) {
            const std::size_t x = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
            SubsetBitset b(n), a(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (i == x) continue;
                if (rng() & 1) {
                    b.set(i);
                    if (rng() & 1) a.set(i);
                }
            }
            record(gain(x, a) >= gain(x, b) - kTol);
        }
    }
    if (report.triples_checked > 0)
        report.fraction = static_cast<double>(report.triples_satisfied) / static_cast<double>(report.triples_checked);
    return report;
}

inline SupermodularityReport supermodularity_report(const BenefitOracle& oracle, std::size_t sample_budget = 2000,
                                                    std::uint64_t seed = 0) {
    return supermodularity_report(oracle.function(), sample_budget, seed);
}

inline SupermodularityReport supermodularity_report(const QueryDag& dag, const CostModel& model,
                                                    std::size_t sample_budget = 2000, std::uint64_t seed = 0) {
    return supermodularity_report(BenefitOracle(dag, model), sample_budget, seed);
}

}  // namespace mqopt
