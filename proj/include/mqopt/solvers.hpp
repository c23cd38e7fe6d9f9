#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "mqopt/bitset.hpp"
#include "mqopt/common.hpp"
#include "mqopt/decomposition.hpp"
#include "mqopt/ground_set.hpp"
#include "mqopt/set_function.hpp"

namespace mqopt {

enum class Phase { MainLoop, NegativeCostSweep };

/// One accepted pick. For ratio solvers, ratio is the gain-to-cost ratio
/// r(x, X) at acceptance (+inf for zero-cost elements) and the two value
/// fields hold f and f_m after the pick. The cost-descent solver
/// (roy_greedy) stores the achieved cost decrease in ratio, the new cost
/// in f_value_after, and 0 in f_m_value_after.
struct IterationRecord {
    std::size_t element = 0;
    double ratio = 0.0;
    double f_value_after = 0.0;
    double f_m_value_after = 0.0;
    Phase phase = Phase::MainLoop;

    friend bool operator==(const IterationRecord& a, const IterationRecord& b) {
        return a.element == b.element && a.ratio == b.ratio && a.f_value_after == b.f_value_after &&
               a.f_m_value_after == b.f_m_value_after && a.phase == b.phase;
    }
};

struct SolverResult {
    SubsetBitset chosen;
    double objective = 0.0;
    std::vector<IterationRecord> trace;
    std::size_t oracle_calls = 0;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pruning margin: an element is dropped only when its ratio is clearly
/// below 1, so rounding noise in later marginal gains cannot let a
/// dropped element clear the strict ratio > 1 acceptance test.
constexpr double kPruneMargin = kTol;

inline double ratio_of(double gain, double cost) {
    if (cost > 0.0) return gain / cost;
    // Zero-cost elements: positive gain is a free improvement (+inf ratio),
    // otherwise the element is never worth taking.
    return gain > 0.0 ? kInf : -kInf;
}

inline bool better(double ratio, std::size_t id, double best_ratio, std::size_t best_id) {
    if (ratio != best_ratio) return ratio > best_ratio;
    return id < best_id;
}

/// Appends the remaining negative-cost elements in ascending id order,
/// stopping at the cardinality cap. With a monotone f_m every such
/// element raises f and all of them are taken; when a non-monotone f_m
/// slips in (a benefit oracle whose cost function is not supermodular)
/// an element whose gain is outweighed by its negative cost is skipped,
/// so the sweep never pushes f below the main loop's result.
inline void negative_cost_sweep(const Decomposition& d, const std::vector<std::size_t>& negatives,
                                const SetFunction& f_m, std::optional<std::size_t> k, SubsetBitset& x,
                                double& fm_x, std::vector<IterationRecord>& trace) {
    const auto& cost = d.cost_weights();
    for (std::size_t e : negatives) {
        if (k && x.count() >= *k) break;
        const double gain = f_m(x.with(e)) - fm_x;
        if (gain - cost[e] < 0.0) continue;
        IterationRecord rec;
        rec.element = e;
        rec.ratio = gain / cost[e];
        rec.phase = Phase::NegativeCostSweep;
        x.set(e);
        fm_x = f_m(x);
        rec.f_m_value_after = fm_x;
        rec.f_value_after = fm_x - d.cost(x);
        trace.push_back(rec);
    }
}

inline void split_candidates(const Decomposition& d, const GroundSet& u, std::vector<std::size_t>& main_loop,
                             std::vector<std::size_t>& negatives) {
    const auto& cost = d.cost_weights();
    for (std::size_t e : u.elements()) {
        if (cost[e] < 0.0)
            negatives.push_back(e);
        else
            main_loop.push_back(e);
    }
}

}  // namespace detail

/// Ratio greedy for maximizing f = f_m - c. While some element has
/// marginal-gain-to-cost ratio strictly above 1, takes the max-ratio
/// element (ties to the smallest id); afterwards sweeps in all elements
/// with negative cost. k caps the total number of picks. With prune set,
/// elements whose ratio has fallen to 1 or below leave the candidate set
/// for good, which cannot change the result while f_m is submodular.
inline SolverResult marginal_greedy(const Decomposition& d, const GroundSet& u,
                                    std::optional<std::size_t> k = std::nullopt, bool prune = false) {
    if (d.universe_size() != u.universe_size())
        throw ArgumentError("marginal_greedy: decomposition and ground set widths differ");
    if (k && *k > u.size()) throw ArgumentError("marginal_greedy: cardinality cap exceeds the universe");

    const SetFunction f_m = d.monotone_part().fresh();
    const auto& cost = d.cost_weights();

    std::vector<std::size_t> candidates, negatives;
    detail::split_candidates(d, u, candidates, negatives);

    SolverResult result;
    SubsetBitset x(u.universe_size());
    double fm_x = f_m(x);

    while (!candidates.empty() && (!k || x.count() < *k)) {
        double best_ratio = -detail::kInf;
        std::size_t best_id = 0;
        bool have_best = false;
        std::vector<std::size_t> kept;
        kept.reserve(candidates.size());
        for (std::size_t e : candidates) {
            const double gain = f_m(x.with(e)) - fm_x;
            const double ratio = detail::ratio_of(gain, cost[e]);
            if (!prune || ratio >= 1.0 - detail::kPruneMargin) kept.push_back(e);
            if (!have_best || detail::better(ratio, e, best_ratio, best_id)) {
                best_ratio = ratio;
                best_id = e;
                have_best = true;
            }
        }
        candidates.swap(kept);
        if (!have_best || !(best_ratio > 1.0)) break;

        x.set(best_id);
        fm_x = f_m(x);
        IterationRecord rec;
        rec.element = best_id;
        rec.ratio = best_ratio;
        rec.f_m_value_after = fm_x;
        rec.f_value_after = fm_x - d.cost(x);
        rec.phase = Phase::MainLoop;
        result.trace.push_back(rec);
        candidates.erase(std::remove(candidates.begin(), candidates.end(), best_id), candidates.end());
    }

    detail::negative_cost_sweep(d, negatives, f_m, k, x, fm_x, result.trace);

    result.chosen = x;
    result.objective = f_m(x) - d.cost(x);
    result.oracle_calls = f_m.call_count();
    return result;
}

/// Same picks as marginal_greedy, usually with fewer oracle calls.
/// Keeps a stale upper bound on each element's ratio in a max-priority
/// queue; bounds are valid because marginal gains of a submodular f_m
/// only shrink as the chosen set grows. An entry popped with a bound
/// already recomputed against the current chosen set is exactly the
/// element the eager scan would take, including the smallest-id
/// tie-break (the queue orders equal bounds by id).
inline SolverResult lazy_marginal_greedy(const Decomposition& d, const GroundSet& u,
                                         std::optional<std::size_t> k = std::nullopt, bool prune = false) {
    if (d.universe_size() != u.universe_size())
        throw ArgumentError("lazy_marginal_greedy: decomposition and ground set widths differ");
    if (k && *k > u.size()) throw ArgumentError("lazy_marginal_greedy: cardinality cap exceeds the universe");

    const SetFunction f_m = d.monotone_part().fresh();
    const auto& cost = d.cost_weights();

    std::vector<std::size_t> main_loop, negatives;
    detail::split_candidates(d, u, main_loop, negatives);

    struct Entry {
        double bound;
        std::size_t id;
    };
    struct EntryOrder {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.bound != b.bound) return a.bound < b.bound;  // max-heap by bound
            return a.id > b.id;                                // then min id on top
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, EntryOrder> heap;
    std::vector<double> bound(u.universe_size(), detail::kInf);
    std::vector<std::size_t> stamp(u.universe_size(), 0);
    std::vector<char> live(u.universe_size(), 0);
    for (std::size_t e : main_loop) {
        heap.push({detail::kInf, e});
        live[e] = 1;
    }

    SolverResult result;
    SubsetBitset x(u.universe_size());
    double fm_x = f_m(x);
    std::size_t round = 0;

    while (!heap.empty() && (!k || x.count() < *k)) {
        ++round;
        bool accepted = false;
        while (!heap.empty()) {
            const Entry top = heap.top();
            heap.pop();
            if (!live[top.id] || top.bound != bound[top.id]) continue;  // superseded entry
            if (stamp[top.id] == round) {
                // Bound is exact for the current chosen set: confirmed max.
                if (top.bound > 1.0) {
                    x.set(top.id);
                    fm_x = f_m(x);
                    IterationRecord rec;
                    rec.element = top.id;
                    rec.ratio = top.bound;
                    rec.f_m_value_after = fm_x;
                    rec.f_value_after = fm_x - d.cost(x);
                    rec.phase = Phase::MainLoop;
                    result.trace.push_back(rec);
                    live[top.id] = 0;
                    accepted = true;
                }
                break;
            }
            const double gain = f_m(x.with(top.id)) - fm_x;
            const double ratio = detail::ratio_of(gain, cost[top.id]);
            bound[top.id] = ratio;
            stamp[top.id] = round;
            if (prune && ratio < 1.0 - detail::kPruneMargin) {
                live[top.id] = 0;
            } else {
                heap.push({ratio, top.id});
            }
        }
        if (!accepted) break;
    }

    detail::negative_cost_sweep(d, negatives, f_m, k, x, fm_x, result.trace);

    result.chosen = x;
    result.objective = f_m(x) - d.cost(x);
    result.oracle_calls = f_m.call_count();
    return result;
}

/// Cost-descent greedy: repeatedly add the element whose inclusion
/// minimizes the cost oracle, while that strictly lowers it. The
/// objective field holds the final cost bc(chosen).
inline SolverResult roy_greedy(const SetFunction& bc, const GroundSet& u) {
    if (bc.universe_size() != u.universe_size())
        throw ArgumentError("roy_greedy: oracle and ground set widths differ");
    const SetFunction f = bc.fresh();

    SolverResult result;
    SubsetBitset x(u.universe_size());
    double bc_x = f(x);
    std::vector<std::size_t> remaining(u.elements());

    while (!remaining.empty()) {
        double best_val = detail::kInf;
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            const double v = f(x.with(remaining[i]));
            if (v < best_val) {  // strict: ties stay with the smallest id
                best_val = v;
                best_idx = i;
            }
        }
        if (!(bc_x > best_val)) break;
        const std::size_t e = remaining[best_idx];
        IterationRecord rec;
        rec.element = e;
        rec.ratio = bc_x - best_val;
        rec.f_value_after = best_val;
        rec.f_m_value_after = 0.0;
        rec.phase = Phase::MainLoop;
        result.trace.push_back(rec);
        x.set(e);
        bc_x = best_val;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_idx));
    }

    result.chosen = x;
    result.objective = bc_x;
    result.oracle_calls = f.call_count();
    return result;
}

/// Brute-force argmax of f over all subsets of U. Ties go to the
/// lexicographically smallest bitset (the first maximum in ascending
/// mask order, bit j of the mask being U.elements()[j]).
inline SolverResult exhaustive_max(const SetFunction& fn, const GroundSet& u) {
    constexpr std::size_t kMaxExhaustive = 22;
    if (u.size() > kMaxExhaustive)
        throw SizeGuardError("exhaustive_max: " + std::to_string(u.size()) + " elements exceed the limit of " +
                             std::to_string(kMaxExhaustive));
    if (fn.universe_size() != u.universe_size())
        throw ArgumentError("exhaustive_max: function and ground set widths differ");
    const SetFunction f = fn.fresh();
    const auto& ids = u.elements();

    SolverResult result;
    result.chosen = SubsetBitset(u.universe_size());
    result.objective = f(result.chosen);
    const std::uint64_t total = std::uint64_t{1} << ids.size();
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        SubsetBitset s(u.universe_size());
        for (std::size_t j = 0; j < ids.size(); ++j)
            if ((mask >> j) & 1) s.set(ids[j]);
        const double v = f(s);
        if (v > result.objective) {
            result.objective = v;
            result.chosen = s;
        }
    }
    result.oracle_calls = f.call_count();
    return result;
}

/// Cardinality-constrained preprocessing: drops elements that a k-capped
/// ratio greedy provably never picks. Elements are ranked by the ratio
/// of their gain on top of everything else, f_m'(e, U \ {e}) / c(e), and
/// an element survives iff its best-case ratio f_m({e}) / c(e) reaches
/// the k-th ranked value. With k = n the universe is returned untouched,
/// with no oracle calls. Elements with cost <= 0 are always retained;
/// the ranking argument assumes positive costs.
inline GroundSet universe_reduce(const Decomposition& d, const GroundSet& u, std::size_t k) {
    const std::size_t n = u.size();
    if (k < 1 || k > n) throw ArgumentError("universe_reduce: k must be in [1, n]");
    if (k == n) return u;

    const auto& cost = d.cost_weights();
    std::vector<std::size_t> positive;
    for (std::size_t e : u.elements())
        if (cost[e] > 0.0) positive.push_back(e);
    if (positive.size() <= k) return u;

    const SetFunction& f_m = d.monotone_part();
    const SubsetBitset full = u.all();
    const double fm_full = f_m(full);

    std::vector<std::pair<double, std::size_t>> tail;  // (ratio, id)
    tail.reserve(positive.size());
    for (std::size_t e : positive) tail.emplace_back((fm_full - f_m(full.without(e))) / cost[e], e);
    std::sort(tail.begin(), tail.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const double threshold = tail[k - 1].first;

    SubsetBitset keep(u.universe_size());
    for (std::size_t e : u.elements())
        if (cost[e] <= 0.0) keep.set(e);
    const SubsetBitset empty(u.universe_size());
    for (std::size_t e : positive) {
        const double singleton_ratio = f_m(empty.with(e)) / cost[e];
        if (singleton_ratio >= threshold) keep.set(e);
    }
    return u.restrict_to(keep);
}

}  // namespace mqopt
