#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mqopt/bitset.hpp"
#include "mqopt/common.hpp"
#include "mqopt/decomposition.hpp"
#include "mqopt/set_function.hpp"
#include "mqopt/workload.hpp"

namespace mqopt {

/// The two-query batch used throughout as the canonical fixture: unit
/// costs 10 per scan, 100 per join, 10 per materialization write or read.
inline const char* demo_workload_json() {
    return R"({
  "relations": [
    {"name": "A", "cardinality": 1000},
    {"name": "B", "cardinality": 1000},
    {"name": "C", "cardinality": 1000},
    {"name": "D", "cardinality": 1000}
  ],
  "queries": [
    {"relations": ["A", "B", "C"], "predicates": [["A", "B", 0.01], ["B", "C", 0.01]]},
    {"relations": ["B", "C", "D"], "predicates": [["B", "C", 0.01], ["C", "D", 0.01]]}
  ],
  "cost_model": {
    "mode": "fixture",
    "scan": {"default": 10},
    "join": {"default": 100},
    "materialize_write": {"default": 10},
    "materialized_read": {"default": 10}
  }
})";
}

/// A coverage instance (ground set X, set family S, budget l) together
/// with the profit scaling parameter gamma.
struct CoverageInstance {
    std::size_t n_elements = 0;
    std::vector<std::vector<std::size_t>> sets;
    std::size_t budget_l = 0;
    double gamma = 1.0;
};

namespace detail {

inline std::vector<SubsetBitset> set_masks(const CoverageInstance& inst) {
    std::vector<SubsetBitset> masks;
    masks.reserve(inst.sets.size());
    for (const auto& s : inst.sets) {
        SubsetBitset m(inst.n_elements);
        for (std::size_t e : s) {
            if (e >= inst.n_elements) throw ArgumentError("coverage instance: set member out of range");
            m.set(e);
        }
        masks.push_back(std::move(m));
    }
    return masks;
}

inline std::size_t union_count(const std::vector<SubsetBitset>& masks, const SubsetBitset& chosen,
                               std::size_t n_elements) {
    SubsetBitset u(n_elements);
    for (std::size_t i : chosen.to_ids())
        for (std::size_t e : masks[i].to_ids()) u.set(e);
    return u.count();
}

}  // namespace detail

/// The profitted max-coverage objective: universe = the set family,
/// f_m(A) = ((gamma+1)/gamma) * |union of A| / n, and a uniform cost of
/// 1 / (gamma * l) per chosen set. f = f_m - c is normalized submodular;
/// a budget-respecting exact cover has value 1 and f/c ratio gamma.
inline Decomposition profitted_oracle(const CoverageInstance& inst) {
    if (inst.n_elements == 0) throw ArgumentError("profitted_oracle: empty ground set");
    if (inst.budget_l == 0 || inst.budget_l > inst.sets.size())
        throw ArgumentError("profitted_oracle: budget must be in [1, #sets]");
    if (!(inst.gamma > 0.0)) throw ArgumentError("profitted_oracle: gamma must be positive");

    const double scale = (inst.gamma + 1.0) / inst.gamma;
    const double n = static_cast<double>(inst.n_elements);
    auto masks = detail::set_masks(inst);
    const std::size_t m = inst.sets.size();
    const std::size_t n_elements = inst.n_elements;

    SetFunction f_m(m, [masks = std::move(masks), scale, n, n_elements](const SubsetBitset& s) {
        return scale * static_cast<double>(detail::union_count(masks, s, n_elements)) / n;
    });
    std::vector<double> cost(m, 1.0 / (inst.gamma * static_cast<double>(inst.budget_l)));
    return Decomposition(std::move(f_m), std::move(cost));
}

/// Planted cover: l disjoint blocks partition the ground set (the
/// optimum of the profitted oracle), extra_sets random proper subsets of
/// single blocks are mixed in, and blocks whose elements would otherwise
/// be covered once are duplicated so every element has at least two
/// covering sets. Deterministic per seed.
inline CoverageInstance gen_planted_cover(std::size_t n, std::size_t l, std::size_t extra_sets,
                                          std::uint64_t seed, double gamma = 1.0) {
    if (l == 0 || n == 0) throw ArgumentError("gen_planted_cover: n and l must be positive");
    if (n % l != 0) throw ArgumentError("gen_planted_cover: n must be divisible by l");
    CoverageInstance inst;
    inst.n_elements = n;
    inst.budget_l = l;
    inst.gamma = gamma;
    const std::size_t block = n / l;
    for (std::size_t b = 0; b < l; ++b) {
        std::vector<std::size_t> part;
        for (std::size_t j = 0; j < block; ++j) part.push_back(b * block + j);
        inst.sets.push_back(std::move(part));
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> coverage(n, 1);
    for (std::size_t x = 0; x < extra_sets; ++x) {
        const std::size_t b = std::uniform_int_distribution<std::size_t>(0, l - 1)(rng);
        // A proper, non-empty subset of block b, so no extra set can stand
        // in for a full block in a cover.
        std::vector<std::size_t> subset;
        if (block > 1) {
            const std::size_t size = std::uniform_int_distribution<std::size_t>(1, block - 1)(rng);
            std::vector<std::size_t> pool;
            for (std::size_t j = 0; j < block; ++j) pool.push_back(b * block + j);
            std::shuffle(pool.begin(), pool.end(), rng);
            subset.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
            std::sort(subset.begin(), subset.end());
        } else {
            subset.push_back(b * block);  // singleton blocks have no proper subset
        }
        for (std::size_t e : subset) ++coverage[e];
        inst.sets.push_back(std::move(subset));
    }

    for (std::size_t b = 0; b < l; ++b) {
        bool thin = false;
        for (std::size_t j = 0; j < block; ++j)
            if (coverage[b * block + j] < 2) thin = true;
        if (thin) inst.sets.push_back(inst.sets[b]);  // duplicate the planted block
    }
    return inst;
}

struct RandomSubmodularParams {
    std::size_t ground_elements = 0;  // 0: derived as max(2n, 6)
    std::size_t min_set_size = 1;
    std::size_t max_set_size = 4;
    double min_weight = 0.5;
    double max_weight = 1.5;
    double min_cost = 0.3;
    double max_cost = 2.2;
};

/// Random member of the weighted-coverage-minus-additive-cost family:
/// element e covers a random subset of a weighted ground set, f_m(S) is
/// the weight of the union, and each element carries a positive cost.
/// Spans positive and negative optima; deterministic per seed.
inline Decomposition gen_random_submodular(std::size_t n, std::uint64_t seed,
                                           const RandomSubmodularParams& params = {}) {
    if (n == 0) throw ArgumentError("gen_random_submodular: n must be positive");
    std::mt19937_64 rng(seed);
    const std::size_t ground = params.ground_elements ? params.ground_elements : std::max<std::size_t>(2 * n, 6);
    std::vector<double> item_weight(ground);
    for (auto& w : item_weight) w = std::uniform_real_distribution<double>(params.min_weight, params.max_weight)(rng);

    const std::size_t max_size = std::min(params.max_set_size, ground);
    const std::size_t min_size = std::min(params.min_set_size, max_size);
    std::vector<std::vector<std::size_t>> covers(n);
    std::vector<std::size_t> pool(ground);
    for (std::size_t i = 0; i < ground; ++i) pool[i] = i;
    for (auto& cover : covers) {
        const std::size_t size = std::uniform_int_distribution<std::size_t>(min_size, max_size)(rng);
        std::shuffle(pool.begin(), pool.end(), rng);
        cover.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
        std::sort(cover.begin(), cover.end());
    }

    std::vector<double> cost(n);
    for (auto& c : cost) c = std::uniform_real_distribution<double>(params.min_cost, params.max_cost)(rng);

    SetFunction f_m(n, [covers = std::move(covers), item_weight = std::move(item_weight),
                        ground](const SubsetBitset& s) {
        std::vector<char> hit(ground, 0);
        double total = 0.0;
        for (std::size_t e : s.to_ids())
            for (std::size_t item : covers[e])
                if (!hit[item]) {
                    hit[item] = 1;
                    total += item_weight[item];
                }
        return total;
    });
    return Decomposition(std::move(f_m), std::move(cost));
}

/// Synthetic batched-join workload: every query spans num_relations
/// relations, of which an overlap-controlled core prefix (at least two
/// relations whenever overlap > 0) is shared by the whole batch with
/// identical predicates, so two or more queries always expose a
/// shareable join. overlap = 0 keeps the queries relation-disjoint.
/// Queries are chains or stars, picked per seed; the cost model is the
/// analytical one with default constants.
inline Workload gen_join_workload(std::size_t num_queries, std::size_t num_relations, double overlap,
                                  std::uint64_t seed) {
    if (num_queries == 0 || num_relations == 0)
        throw ArgumentError("gen_join_workload: parameters must be positive");
    if (overlap < 0.0 || overlap > 1.0) throw ArgumentError("gen_join_workload: overlap must be in [0, 1]");
    std::mt19937_64 rng(seed);
    Workload w;
    w.seed = seed;
    w.cost_model.mode = CostModelMode::Analytical;

    std::size_t core = 0;
    if (overlap > 0.0 && num_relations >= 2)
        core = std::min(num_relations, std::max<std::size_t>(2, static_cast<std::size_t>(
                                                                    std::llround(overlap * num_relations))));

    const auto add_relation = [&](const std::string& name) {
        const double card = std::pow(10.0, std::uniform_real_distribution<double>(2.0, 5.0)(rng));
        w.relations.push_back({name, std::floor(card), std::nullopt});
    };
    const auto selectivity = [&] { return std::uniform_real_distribution<double>(0.0005, 0.05)(rng); };

    std::vector<std::string> core_names;
    std::vector<double> core_sels;  // chain predicates along the core
    for (std::size_t i = 0; i < core; ++i) {
        core_names.push_back("C" + std::to_string(i));
        add_relation(core_names.back());
        if (i > 0) core_sels.push_back(selectivity());
    }

    for (std::size_t qi = 0; qi < num_queries; ++qi) {
        Query q;
        q.relations = core_names;
        for (std::size_t i = 1; i < core_names.size(); ++i)
            q.predicates.push_back({core_names[i - 1], core_names[i], core_sels[i - 1]});
        std::vector<std::string> privates;
        for (std::size_t j = core; j < num_relations; ++j) {
            privates.push_back("Q" + std::to_string(qi) + "_R" + std::to_string(j));
            add_relation(privates.back());
            q.relations.push_back(privates.back());
        }
        const bool star = (rng() & 1) != 0;
        const std::string hub = q.relations.front();
        const std::string tail = core_names.empty() ? hub : core_names.back();
        for (std::size_t j = 0; j < privates.size(); ++j) {
            const std::string& anchor = star ? hub : (j == 0 ? tail : privates[j - 1]);
            if (anchor != privates[j]) q.predicates.push_back({anchor, privates[j], selectivity()});
        }
        w.queries.push_back(std::move(q));
    }
    validate_workload(w);
    return w;
}

/// Argmax over beta in [0, gamma+1] of the soundness envelope
/// g(beta) = ((gamma+1)(1 - e^-beta) - beta) / gamma, located by a
/// 10^4-point scan refined by golden-section search to width 1e-8.
/// The analytic optimum is ln(1 + gamma), where g equals
/// 1 - ln(1 + gamma) / gamma.
inline double beta_optimum_check(double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("beta_optimum_check: gamma must be positive");
    const auto g = [gamma](double beta) {
        return ((gamma + 1.0) * (1.0 - std::exp(-beta)) - beta) / gamma;
    };
    const double hi = gamma + 1.0;
    constexpr int kGrid = 10000;
    double best_beta = 0.0, best_val = g(0.0);
    for (int i = 1; i <= kGrid; ++i) {
        const double beta = hi * static_cast<double>(i) / kGrid;
        const double v = g(beta);
        if (v > best_val) {
            best_val = v;
            best_beta = beta;
        }
    }
    double lo = std::max(0.0, best_beta - hi / kGrid);
    double up = std::min(hi, best_beta + hi / kGrid);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = up - phi * (up - lo), x2 = lo + phi * (up - lo);
    double f1 = g(x1), f2 = g(x2);
    while (up - lo > 1e-8) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (up - lo);
            f2 = g(x2);
        } else {
            up = x2;
            x2 = x1;
            f2 = f1;
            x1 = up - phi * (up - lo);
            f1 = g(x1);
        }
    }
    return (lo + up) / 2.0;
}

}  // namespace mqopt
