#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mqopt/bitset.hpp"
#include "mqopt/common.hpp"
#include "mqopt/ground_set.hpp"

namespace mqopt {

/// A real-valued function on subsets of a ground set, memoized behind a
/// subset-keyed cache. Copies share the cache; fresh() starts an empty one,
/// which is what solvers use so their reported call counts do not depend on
/// what ran before. call_count() is the number of distinct underlying
/// evaluations. The underlying evaluator must be deterministic. Caches are
/// not synchronized: confine one instance to one thread, or give each
/// worker its own fresh() copy.
class SetFunction {
public:
    using Evaluator = std::function<double(const SubsetBitset&)>;

    SetFunction() = default;

    SetFunction(std::size_t n, Evaluator eval)
        : state_(std::make_shared<State>(State{std::move(eval), {}, n})) {}

    double operator()(const SubsetBitset& s) const {
        if (!state_) throw ArgumentError("evaluating an empty SetFunction");
        if (s.size() != state_->n)
            throw ArgumentError("set function defined on width " + std::to_string(state_->n) +
                                " evaluated on width " + std::to_string(s.size()));
        auto it = state_->memo.find(s);
        if (it != state_->memo.end()) return it->second;
        const double v = state_->eval(s);
        state_->memo.emplace(s, v);
        return v;
    }

    std::size_t call_count() const { return state_ ? state_->memo.size() : 0; }

    std::size_t universe_size() const { return state_ ? state_->n : 0; }

    /// Same evaluator, empty cache and zero call count.
    SetFunction fresh() const {
        if (!state_) return {};
        return SetFunction(state_->n, state_->eval);
    }

    bool valid() const { return static_cast<bool>(state_); }

private:
    struct State {
        Evaluator eval;
        std::unordered_map<SubsetBitset, double, SubsetBitsetHash> memo;
        std::size_t n;
    };
    std::shared_ptr<State> state_;
};

/// Additive function with the given per-element weights.
inline SetFunction make_additive(std::vector<double> weights) {
    const std::size_t n = weights.size();
    return SetFunction(n, [w = std::move(weights)](const SubsetBitset& s) {
        double total = 0.0;
        for (std::size_t id : s.to_ids()) total += w[id];
        return total;
    });
}

/// f(S u {e}) - f(S). Exactly two oracle calls, fewer when memoized.
inline double marginal_gain(const SetFunction& f, std::size_t e, const SubsetBitset& s) {
    if (s.test(e)) throw ArgumentError("marginal_gain: element " + std::to_string(e) + " already in the set");
    return f(s.with(e)) - f(s);
}

namespace detail {

/// Exhaustive-check ceiling for the definition-level submodularity /
/// monotonicity tests.
inline constexpr std::size_t kExhaustiveCheckLimit = 14;

/// Table of f over all subsets of U's elements, indexed by mask
/// (bit j of the mask <-> U.elements()[j]).
inline std::vector<double> subset_value_table(const SetFunction& f, const GroundSet& u) {
    const auto& ids = u.elements();
    const std::size_t m = ids.size();
    std::vector<double> table(std::size_t{1} << m);
    for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
        SubsetBitset s(u.universe_size());
        for (std::size_t j = 0; j < m; ++j)
            if ((mask >> j) & 1) s.set(ids[j]);
        table[mask] = f(s);
    }
    return table;
}

inline void check_exhaustive_size(const GroundSet& u, const char* who) {
    if (u.size() > kExhaustiveCheckLimit)
        throw SizeGuardError(std::string(who) + ": ground set of size " + std::to_string(u.size()) +
                             " exceeds the exhaustive-check limit of " + std::to_string(kExhaustiveCheckLimit));
}

}  // namespace detail

/// True iff f(A u {u}) - f(A) >= f(B u {u}) - f(B) for all A subset of B
/// and u outside B, up to kTol. Exhaustive; guarded at 14 elements.
inline bool is_submodular(const SetFunction& f, const GroundSet& u) {
    detail::check_exhaustive_size(u, "is_submodular");
    const std::size_t m = u.size();
    const auto table = detail::subset_value_table(f, u);
    const std::uint64_t fullmask = (std::uint64_t{1} << m) - 1;
    for (std::uint64_t b = 0; b <= fullmask; ++b) {
        // Enumerate submasks a of b, then every u outside b.
        for (std::uint64_t a = b;; a = (a - 1) & b) {
            for (std::uint64_t rest = fullmask & ~b; rest;) {
                const std::uint64_t ubit = rest & (~rest + 1);
                rest ^= ubit;
                const double gain_a = table[a | ubit] - table[a];
                const double gain_b = table[b | ubit] - table[b];
                if (gain_a < gain_b - kTol) return false;
            }
            if (a == 0) break;
        }
    }
    return true;
}

/// True iff f(A) <= f(B) for all A subset of B, up to kTol. Exhaustive;
/// guarded at 14 elements.
inline bool is_monotone(const SetFunction& f, const GroundSet& u) {
    detail::check_exhaustive_size(u, "is_monotone");
    const std::size_t m = u.size();
    const auto table = detail::subset_value_table(f, u);
    const std::uint64_t fullmask = (std::uint64_t{1} << m) - 1;
    for (std::uint64_t b = 0; b <= fullmask; ++b) {
        for (std::uint64_t a = b;; a = (a - 1) & b) {
            if (table[a] > table[b] + kTol) return false;
            if (a == 0) break;
        }
    }
    return true;
}

}  // namespace mqopt
