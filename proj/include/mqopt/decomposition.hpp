#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mqopt/common.hpp"
#include "mqopt/ground_set.hpp"
#include "mqopt/set_function.hpp"

namespace mqopt {

/// A normalized submodular function written as f = f_m - c with f_m
/// monotone submodular and c additive (stored as per-element weights,
/// which may be negative or zero).
class Decomposition {
public:
    Decomposition() = default;

    Decomposition(SetFunction f_m, std::vector<double> cost)
        : f_m_(std::move(f_m)), cost_(std::move(cost)) {
        if (f_m_.valid() && f_m_.universe_size() != cost_.size())
            throw ArgumentError("Decomposition: cost vector size does not match the universe");
    }

    const SetFunction& monotone_part() const { return f_m_; }
    const std::vector<double>& cost_weights() const { return cost_; }

    std::size_t universe_size() const { return cost_.size(); }

    /// c(S), summed in ascending element order.
    double cost(const SubsetBitset& s) const {
        double total = 0.0;
        for (std::size_t id : s.to_ids()) total += cost_[id];
        return total;
    }

    /// f(S) = f_m(S) - c(S).
    double value(const SubsetBitset& s) const { return f_m_(s) - cost(s); }

    /// f as a standalone memoized oracle.
    SetFunction function() const {
        return SetFunction(universe_size(), [d = *this](const SubsetBitset& s) { return d.value(s); });
    }

private:
    SetFunction f_m_;
    std::vector<double> cost_;
};

/// The decomposition (f_m*, c*) with c*[e] = f(U \ {e}) - f(U) and
/// f_m*(S) = f(S) + sum of c* over S. Fills the weights with n+1
/// evaluations of f beyond the normalization check of f(empty); the
/// returned monotone part is lazy, evaluating f on demand.
inline Decomposition canonical_decomposition(const SetFunction& f, const GroundSet& u) {
    const std::size_t width = u.universe_size();
    if (f.universe_size() != width)
        throw ArgumentError("canonical_decomposition: function and ground set widths differ");
    const SubsetBitset empty(width);
    const double f_empty = f(empty);
    if (f_empty < -kTol || f_empty > kTol)
        throw NormalizationError("canonical_decomposition: f(empty) = " + std::to_string(f_empty) + ", expected 0");

    std::vector<double> cost(width, 0.0);
    const SubsetBitset full = u.all();
    const double f_full = f(full);
    for (std::size_t id : u.elements()) cost[id] = f(full.without(id)) - f_full;

    SetFunction f_m(width, [f, cost](const SubsetBitset& s) {
        double shift = 0.0;
        for (std::size_t id : s.to_ids()) shift += cost[id];
        return f(s) + shift;
    });
    return Decomposition(std::move(f_m), std::move(cost));
}

/// Shifts an arbitrary decomposition by the per-element drops of its
/// monotone part at the top of the lattice: with
/// d_i = f_m(U) - f_m(U \ {i}), returns (f_m - sum d_i, c - sum d_i).
/// The result represents the same f, its monotone part stays monotone,
/// and the canonical decomposition is a fixed point.
inline Decomposition improve_decomposition(const Decomposition& d, const GroundSet& u) {
    const std::size_t width = u.universe_size();
    if (d.universe_size() != width)
        throw ArgumentError("improve_decomposition: decomposition and ground set widths differ");
    const SetFunction& f_m = d.monotone_part();
    const SubsetBitset full = u.all();
    const double fm_full = f_m(full);

    std::vector<double> shift(width, 0.0);
    for (std::size_t id : u.elements()) shift[id] = fm_full - f_m(full.without(id));

    std::vector<double> cost = d.cost_weights();
    for (std::size_t id : u.elements()) cost[id] -= shift[id];

    SetFunction shifted(width, [f_m, shift](const SubsetBitset& s) {
        double total = 0.0;
        for (std::size_t id : s.to_ids()) total += shift[id];
        return f_m(s) - total;
    });
    return Decomposition(std::move(shifted), std::move(cost));
}

}  // namespace mqopt
