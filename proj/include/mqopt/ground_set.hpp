#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mqopt/bitset.hpp"
#include "mqopt/common.hpp"

namespace mqopt {

/// The universe a set function is defined over. Ids are dense integers
/// 0..n-1. A GroundSet may also be a restricted view over that universe
/// (see restrict_to); bitsets always keep the ambient width so results
/// computed on a reduced universe compare directly against the full one.
class GroundSet {
public:
    GroundSet() = default;

    explicit GroundSet(std::size_t n) : n_(n), labels_(n) {
        active_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            active_.push_back(i);
            labels_[i] = "e" + std::to_string(i);
        }
    }

    GroundSet(std::size_t n, std::vector<std::string> labels) : GroundSet(n) {
        if (labels.size() != n) throw ArgumentError("GroundSet: label count does not match n");
        labels_ = std::move(labels);
    }

    /// View keeping only the elements present in keep. Ids and labels are preserved.
    GroundSet restrict_to(const SubsetBitset& keep) const {
        if (keep.size() != n_) throw ArgumentError("restrict_to: bitset width mismatch");
        GroundSet g;
        g.n_ = n_;
        g.labels_ = labels_;
        for (std::size_t id : active_)
            if (keep.test(id)) g.active_.push_back(id);
        return g;
    }

    /// Width of the ambient universe (bitset width).
    std::size_t universe_size() const { return n_; }

    /// Number of elements in this (possibly restricted) view.
    std::size_t size() const { return active_.size(); }

    /// Element ids in ascending order.
    const std::vector<std::size_t>& elements() const { return active_; }

    bool contains(std::size_t id) const {
        for (std::size_t e : active_)
            if (e == id) return true;
        return false;
    }

    bool is_full() const { return active_.size() == n_; }

    const std::string& label(std::size_t id) const {
        if (id >= n_) throw ArgumentError("label: id out of range");
        return labels_[id];
    }

    /// Bitset holding every element of this view.
    SubsetBitset all() const {
        SubsetBitset s(n_);
        for (std::size_t id : active_) s.set(id);
        return s;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> active_;
    std::vector<std::string> labels_;
};

}  // namespace mqopt
