#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mqopt/common.hpp"

namespace mqopt {

/// Membership bits over the ids of a ground set. Width is fixed at
/// construction; two bitsets compare equal only if widths match.
class SubsetBitset {
public:
    SubsetBitset() = default;

    explicit SubsetBitset(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    /// Builds from the low n bits of mask (bit i <-> element i). Requires n <= 64.
    static SubsetBitset from_mask(std::size_t n, std::uint64_t mask) {
        if (n > 64) throw ArgumentError("from_mask: width exceeds 64 bits");
        SubsetBitset s(n);
        if (n > 0) s.words_[0] = (n == 64) ? mask : (mask & ((std::uint64_t{1} << n) - 1));
        return s;
    }

    static SubsetBitset full(std::size_t n) {
        SubsetBitset s(n);
        for (std::size_t i = 0; i < n; ++i) s.set(i);
        return s;
    }

    std::size_t size() const { return n_; }

    bool test(std::size_t i) const {
        check_index(i);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void set(std::size_t i) {
        check_index(i);
        words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }

    void reset(std::size_t i) {
        check_index(i);
        words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    /// Copy with element i added.
    SubsetBitset with(std::size_t i) const {
        SubsetBitset s(*this);
        s.set(i);
        return s;
    }

    /// Copy with element i removed.
    SubsetBitset without(std::size_t i) const {
        SubsetBitset s(*this);
        s.reset(i);
        return s;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool empty() const {
        for (std::uint64_t w : words_)
            if (w) return false;
        return true;
    }

    /// True if every member of this set is also in other.
    bool is_subset_of(const SubsetBitset& other) const {
        if (n_ != other.n_) return false;
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w] & ~other.words_[w]) return false;
        return true;
    }

    std::vector<std::size_t> to_ids() const {
        std::vector<std::size_t> ids;
        ids.reserve(count());
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                ids.push_back(w * 64 + static_cast<std::size_t>(b));
                bits &= bits - 1;
            }
        }
        return ids;
    }

    std::string to_string() const {
        std::string out = "{";
        bool first = true;
        for (std::size_t id : to_ids()) {
            if (!first) out += ",";
            out += std::to_string(id);
            first = false;
        }
        return out + "}";
    }

    friend bool operator==(const SubsetBitset& a, const SubsetBitset& b) {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }
    friend bool operator!=(const SubsetBitset& a, const SubsetBitset& b) { return !(a == b); }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void check_index(std::size_t i) const {
        if (i >= n_) throw ArgumentError("bitset index " + std::to_string(i) + " out of range for width " + std::to_string(n_));
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

struct SubsetBitsetHash {
    std::size_t operator()(const SubsetBitset& s) const {
        // FNV-1a over the words plus the width.
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        mix(s.size());
        for (std::uint64_t w : s.words()) mix(w);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace mqopt
