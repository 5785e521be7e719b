#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "taghash/hash_model.hpp"

namespace taghash {

struct Neighbor {
    std::uint64_t id;
    std::uint32_t distance;
    bool operator==(const Neighbor&) const = default;
};

// Linear-scan Hamming index over packed codes. Ids are opaque labels.
class HammingIndex {
public:
    HammingIndex(PackedCodes codes, std::vector<std::uint64_t> ids);
    // Ids default to database positions 0..n-1.
    explicit HammingIndex(PackedCodes codes);

    std::size_t size() const { return codes_.n; }
    std::size_t bits() const { return codes_.r; }
    const PackedCodes& codes() const { return codes_; }
    const std::vector<std::uint64_t>& ids() const { return ids_; }

    // Top min(k, n) entries by ascending distance; equal distances keep
    // database order.
    std::vector<Neighbor> query(std::span<const std::uint64_t> q, std::size_t k) const;

    // Database positions of the full ranking (same order as query()).
    std::vector<std::uint32_t> rank_positions(std::span<const std::uint64_t> q) const;

private:
    PackedCodes codes_;
    std::vector<std::uint64_t> ids_;
};

HammingIndex build_index(PackedCodes codes, std::vector<std::uint64_t> ids);

// Popcount of a XOR b; both codes must have the same word count.
std::uint32_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

}  // namespace taghash
