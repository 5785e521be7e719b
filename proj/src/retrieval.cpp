#include "taghash/retrieval.hpp"

#include <bit>
#include <numeric>
#include <string>

#include "taghash/errors.hpp"

namespace taghash {

HammingIndex::HammingIndex(PackedCodes codes, std::vector<std::uint64_t> ids)
    : codes_(std::move(codes)), ids_(std::move(ids)) {
    if (ids_.size() != codes_.n)
        throw LengthMismatch("index has " + std::to_string(codes_.n) + " codes but " +
                             std::to_string(ids_.size()) + " ids");
}

HammingIndex::HammingIndex(PackedCodes codes) : codes_(std::move(codes)) {
    ids_.resize(codes_.n);
    std::iota(ids_.begin(), ids_.end(), std::uint64_t{0});
}

HammingIndex build_index(PackedCodes codes, std::vector<std::uint64_t> ids) {
    return HammingIndex(std::move(codes), std::move(ids));
}

std::uint32_t hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) throw LengthMismatch("codes have different lengths");
    std::uint32_t d = 0;
    for (std::size_t w = 0; w < a.size(); ++w) d += static_cast<std::uint32_t>(std::popcount(a[w] ^ b[w]));
    return d;
}

std::vector<std::uint32_t> HammingIndex::rank_positions(std::span<const std::uint64_t> q) const {
    if (codes_.n == 0) throw EmptyIndex("query against an empty index");
    if (q.size() != codes_.words_per_code()) throw LengthMismatch("query code length differs from index");
    // Counting sort over the r + 1 possible distances keeps database order
    // within each distance.
    std::vector<std::uint32_t> dist(codes_.n);
    std::vector<std::uint32_t> bucket_start(codes_.r + 2, 0);
    for (std::size_t i = 0; i < codes_.n; ++i) {
        dist[i] = hamming(codes_.code(i), q);
        ++bucket_start[dist[i] + 1];
    }
    std::partial_sum(bucket_start.begin(), bucket_start.end(), bucket_start.begin());
    std::vector<std::uint32_t> order(codes_.n);
    for (std::size_t i = 0; i < codes_.n; ++i) order[bucket_start[dist[i]]++] = static_cast<std::uint32_t>(i);
    return order;
}

std::vector<Neighbor> HammingIndex::query(std::span<const std::uint64_t> q, std::size_t k) const {
    if (k == 0) throw InvalidConfig("k must be at least 1");
    const auto order = rank_positions(q);
    const std::size_t take = std::min(k, order.size());
    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t t = 0; t < take; ++t)
        out.push_back({ids_[order[t]], hamming(codes_.code(order[t]), q)});
    return out;
}

}  // namespace taghash
