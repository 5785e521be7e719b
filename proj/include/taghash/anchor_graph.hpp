#pragma once

#include <cstdint>
#include <vector>

#include "taghash/matrix.hpp"

namespace taghash {

// Low-rank visual affinity S = V * diag(lambda)^-1 * V^T over m anchors.
// V is n x m with at most s nonzeros per row, stored with a fixed stride s.
struct AnchorGraph {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t s = 0;
    DenseMatrix anchors;                 // d x m
    std::vector<std::uint32_t> nbr;      // n * s anchor ids, row-major
    std::vector<double> weight;          // n * s, each row sums to 1
    DenseVector lambda;                  // V^T 1, all > 0
    double sigma_sq = 1.0;               // Gaussian bandwidth (squared)

    std::uint32_t neighbor(std::size_t i, std::size_t t) const { return nbr[i * s + t]; }
    double w(std::size_t i, std::size_t t) const { return weight[i * s + t]; }
};

// Anchors come from k-means; each sample keeps Gaussian similarities to its
// s nearest anchors (ties to the lower anchor id), row-normalized.
// sigma^2 is the mean squared distance from a sample to its s-th nearest anchor.
AnchorGraph build_anchor_graph(const DenseMatrix& x, std::size_t m, std::size_t s,
                               std::uint64_t seed);

// Returns M * S for M of shape r x n without materializing S. Cost O(r n s).
DenseMatrix apply_affinity(const AnchorGraph& g, const DenseMatrix& m);

}  // namespace taghash
