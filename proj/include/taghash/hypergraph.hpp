#pragma once

#include <cstdint>
#include <optional>

#include "taghash/matrix.hpp"

namespace taghash {

// Image-concept hypergraph: vertices are samples, hyperedges are k-means
// concepts over the stacked [features; tag_scale * tags] vectors.
struct Hypergraph {
    std::size_t n = 0;
    std::size_t a = 0;
    DenseMatrix incidence;   // H, n x a, entries in (0, 1]
    DenseVector dv;          // vertex degrees (n)
    DenseVector de;          // hyperedge degrees (a)
    DenseVector dw;          // hyperedge weights (a), all ones
    DenseMatrix concepts;    // (d + c) x a, or d x a without tags
    double sigma_sq = 1.0;
};

struct HypergraphOptions {
    std::size_t a = 0;
    std::uint64_t seed = 0;
    double tag_scale = 1.0;
    std::optional<double> sigma_sq;  // overrides the mean assigned distance
};

// `tags` may be null, in which case concepts are detected on features only.
Hypergraph build_hypergraph(const DenseMatrix& x, const SparseBinaryMatrix* tags,
                            const HypergraphOptions& opts);

// Returns M * Dv^-1/2 H Dw De^-1 H^T Dv^-1/2 for M of shape r x n, via staged
// products costing O(r n a).
DenseMatrix apply_hyperkernel(const Hypergraph& hg, const DenseMatrix& m);

}  // namespace taghash
