#pragma once

#include <cstdint>
#include <vector>

#include "taghash/matrix.hpp"

namespace taghash {

struct Centroids {
    std::size_t k = 0;
    std::size_t dims = 0;
    DenseMatrix centers;                   // dims x k
    std::vector<std::uint32_t> assignments;  // one per point
    double inertia = 0.0;
    // Inertia after every Lloyd update, in iteration order.
    std::vector<double> inertia_trace;
};

struct KMeansOptions {
    std::size_t max_iters = 100;
    double tol = 1e-6;  // relative inertia improvement
    std::uint64_t seed = 0;
};

// Lloyd iterations from k-means++ seeding. Empty clusters are reseeded at the
// point farthest from its center, so every returned cluster is non-empty and
// each center is the mean of its assigned points.
Centroids kmeans(const DenseMatrix& points, std::size_t k, const KMeansOptions& opts = {});

// Squared Euclidean distances between every column of `points` and every
// column of `centers` (centers.cols() x points.cols()). Computed blockwise via
// the Gram expansion and clamped at zero.
DenseMatrix squared_distances(const DenseMatrix& centers, const DenseMatrix& points);

}  // namespace taghash
