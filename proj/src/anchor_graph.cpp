#include "taghash/anchor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "taghash/errors.hpp"
#include "taghash/kmeans.hpp"

namespace taghash {

AnchorGraph build_anchor_graph(const DenseMatrix& x, std::size_t m, std::size_t s,
                               std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(x.cols());
    if (m == 0 || s == 0) throw InvalidConfig("anchor graph needs m >= 1 and s >= 1");
    if (s > m) throw InvalidConfig("nearest-anchor count s exceeds anchor count m");
    if (m > n) throw InvalidConfig("anchor count m exceeds sample count n");

    AnchorGraph g;
    g.n = n;
    g.m = m;
    g.s = s;
    g.anchors = kmeans(x, m, {.seed = seed}).centers;

    const DenseMatrix approx = squared_distances(g.anchors, x);
    g.nbr.resize(n * s);
    g.weight.resize(n * s);
    std::vector<double> exact(n * s);
    std::vector<std::uint32_t> order(m);
    double sum_last = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto col = approx.col(static_cast<Eigen::Index>(i));
        std::iota(order.begin(), order.end(), 0u);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(),
                          [&](std::uint32_t a, std::uint32_t b) {
                              return col(a) < col(b) || (col(a) == col(b) && a < b);
                          });
        for (std::size_t t = 0; t < s; ++t) {
            g.nbr[i * s + t] = order[t];
            exact[i * s + t] = (x.col(static_cast<Eigen::Index>(i)) - g.anchors.col(order[t])).squaredNorm();
        }
        sum_last += exact[i * s + s - 1];
    }
    g.sigma_sq = sum_last / static_cast<double>(n);
    if (!(g.sigma_sq > 0.0)) g.sigma_sq = 1.0;

    g.lambda = DenseVector::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        const double* d = &exact[i * s];
        const double dmin = *std::min_element(d, d + s);
        double total = 0.0;
        for (std::size_t t = 0; t < s; ++t) {
            g.weight[i * s + t] = std::exp(-(d[t] - dmin) / (2.0 * g.sigma_sq));
            total += g.weight[i * s + t];
        }
        for (std::size_t t = 0; t < s; ++t) {
            g.weight[i * s + t] /= total;
            g.lambda(g.nbr[i * s + t]) += g.weight[i * s + t];
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        if (!(g.lambda(static_cast<Eigen::Index>(j)) > 0.0))
            throw DegenerateAnchor("anchor " + std::to_string(j) + " receives no similarity mass");
    return g;
}

DenseMatrix apply_affinity(const AnchorGraph& g, const DenseMatrix& m) {
    if (static_cast<std::size_t>(m.cols()) != g.n)
        throw DimensionMismatch("apply_affinity: expected " + std::to_string(g.n) + " columns");
    DenseMatrix through = DenseMatrix::Zero(m.rows(), static_cast<Eigen::Index>(g.m));
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t t = 0; t < g.s; ++t)
            through.col(g.neighbor(i, t)) += g.w(i, t) * m.col(static_cast<Eigen::Index>(i));
    through.array().rowwise() /= g.lambda.transpose().array();

    DenseMatrix out = DenseMatrix::Zero(m.rows(), m.cols());
    for (std::size_t i = 0; i < g.n; ++i) {
        auto oi = out.col(static_cast<Eigen::Index>(i));
        for (std::size_t t = 0; t < g.s; ++t) oi += g.w(i, t) * through.col(g.neighbor(i, t));
    }
    return out;
}

}  // namespace taghash
