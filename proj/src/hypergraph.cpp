#include "taghash/hypergraph.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "taghash/errors.hpp"
#include "taghash/kmeans.hpp"

namespace taghash {

Hypergraph build_hypergraph(const DenseMatrix& x, const SparseBinaryMatrix* tags,
                            const HypergraphOptions& opts) {
    const std::size_t n = static_cast<std::size_t>(x.cols());
    if (opts.a == 0 || opts.a > n)
        throw InvalidConfig("hyperedge count a must satisfy 1 <= a <= n");
    if (opts.sigma_sq && !(*opts.sigma_sq > 0.0))
        throw InvalidConfig("hypergraph sigma override must be positive");

    DenseMatrix stacked;
    if (tags) {
        if (tags->cols() != n) throw DimensionMismatch("tags and features disagree on n");
        stacked.resize(x.rows() + static_cast<Eigen::Index>(tags->rows()), x.cols());
        stacked.topRows(x.rows()) = x;
        stacked.bottomRows(static_cast<Eigen::Index>(tags->rows())) = opts.tag_scale * tags->to_dense();
    } else {
        stacked = x;
    }

    const Centroids concepts = kmeans(stacked, opts.a, {.seed = opts.seed});

    Hypergraph hg;
    hg.n = n;
    hg.a = opts.a;
    hg.concepts = concepts.centers;
    hg.sigma_sq = opts.sigma_sq.value_or(concepts.inertia / static_cast<double>(n));
    if (!(hg.sigma_sq > 0.0)) hg.sigma_sq = 1.0;

    // Floor at the smallest normal double so every vertex keeps a positive degree.
    constexpr double kFloor = std::numeric_limits<double>::min();
    hg.incidence = (-squared_distances(hg.concepts, stacked).transpose() / (2.0 * hg.sigma_sq))
                       .array().exp().max(kFloor).matrix();
    hg.dw = DenseVector::Ones(static_cast<Eigen::Index>(hg.a));
    hg.de = hg.incidence.colwise().sum().transpose();
    hg.dv = hg.incidence * hg.dw;
    return hg;
}

DenseMatrix apply_hyperkernel(const Hypergraph& hg, const DenseMatrix& m) {
    if (static_cast<std::size_t>(m.cols()) != hg.n)
        throw DimensionMismatch("apply_hyperkernel: expected " + std::to_string(hg.n) + " columns");
    const Eigen::RowVectorXd inv_sqrt_dv = hg.dv.array().rsqrt().transpose();
    const DenseMatrix scaled = m.array().rowwise() * inv_sqrt_dv.array();
    DenseMatrix edge = scaled * hg.incidence;  // r x a
    edge.array().rowwise() *= (hg.dw.array() / hg.de.array()).transpose();
    DenseMatrix out = edge * hg.incidence.transpose();
    out.array().rowwise() *= inv_sqrt_dv.array();
    return out;
}

}  // namespace taghash
