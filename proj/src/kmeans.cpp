#include "taghash/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "taghash/errors.hpp"
#include "taghash/parallel.hpp"

namespace taghash {

namespace {

constexpr std::size_t kChunk = 256;

std::vector<std::size_t> seed_plus_plus(const DenseMatrix& x, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = static_cast<std::size_t>(x.cols());
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::vector<bool> taken(n, false);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto pick_uniform_untaken = [&] {
        std::size_t remaining = n - chosen.size();
        auto target = static_cast<std::size_t>(unit(rng) * static_cast<double>(remaining));
        target = std::min(target, remaining - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            if (target-- == 0) return i;
        }
        return n - 1;
    };

    std::size_t first = pick_uniform_untaken();
    chosen.push_back(first);
    taken[first] = true;
    DenseVector best = (x.colwise() - x.col(static_cast<Eigen::Index>(first))).colwise().squaredNorm().transpose();

    while (chosen.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i]) total += best(static_cast<Eigen::Index>(i));
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                const double w = best(static_cast<Eigen::Index>(i));
                if (w <= 0.0) continue;
                acc += w;
                pick = i;
                if (acc > target) break;
            }
        }
        if (pick == n) pick = pick_uniform_untaken();
        chosen.push_back(pick);
        taken[pick] = true;
        const DenseVector d = (x.colwise() - x.col(static_cast<Eigen::Index>(pick))).colwise().squaredNorm().transpose();
        best = best.cwiseMin(d);
    }
    return chosen;
}

}  // namespace

DenseMatrix squared_distances(const DenseMatrix& centers, const DenseMatrix& points) {
    if (centers.rows() != points.rows())
        throw DimensionMismatch("squared_distances: dimension mismatch");
    const DenseVector cn = centers.colwise().squaredNorm().transpose();
    DenseMatrix out(centers.cols(), points.cols());
    parallel_for_chunks(static_cast<std::size_t>(points.cols()), kChunk,
                        [&](std::size_t b, std::size_t e) {
        const auto cols = static_cast<Eigen::Index>(e - b);
        const auto block = points.middleCols(static_cast<Eigen::Index>(b), cols);
        DenseMatrix g = centers.transpose() * block;
        const Eigen::RowVectorXd pn = block.colwise().squaredNorm();
        g = (-2.0 * g).colwise() + cn;
        g.rowwise() += pn;
        out.middleCols(static_cast<Eigen::Index>(b), cols) = g.cwiseMax(0.0);
    });
    return out;
}

Centroids kmeans(const DenseMatrix& points, std::size_t k, const KMeansOptions& opts) {
    const std::size_t n = static_cast<std::size_t>(points.cols());
    if (k == 0 || k > n)
        throw InvalidK("k-means requires 1 <= k <= n (k=" + std::to_string(k) +
                       ", n=" + std::to_string(n) + ")");
    if (opts.max_iters == 0) throw InvalidConfig("k-means max_iters must be >= 1");

    std::mt19937_64 rng(opts.seed);
    const auto init = seed_plus_plus(points, k, rng);

    Centroids res;
    res.k = k;
    res.dims = static_cast<std::size_t>(points.rows());
    res.centers.resize(points.rows(), static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j)
        res.centers.col(static_cast<Eigen::Index>(j)) = points.col(static_cast<Eigen::Index>(init[j]));
    res.assignments.assign(n, std::numeric_limits<std::uint32_t>::max());

    std::vector<double> point_dist(n, 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        // Assignment step; ties resolve to the lower center index.
        const DenseMatrix dist = squared_distances(res.centers, points);
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            dist.col(static_cast<Eigen::Index>(i)).minCoeff(&best);
            const auto a = static_cast<std::uint32_t>(best);
            if (a != res.assignments[i]) changed = true;
            res.assignments[i] = a;
        }

        std::vector<std::size_t> counts(k, 0);
        for (auto a : res.assignments) ++counts[a];
        for (std::size_t i = 0; i < n; ++i)
            point_dist[i] = (points.col(static_cast<Eigen::Index>(i)) -
                             res.centers.col(res.assignments[i])).squaredNorm();

        // Empty-cluster repair.
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] != 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[res.assignments[i]] < 2) continue;
                if (far == n || point_dist[i] > point_dist[far]) far = i;
            }
            --counts[res.assignments[far]];
            res.assignments[far] = static_cast<std::uint32_t>(j);
            counts[j] = 1;
            point_dist[far] = 0.0;
            res.centers.col(static_cast<Eigen::Index>(j)) = points.col(static_cast<Eigen::Index>(far));
            changed = true;
        }

        // Update step.
        res.centers.setZero();
        for (std::size_t i = 0; i < n; ++i)
            res.centers.col(res.assignments[i]) += points.col(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < k; ++j)
            res.centers.col(static_cast<Eigen::Index>(j)) /= static_cast<double>(counts[j]);

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += (points.col(static_cast<Eigen::Index>(i)) -
                        res.centers.col(res.assignments[i])).squaredNorm();
        res.inertia = inertia;
        res.inertia_trace.push_back(inertia);

        if (!changed) break;
        if (std::isfinite(prev)) {
            const double rel = (prev - inertia) / std::max(prev, std::numeric_limits<double>::min());
            if (rel < opts.tol) break;
        }
        prev = inertia;
    }
    return res;
}

}  // namespace taghash
