#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "taghash/anchor_graph.hpp"
#include "taghash/errors.hpp"

using namespace taghash;

TEST_SUITE("anchor_graph") {

TEST_CASE("every point its own anchor gives S = I") {
    std::mt19937_64 rng(2);
    const DenseMatrix x = oracle::random_matrix(3, 9, rng);
    const AnchorGraph g = build_anchor_graph(x, 9, 1, 0);
    const DenseMatrix v = oracle::dense_v(g);
    // V is a permutation matrix.
    CHECK((v.colwise().sum().array() == 1.0).all());
    CHECK((v.rowwise().sum().array() == 1.0).all());
    CHECK((g.lambda.array() == 1.0).all());
    CHECK((oracle::dense_s(g) - DenseMatrix::Identity(9, 9)).norm() < 1e-12);
    const DenseMatrix m = oracle::random_matrix(2, 9, rng);
    CHECK((apply_affinity(g, m) - m).norm() < 1e-12);
}

TEST_CASE("rows of V sum to one") {
    std::mt19937_64 rng(3);
    const DenseMatrix x = oracle::random_matrix(4, 120, rng);
    const AnchorGraph g = build_anchor_graph(x, 15, 4, 7);
    for (std::size_t i = 0; i < g.n; ++i) {
        double sum = 0.0;
        for (std::size_t t = 0; t < g.s; ++t) sum += g.w(i, t);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    const Eigen::VectorXd lambda = oracle::dense_v(g).colwise().sum().transpose();
    CHECK((lambda - g.lambda).norm() < 1e-9);
}

TEST_CASE("six points, two anchors: graph Laplacian is PSD with L 1 = 0") {
    DenseMatrix x(2, 6);
    x << 0, 0.5, 1, 8, 8.5, 9,
         0, 0.2, 0, 1, 1.2, 1;
    const AnchorGraph g = build_anchor_graph(x, 2, 2, 0);
    const DenseMatrix lg = DenseMatrix::Identity(6, 6) - oracle::dense_s(g);
    CHECK(oracle::min_eigenvalue(lg) >= -1e-8);
    CHECK((lg * Eigen::VectorXd::Ones(6)).norm() < 1e-9);

    std::mt19937_64 rng(1);
    const DenseMatrix m = oracle::random_matrix(3, 6, rng);
    CHECK((apply_affinity(g, m) - m * oracle::dense_s(g)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(apply_affinity(g, DenseMatrix::Zero(3, 6)).isZero(0.0));
}

TEST_CASE("neighbours are the s nearest anchors") {
    std::mt19937_64 rng(9);
    const DenseMatrix x = oracle::random_matrix(3, 80, rng);
    const AnchorGraph g = build_anchor_graph(x, 10, 3, 2);
    for (std::size_t i = 0; i < g.n; ++i) {
        std::vector<std::pair<double, std::uint32_t>> d;
        for (std::uint32_t k = 0; k < g.m; ++k)
            d.emplace_back((g.anchors.col(k) - x.col(static_cast<Eigen::Index>(i))).squaredNorm(), k);
        std::sort(d.begin(), d.end());
        std::vector<std::uint32_t> expect, got;
        for (std::size_t t = 0; t < g.s; ++t) {
            expect.push_back(d[t].second);
            got.push_back(g.neighbor(i, t));
        }
        std::sort(expect.begin(), expect.end());
        std::sort(got.begin(), got.end());
        CHECK(got == expect);
    }
}

TEST_CASE("invalid sizes") {
    const DenseMatrix x = DenseMatrix::Zero(2, 5);
    CHECK_THROWS_AS(build_anchor_graph(x, 6, 1, 0), ConfigError);
    CHECK_THROWS_AS(build_anchor_graph(x, 2, 3, 0), ConfigError);
}

}
