#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "taghash/dataio.hpp"
#include "taghash/errors.hpp"
#include "test_util.hpp"

using namespace taghash;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

// Mutual information in bits between cluster id and each tag indicator,
// averaged over tags.
double mean_tag_mi(const Dataset& ds, std::size_t clusters) {
    const std::size_t n = ds.size();
    double total = 0.0;
    for (std::size_t t = 0; t < ds.tags.rows(); ++t) {
        std::vector<std::array<double, 2>> joint(clusters, {0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) joint[i % clusters][ds.tags.contains(t, i) ? 1 : 0] += 1.0;
        std::array<double, 2> pt{0.0, 0.0};
        for (const auto& row : joint) { pt[0] += row[0]; pt[1] += row[1]; }
        double mi = 0.0;
        for (std::size_t k = 0; k < clusters; ++k) {
            const double pk = (joint[k][0] + joint[k][1]) / n;
            for (int b = 0; b < 2; ++b) {
                const double pj = joint[k][b] / n;
                if (pj > 0) mi += pj * std::log2(pj / (pk * pt[b] / n));
            }
        }
        total += mi;
    }
    return total / ds.tags.rows();
}

}  // namespace

TEST_SUITE("dataio") {

TEST_CASE("csv literal parse") {
    TempDir dir;
    write_file(dir / "m.csv", "1,2\n3,4\n");
    const DenseMatrix m = load_dense_matrix(dir / "m.csv");
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 2);
    CHECK(m(0, 0) == 1);
    CHECK(m(0, 1) == 2);
    CHECK(m(1, 0) == 3);
    CHECK(m(1, 1) == 4);
}

TEST_CASE("csv rejects empty, ragged and non-finite input") {
    TempDir dir;
    write_file(dir / "e.csv", "");
    CHECK_THROWS_AS(load_dense_matrix(dir / "e.csv"), MalformedFile);
    write_file(dir / "r.csv", "1,2\n3\n");
    CHECK_THROWS_AS(load_dense_matrix(dir / "r.csv"), MalformedFile);
    write_file(dir / "n.csv", "1,nan\n");
    CHECK_THROWS_AS(load_dense_matrix(dir / "n.csv"), MalformedFile);
    CHECK_THROWS_AS(load_dense_matrix(dir / "missing.csv"), IoError);
}

TEST_CASE("dense round trip is bit exact in both formats") {
    TempDir dir;
    std::mt19937_64 rng(0);
    for (int trial = 0; trial < 10; ++trial) {
        const DenseMatrix m = oracle::random_matrix(1 + trial % 4, 1 + trial, rng, 1e3);
        write_dense_matrix(dir / "m.csv", m);
        write_dense_matrix(dir / "m.dmat", m);
        const DenseMatrix a = load_dense_matrix(dir / "m.csv");
        const DenseMatrix b = load_dense_matrix(dir / "m.dmat");
        CHECK(a == m);
        CHECK(b == m);
    }
}

TEST_CASE("binary rejects truncation and bad magic") {
    TempDir dir;
    write_dense_matrix(dir / "m.dmat", DenseMatrix::Ones(3, 3));
    std::filesystem::resize_file(dir / "m.dmat", std::filesystem::file_size(dir / "m.dmat") - 8);
    CHECK_THROWS_AS(load_dense_matrix(dir / "m.dmat"), MalformedFile);
    write_file(dir / "x.dmat", "NOTDM1\0\0\0\0");
    CHECK_THROWS_AS(load_dense_matrix(dir / "x.dmat"), MalformedFile);
}

TEST_CASE("sparse triplet parse") {
    TempDir dir;
    write_file(dir / "t.txt", "3 2\n0 0\n2 1\n");
    const auto m = load_sparse_binary(dir / "t.txt");
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 2);
    CHECK(m.column(0).size() == 1);
    CHECK(m.contains(0, 0));
    CHECK(m.contains(2, 1));
    CHECK(m.nnz() == 2);

    write_file(dir / "d.txt", "3 2\n0 0\n2 1\n2 1\n");
    CHECK(load_sparse_binary(dir / "d.txt") == m);

    write_file(dir / "o.txt", "3 2\n3 0\n");
    CHECK_THROWS_AS(load_sparse_binary(dir / "o.txt"), MalformedFile);
    write_file(dir / "neg.txt", "3 2\n-1 0\n");
    CHECK_THROWS_AS(load_sparse_binary(dir / "neg.txt"), MalformedFile);
}

TEST_CASE("sparse round trip") {
    TempDir dir;
    std::mt19937_64 rng(1);
    const auto y = oracle::random_tags(9, 13, 0.25, rng);
    write_sparse_binary(dir / "y.txt", y);
    CHECK(load_sparse_binary(dir / "y.txt") == y);
}

TEST_CASE("zero-noise synthetic data follows the construction") {
    SynthConfig cfg;
    cfg.n = 8;
    cfg.n_clusters = 8;
    cfg.cluster_spread = 0.0;
    cfg.tag_noise_rate = 0.0;
    cfg.seed = 4;
    const Dataset ds = generate_synthetic(cfg);
    REQUIRE(ds.labels);
    std::set<std::vector<double>> distinct;
    for (Eigen::Index i = 0; i < ds.features.cols(); ++i)
        distinct.insert(std::vector<double>(ds.features.col(i).data(), ds.features.col(i).data() + cfg.d));
    CHECK(distinct.size() == 8);
    const std::size_t per = (cfg.c + cfg.n_clusters - 1) / cfg.n_clusters;
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(ds.labels->column(i).size() == 1);
        CHECK(ds.labels->contains(i, i));
        std::set<std::uint32_t> expected;
        for (std::size_t j = 0; j < per; ++j) expected.insert(static_cast<std::uint32_t>((i * per + j) % cfg.c));
        const auto col = ds.tags.column(i);
        CHECK(std::set<std::uint32_t>(col.begin(), col.end()) == expected);
    }
}

TEST_CASE("synthetic generation is deterministic") {
    SynthConfig cfg;
    cfg.n = 300;
    cfg.seed = 11;
    const Dataset a = generate_synthetic(cfg);
    const Dataset b = generate_synthetic(cfg);
    CHECK(a.features == b.features);
    CHECK(a.tags == b.tags);
    CHECK(*a.labels == *b.labels);
    cfg.seed = 12;
    CHECK_FALSE(generate_synthetic(cfg).features == a.features);
}

TEST_CASE("full noise makes tags independent of clusters") {
    SynthConfig cfg;
    cfg.n = 4000;
    cfg.tag_noise_rate = 1.0;
    cfg.seed = 2;
    CHECK(mean_tag_mi(generate_synthetic(cfg), cfg.n_clusters) < 0.05);
    cfg.tag_noise_rate = 0.0;
    CHECK(mean_tag_mi(generate_synthetic(cfg), cfg.n_clusters) > 0.3);
}

TEST_CASE("synth config validation") {
    SynthConfig cfg;
    cfg.tag_noise_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.n_clusters = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("split accounting") {
    SynthConfig cfg;
    cfg.n = 10;
    const Dataset ds = generate_synthetic(cfg);
    const DatasetSplit s = split_dataset(ds, 5, 2, 9);
    CHECK(s.query.size() == 2);
    CHECK(s.retrieval.size() == 8);
    CHECK(s.train.size() == 5);
    const std::set<std::size_t> retr(s.retrieval_idx.begin(), s.retrieval_idx.end());
    for (auto i : s.train_idx) CHECK(retr.count(i) == 1);
    for (auto i : s.query_idx) CHECK(retr.count(i) == 0);
    CHECK(s.train.features.col(0) == ds.features.col(static_cast<Eigen::Index>(s.train_idx[0])));

    const DatasetSplit again = split_dataset(ds, 5, 2, 9);
    CHECK(again.train_idx == s.train_idx);
    CHECK(again.query_idx == s.query_idx);
    CHECK(again.retrieval_idx == s.retrieval_idx);

    CHECK_THROWS_AS(split_dataset(ds, 1, 10, 9), InvalidSplit);
    CHECK_THROWS_AS(split_dataset(ds, 9, 2, 9), InvalidSplit);
}

}
