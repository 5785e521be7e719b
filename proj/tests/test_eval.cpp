#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "taghash/eval.hpp"

using namespace taghash;

namespace {

SparseBinaryMatrix one_hot(const std::vector<std::uint32_t>& classes, std::size_t k) {
    std::vector<std::vector<std::uint32_t>> cols;
    for (auto c : classes) cols.push_back({c});
    return SparseBinaryMatrix::from_columns(k, cols);
}

// Raw precision at each relevant rank, enveloped from the right, sampled at
// recall t by scanning every rank whose recall reaches t.
std::vector<double> envelope_oracle(const std::vector<bool>& rel) {
    const double total = static_cast<double>(std::count(rel.begin(), rel.end(), true));
    std::vector<double> out;
    for (std::size_t p = 0; p < kPrPoints; ++p) {
        const double t = static_cast<double>(p) / (kPrPoints - 1);
        double best = 0.0;
        int hits = 0;
        for (std::size_t k = 0; k < rel.size(); ++k) {
            hits += rel[k] ? 1 : 0;
            if (hits / total >= t - 1e-12) best = std::max(best, hits / static_cast<double>(k + 1));
        }
        out.push_back(best);
    }
    return out;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("average precision basics") {
    CHECK(average_precision({true, false, true}).value == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(average_precision({true, true, true}).value == 1.0);
    const ApScore none = average_precision({false, false});
    CHECK(none.no_relevant);
    CHECK(none.value == 0.0);
}

TEST_CASE("average precision matches the direct definition") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        std::bernoulli_distribution b(0.3);
        std::vector<bool> rel(1 + t);
        for (auto&& x : rel) x = b(rng);
        CHECK(average_precision(rel).value == doctest::Approx(oracle::direct_ap(rel)).epsilon(1e-12));
    }
}

TEST_CASE("single query MAP is its AP") {
    DenseMatrix db(2, 3);
    db << 1, -1, 1,
          1, 1, -1;
    DenseMatrix q(2, 1);
    q << 1, 1;
    HammingIndex index(pack(db));
    const auto ql = one_hot({0}, 2);
    const auto dbl = one_hot({0, 1, 0}, 2);
    RelevanceJudge judge(ql, dbl);
    const MapReport rep = mean_average_precision(index, pack(q), judge);
    CHECK(rep.map == doctest::Approx(oracle::direct_ap({true, false, true})).epsilon(1e-12));
}

TEST_CASE("perfect separation gives MAP 1") {
    DenseMatrix db(4, 8);
    std::vector<std::uint32_t> cls;
    for (int i = 0; i < 8; ++i) {
        db.col(i) = (i % 2 == 0 ? 1.0 : -1.0) * Eigen::Vector4d::Ones();
        cls.push_back(i % 2);
    }
    HammingIndex index(pack(db));
    const auto dbl = one_hot(cls, 2);
    const DenseMatrix q = db.leftCols(2);
    const auto ql = one_hot({0, 1}, 2);
    RelevanceJudge judge(ql, dbl);
    CHECK(mean_average_precision(index, pack(q), judge).map == 1.0);
    const PrCurve pr = pr_curve(index, pack(q), judge);
    CHECK(pr.points.size() == kPrPoints);
    for (const auto& p : pr.points) CHECK(p.precision == 1.0);
}

TEST_CASE("random codes score near the class prior") {
    std::mt19937_64 rng(2);
    const std::size_t n = 3800, nq = 200;
    std::vector<std::uint32_t> dbc, qc;
    for (std::size_t i = 0; i < n; ++i) dbc.push_back(static_cast<std::uint32_t>(i % 8));
    for (std::size_t i = 0; i < nq; ++i) qc.push_back(static_cast<std::uint32_t>(i % 8));
    const auto dbl = one_hot(dbc, 8);
    const auto ql = one_hot(qc, 8);
    HammingIndex index(pack(oracle::random_signs(32, n, rng)));
    RelevanceJudge judge(ql, dbl);
    const double map = mean_average_precision(index, pack(oracle::random_signs(32, nq, rng)), judge).map;
    CHECK(map == doctest::Approx(0.125).epsilon(0.02 / 0.125));
}

TEST_CASE("identical codes rank by database position") {
    std::vector<std::uint32_t> dbc{0, 1, 1, 0, 2, 0};
    const auto dbl = one_hot(dbc, 3);
    const auto ql = one_hot({0, 1, 2}, 3);
    HammingIndex index(pack(DenseMatrix::Ones(4, 6)));
    RelevanceJudge judge(ql, dbl);
    const MapReport rep = mean_average_precision(index, pack(DenseMatrix::Ones(4, 3)), judge);
    double expect = 0.0;
    for (std::uint32_t c = 0; c < 3; ++c) {
        std::vector<bool> rel;
        for (auto d : dbc) rel.push_back(d == c);
        expect += oracle::direct_ap(rel) / 3.0;
    }
    CHECK(rep.map == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("queries with no relevant items") {
    const auto dbl = one_hot({0, 0}, 2);
    const auto ql = one_hot({0, 1}, 2);
    HammingIndex index(pack(DenseMatrix::Ones(2, 2)));
    RelevanceJudge judge(ql, dbl);
    const PackedCodes q = pack(DenseMatrix::Ones(2, 2));
    const MapReport rep = mean_average_precision(index, q, judge);
    CHECK(rep.zero_relevant_queries == 1);
    CHECK(rep.map == doctest::Approx(0.5));
    CHECK(pr_curve(index, q, judge).excluded_queries == 1);
}

TEST_CASE("cutoff truncates the ranking") {
    std::vector<std::uint32_t> dbc{1, 0, 0, 1};
    const auto dbl = one_hot(dbc, 2);
    const auto ql = one_hot({0}, 2);
    HammingIndex index(pack(DenseMatrix::Ones(2, 4)));
    RelevanceJudge judge(ql, dbl);
    const PackedCodes q = pack(DenseMatrix::Ones(2, 1));
    CHECK(mean_average_precision(index, q, judge, 2).map == doctest::Approx(0.5));
    CHECK(mean_average_precision(index, q, judge, 1).map == 0.0);
}

TEST_CASE("interpolated precision envelope") {
    std::vector<std::vector<bool>> cases = {
        {true, false, true},
        {false, true, false, false, true, true},
        {false, false, false, true},
        {true, true, false, false, false, false, false, true},
    };
    std::mt19937_64 rng(3);
    std::bernoulli_distribution b(0.2);
    for (int t = 0; t < 20; ++t) {
        std::vector<bool> rel(40);
        for (auto&& x : rel) x = b(rng);
        rel[rng() % 40] = true;
        cases.push_back(rel);
    }
    for (const auto& rel : cases) {
        const auto got = interpolated_precision(rel);
        const auto expect = envelope_oracle(rel);
        REQUIRE(got.size() == kPrPoints);
        for (std::size_t p = 0; p < kPrPoints; ++p) CHECK(got[p] == doctest::Approx(expect[p]).epsilon(1e-12));
    }
    CHECK(interpolated_precision({false, false}).empty());
}

}
