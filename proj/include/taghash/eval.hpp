#pragma once

#include <array>
#include <optional>
#include <vector>

#include "taghash/matrix.hpp"
#include "taghash/retrieval.hpp"

namespace taghash {

// Query q and database item i are relevant iff their label sets intersect.
class RelevanceJudge {
public:
    RelevanceJudge(const SparseBinaryMatrix& query_labels, const SparseBinaryMatrix& db_labels);
    bool relevant(std::size_t q, std::size_t i) const;
    std::size_t queries() const { return query_.cols(); }
    std::size_t database() const { return db_.cols(); }

private:
    const SparseBinaryMatrix& query_;
    const SparseBinaryMatrix& db_;
};

struct ApScore {
    double value = 0.0;
    bool no_relevant = false;  // value is defined as 0 in that case
};

// Full-ranking AP = (1/R) sum over relevant positions p of (hits up to p) / p.
ApScore average_precision(const std::vector<bool>& ranked_relevance);

struct MapReport {
    double map = 0.0;
    std::vector<double> per_query;
    std::size_t zero_relevant_queries = 0;
};

// With a cutoff, AP is taken over the top-k positions and normalized by the
// number of relevant items found there.
MapReport mean_average_precision(const HammingIndex& index, const PackedCodes& queries,
                                 const RelevanceJudge& judge,
                                 std::optional<std::size_t> cutoff = std::nullopt);

constexpr std::size_t kPrPoints = 101;

struct PrPoint {
    double recall;
    double precision;
};

struct PrCurve {
    std::vector<PrPoint> points;  // recall 0, 0.01, ..., 1
    std::size_t excluded_queries = 0;
};

// Interpolated precision max_{recall' >= t} precision(recall') at each of
// the 101 recall levels, for one ranked list. Empty when nothing is relevant.
std::vector<double> interpolated_precision(const std::vector<bool>& ranked_relevance);

// Per-query interpolated curves averaged over queries with at least one
// relevant item.
PrCurve pr_curve(const HammingIndex& index, const PackedCodes& queries, const RelevanceJudge& judge);

}  // namespace taghash
