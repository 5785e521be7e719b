#include "taghash/eval.hpp"

#include <algorithm>

#include "taghash/errors.hpp"
#include "taghash/parallel.hpp"

namespace taghash {

RelevanceJudge::RelevanceJudge(const SparseBinaryMatrix& query_labels,
                               const SparseBinaryMatrix& db_labels)
    : query_(query_labels), db_(db_labels) {}

bool RelevanceJudge::relevant(std::size_t q, std::size_t i) const {
    return columns_intersect(query_, q, db_, i);
}

ApScore average_precision(const std::vector<bool>& ranked_relevance) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t p = 0; p < ranked_relevance.size(); ++p) {
        if (!ranked_relevance[p]) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(p + 1);
    }
    if (hits == 0) return {0.0, true};
    return {sum / static_cast<double>(hits), false};
}

namespace {

void check_inputs(const HammingIndex& index, const PackedCodes& queries, const RelevanceJudge& judge) {
    if (queries.r != index.bits()) throw LengthMismatch("query and database code lengths differ");
    if (judge.queries() != queries.n) throw LengthMismatch("query labels do not match query codes");
    if (judge.database() != index.size()) throw LengthMismatch("database labels do not match index");
}

std::vector<bool> ranked_relevance(const HammingIndex& index, const PackedCodes& queries,
                                   const RelevanceJudge& judge, std::size_t q) {
    const auto order = index.rank_positions(queries.code(q));
    std::vector<bool> rel(order.size());
    for (std::size_t t = 0; t < order.size(); ++t) rel[t] = judge.relevant(q, order[t]);
    return rel;
}

}  // namespace

MapReport mean_average_precision(const HammingIndex& index, const PackedCodes& queries,
                                 const RelevanceJudge& judge, std::optional<std::size_t> cutoff) {
    check_inputs(index, queries, judge);
    if (cutoff && *cutoff == 0) throw InvalidConfig("MAP cutoff must be at least 1");
    MapReport rep;
    rep.per_query.assign(queries.n, 0.0);
    std::vector<char> empty(queries.n, 0);
    parallel_for_chunks(queries.n, 16, [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
            auto rel = ranked_relevance(index, queries, judge, q);
            if (cutoff && rel.size() > *cutoff) rel.resize(*cutoff);
            const ApScore s = average_precision(rel);
            rep.per_query[q] = s.value;
            empty[q] = s.no_relevant ? 1 : 0;
        }
    });
    double total = 0.0;
    for (std::size_t q = 0; q < queries.n; ++q) {
        total += rep.per_query[q];
        rep.zero_relevant_queries += static_cast<std::size_t>(empty[q]);
    }
    rep.map = queries.n ? total / static_cast<double>(queries.n) : 0.0;
    return rep;
}

std::vector<double> interpolated_precision(const std::vector<bool>& rel) {
    const auto total = static_cast<std::size_t>(std::count(rel.begin(), rel.end(), true));
    if (total == 0) return {};
    // Raw (recall, precision) at every rank, then a suffix maximum.
    std::vector<double> recall(rel.size());
    std::vector<double> precision(rel.size());
    std::size_t hits = 0;
    for (std::size_t p = 0; p < rel.size(); ++p) {
        if (rel[p]) ++hits;
        recall[p] = static_cast<double>(hits) / static_cast<double>(total);
        precision[p] = static_cast<double>(hits) / static_cast<double>(p + 1);
    }
    std::vector<double> suffix_max(rel.size());
    double best = 0.0;
    for (std::size_t p = rel.size(); p-- > 0;) {
        best = std::max(best, precision[p]);
        suffix_max[p] = best;
    }
    std::vector<double> out(kPrPoints, 0.0);
    std::size_t p = 0;
    for (std::size_t l = 0; l < kPrPoints; ++l) {
        const double level = static_cast<double>(l) / static_cast<double>(kPrPoints - 1);
        // First rank whose recall reaches the level (recall is non-decreasing).
        while (p < rel.size() && recall[p] < level - 1e-12) ++p;
        out[l] = p < rel.size() ? suffix_max[p] : 0.0;
    }
    return out;
}

PrCurve pr_curve(const HammingIndex& index, const PackedCodes& queries, const RelevanceJudge& judge) {
    check_inputs(index, queries, judge);
    std::vector<std::vector<double>> per_query(queries.n);
    parallel_for_chunks(queries.n, 16, [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q)
            per_query[q] = interpolated_precision(ranked_relevance(index, queries, judge, q));
    });
    PrCurve curve;
    std::vector<double> sum(kPrPoints, 0.0);
    std::size_t used = 0;
    for (const auto& c : per_query) {
        if (c.empty()) {
            ++curve.excluded_queries;
            continue;
        }
        ++used;
        for (std::size_t l = 0; l < kPrPoints; ++l) sum[l] += c[l];
    }
    curve.points.reserve(kPrPoints);
    for (std::size_t l = 0; l < kPrPoints; ++l)
        curve.points.push_back({static_cast<double>(l) / static_cast<double>(kPrPoints - 1),
                                used ? sum[l] / static_cast<double>(used) : 0.0});
    return curve;
}

}  // namespace taghash
