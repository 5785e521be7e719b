#include "taghash/pipeline.hpp"

#include <chrono>
#include <cstdio>

#include "taghash/errors.hpp"
#include "taghash/eval.hpp"
#include "taghash/retrieval.hpp"

namespace taghash {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool needs_hypergraph(const TrainParams& p) { return p.effective_beta() > 0.0; }
bool hypergraph_uses_tags(const TrainParams& p) { return p.variant != Variant::no_tags; }

}  // namespace

StageSeeds derive_seeds(std::uint64_t global_seed) {
    const std::uint64_t base = splitmix64(global_seed);
    return {splitmix64(base ^ 1), splitmix64(base ^ 2), splitmix64(base ^ 3),
            splitmix64(base ^ 4), splitmix64(base ^ 5)};
}

TrainedModel train_with_graphs(const DenseMatrix& x, const SparseBinaryMatrix* tags,
                               const AnchorGraph* graph, const Hypergraph* hyper,
                               const TrainParams& params, const FitOptions& fit) {
    TrainedModel tm;
    const auto t0 = std::chrono::steady_clock::now();
    FeatureModelFitter fitter = [&](const DenseMatrix& xx, const DenseMatrix& zz) {
        return fit_feature_model(xx, zz, params.ridge_eps, fit);
    };
    tm.result = train(x, params.uses_direct() ? tags : nullptr, {graph, hyper}, params, fitter);
    tm.model.feature_model = tm.result.feature_model;
    tm.optimize_seconds = seconds_since(t0);
    return tm;
}

TrainedModel train_model(const DenseMatrix& x, const SparseBinaryMatrix* tags,
                         const GraphParams& gp, const TrainParams& params,
                         const StageSeeds& seeds, const FitOptions& fit) {
    params.validate();
    if (params.variant != Variant::no_tags && !tags)
        throw DataError("variant '" + std::string(to_string(params.variant)) + "' requires tags");
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<AnchorGraph> graph;
    std::optional<Hypergraph> hyper;
    if (params.alpha > 0.0)
        graph = build_anchor_graph(x, gp.m, std::min(gp.s, gp.m), seeds.anchors);
    if (needs_hypergraph(params)) {
        HypergraphOptions ho{gp.a, seeds.concepts, gp.tag_scale, gp.hyper_sigma_sq};
        hyper = build_hypergraph(x, hypergraph_uses_tags(params) ? tags : nullptr, ho);
    }
    const double graph_seconds = seconds_since(t0);

    TrainParams p = params;
    p.seed = seeds.codes;
    TrainedModel tm = train_with_graphs(x, tags, graph ? &*graph : nullptr,
                                        hyper ? &*hyper : nullptr, p, fit);
    tm.graph = std::move(graph);
    tm.hyper = std::move(hyper);
    tm.graph_seconds = graph_seconds;
    return tm;
}

double evaluate_map(const HashModel& model, const Dataset& retrieval, const Dataset& query,
                    std::optional<std::size_t> cutoff) {
    if (!retrieval.labels || !query.labels) throw DataError("evaluation requires labels");
    HammingIndex index(encode(model, retrieval.features));
    const PackedCodes q = encode(model, query.features);
    RelevanceJudge judge(*query.labels, *retrieval.labels);
    return mean_average_precision(index, q, judge, cutoff).map;
}

std::vector<AblationRow> run_ablation_suite(const Dataset& ds, const GraphParams& gp,
                                            const TrainParams& base, const AblationSpec& spec,
                                            const FitOptions& fit) {
    if (!ds.labels) throw DataError("ablation requires labels");
    base.validate();
    std::vector<AblationRow> rows;
    for (std::uint64_t seed : spec.seeds) {
        const StageSeeds ss = derive_seeds(seed);
        const DatasetSplit split = split_dataset(ds, spec.train_n, spec.query_n, ss.split);
        const DenseMatrix& x = split.train.features;
        const SparseBinaryMatrix* tags = &split.train.tags;

        std::optional<AnchorGraph> graph;
        std::optional<Hypergraph> hyper_tags;
        std::optional<Hypergraph> hyper_plain;
        if (base.alpha > 0.0) graph = build_anchor_graph(x, gp.m, std::min(gp.s, gp.m), ss.anchors);
        for (Variant v : spec.variants) {
            TrainParams p = base;
            p.variant = v;
            if (!needs_hypergraph(p)) continue;
            auto& slot = hypergraph_uses_tags(p) ? hyper_tags : hyper_plain;
            if (!slot)
                slot = build_hypergraph(x, hypergraph_uses_tags(p) ? tags : nullptr,
                                        {gp.a, ss.concepts, gp.tag_scale, gp.hyper_sigma_sq});
        }

        for (std::size_t bits : spec.bits) {
            for (Variant v : spec.variants) {
                TrainParams p = base;
                p.variant = v;
                p.r = bits;
                p.seed = ss.codes;
                const Hypergraph* hg = nullptr;
                if (needs_hypergraph(p)) hg = hypergraph_uses_tags(p) ? &*hyper_tags : &*hyper_plain;
                const TrainedModel tm =
                    train_with_graphs(x, tags, graph ? &*graph : nullptr, hg, p, fit);
                rows.push_back({v, bits, seed, evaluate_map(tm.model, split.retrieval, split.query)});
            }
        }
    }
    return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::string out = "variant,r,seed,map\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.10f", row.map);
        out += std::string(to_string(row.variant)) + "," + std::to_string(row.bits) + "," +
               std::to_string(row.seed) + "," + buf + "\n";
    }
    return out;
}

}  // namespace taghash
