#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "taghash/alm.hpp"
#include "taghash/anchor_graph.hpp"
#include "taghash/dataio.hpp"
#include "taghash/hash_model.hpp"
#include "taghash/hypergraph.hpp"

namespace taghash {

struct GraphParams {
    std::size_t m = 100;   // anchors
    std::size_t s = 5;     // nearest anchors per sample (clamped to m)
    std::size_t a = 500;   // concepts / hyperedges
    double tag_scale = 1.0;
    std::optional<double> hyper_sigma_sq;
};

// Independent per-stage seeds expanded from one global seed.
struct StageSeeds {
    std::uint64_t dataset;
    std::uint64_t split;
    std::uint64_t anchors;
    std::uint64_t concepts;
    std::uint64_t codes;
};
StageSeeds derive_seeds(std::uint64_t global_seed);

struct TrainedModel {
    std::optional<AnchorGraph> graph;
    std::optional<Hypergraph> hyper;
    TrainResult result;
    HashModel model;
    double graph_seconds = 0.0;
    double optimize_seconds = 0.0;
};

// Builds the graphs a variant needs and runs the optimizer. Takes features
// and tags only; labels never reach training.
TrainedModel train_model(const DenseMatrix& x, const SparseBinaryMatrix* tags,
                         const GraphParams& graph, const TrainParams& params,
                         const StageSeeds& seeds, const FitOptions& fit = {});

// Builds graphs and optimizes using prebuilt operators (shared across variants).
TrainedModel train_with_graphs(const DenseMatrix& x, const SparseBinaryMatrix* tags,
                               const AnchorGraph* graph, const Hypergraph* hyper,
                               const TrainParams& params, const FitOptions& fit = {});

double evaluate_map(const HashModel& model, const Dataset& retrieval, const Dataset& query,
                    std::optional<std::size_t> cutoff = std::nullopt);

struct AblationRow {
    Variant variant;
    std::size_t bits;
    std::uint64_t seed;
    double map;
};

struct AblationSpec {
    std::size_t train_n = 0;
    std::size_t query_n = 0;
    std::vector<Variant> variants;
    std::vector<std::size_t> bits;
    std::vector<std::uint64_t> seeds;
};

// Trains every (seed, bits, variant) combination on a shared per-seed split
// and graphs, and scores each by full-ranking MAP. Rows are ordered by seed,
// then bits, then variant.
std::vector<AblationRow> run_ablation_suite(const Dataset& ds, const GraphParams& graph,
                                            const TrainParams& base, const AblationSpec& spec,
                                            const FitOptions& fit = {});

std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace taghash
