#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taghash/anchor_graph.hpp"
#include "taghash/hash_model.hpp"
#include "taghash/hypergraph.hpp"
#include "taghash/matrix.hpp"

namespace taghash {

// Ablation variants. no_direct drops the tag regression term; no_indirect
// drops the hypergraph term; no_tags drops the regression term and expects a
// hypergraph built on features only; no_denoise replaces the l2,1 tag loss by
// a Frobenius loss; relaxed solves continuous codes and mean-thresholds them.
enum class Variant { full, no_direct, no_indirect, no_tags, no_denoise, relaxed };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);  // throws InvalidConfig
const std::vector<Variant>& all_variants();

struct TrainParams {
    double alpha = 0.01;   // visual graph weight
    double beta = 0.001;   // hypergraph weight
    double nu = 0.001;     // quantization loss weight
    double rho = 1.1;      // penalty growth
    double mu0 = 0.01;
    double mu_max = 1e6;
    std::size_t r = 32;
    std::size_t max_outer_iters = 50;
    double rel_tol = 1e-5;
    double ridge_eps = 1e-6;
    std::uint64_t seed = 0;
    Variant variant = Variant::full;
    // Check after every sub-step that the augmented Lagrangian did not grow;
    // throws NumericalError on violation.
    bool verify_steps = false;

    void validate() const;
    bool uses_direct() const;     // any tag-regression term
    bool uses_l21() const;        // l2,1 tag term with the A / E_A split
    double effective_beta() const;
};

struct AlmState {
    DenseMatrix z;    // r x n, entries +-1 (real-valued under relaxed)
    DenseMatrix a;    // r x n
    DenseMatrix b;    // r x n
    DenseMatrix p;    // c x r
    DenseMatrix ea;   // r x n
    DenseMatrix eb;   // r x n
    double mu = 0.0;
    std::size_t iter = 0;
};

// The graph operators the code step couples through. Either may be null when
// the corresponding weight is zero.
struct GraphOperators {
    const AnchorGraph* graph = nullptr;
    const Hypergraph* hyper = nullptr;
};

using FeatureModelFitter = std::function<FeatureModel(const DenseMatrix& x, const DenseMatrix& z)>;

struct TrainResult {
    DenseMatrix z;                        // r x n, +-1
    DenseMatrix p;                        // c x r
    FeatureModel feature_model;
    std::vector<double> objective_history;
    bool converged = false;
    std::size_t iters_used = 0;
    std::optional<DenseMatrix> continuous;  // relaxed variant only
};

// Column-wise group shrinkage: t -> max(0, 1 - lambda / ||t||) t, with the
// zero column whenever ||t|| <= lambda.
DenseMatrix prox_l21_columns(const DenseMatrix& t, double lambda);

AlmState initial_state(std::size_t r, std::size_t n, std::size_t c, const TrainParams& params);

DenseMatrix update_a(const AlmState& st, const SparseBinaryMatrix& tags);
DenseMatrix update_p(const AlmState& st, const SparseBinaryMatrix& tags, const TrainParams& params);
DenseMatrix update_b(const AlmState& st, const GraphOperators& ops, const TrainParams& params);
// Argument of the sign in the closed-form code step.
DenseMatrix code_argument(const AlmState& st, const SparseBinaryMatrix* tags,
                          const GraphOperators& ops, const DenseMatrix& phi,
                          const TrainParams& params);
DenseMatrix update_z(const AlmState& st, const SparseBinaryMatrix* tags,
                     const GraphOperators& ops, const DenseMatrix& phi, const TrainParams& params);
void update_multipliers(AlmState& st, const SparseBinaryMatrix* tags, const TrainParams& params);

// ||Z - P^T Y||_{2,1} - alpha Tr(Z S Z^T) - beta Tr(Z K Z^T) + nu ||phi - Z||_F^2
// with the terms of disabled components omitted.
double objective_raw(const DenseMatrix& z, const DenseMatrix& p, const SparseBinaryMatrix* tags,
                     const GraphOperators& ops, const DenseMatrix& phi, const TrainParams& params);

// Augmented Lagrangian minimized by each sub-step (includes the ridge term
// mu * eps / 2 * ||P||^2 that the P-step carries).
double augmented_objective(const AlmState& st, const SparseBinaryMatrix* tags,
                           const GraphOperators& ops, const DenseMatrix& phi,
                           const TrainParams& params);

// Alternating updates A, P, B, Z (+ feature model refit when nu > 0), then
// multipliers. `tags` may be null only for variants that do not use them.
TrainResult train(const DenseMatrix& x, const SparseBinaryMatrix* tags, const GraphOperators& ops,
                  const TrainParams& params, const FeatureModelFitter& fitter = {});

// Same cycle with a continuous code step; codes are binarized per bit at the
// row mean after the loop.
TrainResult train_relaxed(const DenseMatrix& x, const SparseBinaryMatrix* tags,
                          const GraphOperators& ops, const TrainParams& params,
                          const FeatureModelFitter& fitter = {});

// Per-row mean thresholding: +1 iff value > row mean.
DenseMatrix mean_threshold(const DenseMatrix& continuous);

}  // namespace taghash
