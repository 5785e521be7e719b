#include "taghash/alm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "taghash/errors.hpp"

namespace taghash {

namespace {

struct VariantName {
    Variant v;
    std::string_view name;
};

constexpr VariantName kVariantNames[] = {
    {Variant::full, "full"},
    {Variant::no_direct, "no_direct"},
    {Variant::no_indirect, "no_indirect"},
    {Variant::no_tags, "no_tags"},
    {Variant::no_denoise, "no_denoise"},
    {Variant::relaxed, "relaxed"},
};

void check_shape(const DenseMatrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols)
        throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
}

const SparseBinaryMatrix& require_tags(const SparseBinaryMatrix* tags) {
    if (!tags) throw InvalidConfig("this variant requires a tag matrix");
    return *tags;
}

// Tr(Z Op Z^T) as the elementwise inner product of Z and Z * Op.
double quad_form(const DenseMatrix& left, const DenseMatrix& op_right) {
    return (left.array() * op_right.array()).sum();
}

double l21_columns(const DenseMatrix& m) { return m.colwise().norm().sum(); }

void verify_step(double before, double after, const char* step) {
    if (after > before + 1e-9 * std::max(1.0, std::abs(before)))
        throw NumericalError(std::string("augmented objective increased in ") + step + " step: " +
                             std::to_string(before) + " -> " + std::to_string(after));
}

}  // namespace

std::string_view to_string(Variant v) {
    for (const auto& vn : kVariantNames)
        if (vn.v == v) return vn.name;
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    for (const auto& vn : kVariantNames)
        if (vn.name == name) return vn.v;
    throw InvalidConfig("unknown variant '" + std::string(name) + "'");
}

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> all = {Variant::full,    Variant::no_direct,
                                             Variant::no_indirect, Variant::no_tags,
                                             Variant::no_denoise, Variant::relaxed};
    return all;
}

void TrainParams::validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(nu >= 0.0))
        throw InvalidConfig("alpha, beta and nu must be non-negative");
    if (!(rho > 1.0)) throw InvalidConfig("rho must exceed 1");
    if (!(mu0 > 0.0)) throw InvalidConfig("mu must be positive");
    if (!(mu_max >= mu0)) throw InvalidConfig("mu_max must be at least mu");
    if (r == 0) throw InvalidConfig("code length must be at least 1");
    if (max_outer_iters == 0) throw InvalidConfig("max_outer_iters must be at least 1");
    if (!(rel_tol > 0.0)) throw InvalidConfig("rel_tol must be positive");
    if (!(ridge_eps >= 0.0)) throw InvalidConfig("ridge_eps must be non-negative");
}

bool TrainParams::uses_direct() const {
    return variant != Variant::no_direct && variant != Variant::no_tags;
}

bool TrainParams::uses_l21() const { return uses_direct() && variant != Variant::no_denoise; }

double TrainParams::effective_beta() const { return variant == Variant::no_indirect ? 0.0 : beta; }

DenseMatrix prox_l21_columns(const DenseMatrix& t, double lambda) {
    if (!(lambda >= 0.0)) throw InvalidConfig("prox threshold must be non-negative");
    DenseMatrix out = DenseMatrix::Zero(t.rows(), t.cols());
    for (Eigen::Index i = 0; i < t.cols(); ++i) {
        const double norm = t.col(i).norm();
        if (lambda < norm) out.col(i) = ((norm - lambda) / norm) * t.col(i);
    }
    return out;
}

AlmState initial_state(std::size_t r, std::size_t n, std::size_t c, const TrainParams& params) {
    const auto rr = static_cast<Eigen::Index>(r);
    const auto nn = static_cast<Eigen::Index>(n);
    AlmState st;
    st.z.resize(rr, nn);
    std::mt19937_64 rng(params.seed);
    std::bernoulli_distribution coin(0.5);
    for (Eigen::Index j = 0; j < nn; ++j)
        for (Eigen::Index i = 0; i < rr; ++i) st.z(i, j) = coin(rng) ? 1.0 : -1.0;
    st.b = st.z;
    st.a = DenseMatrix::Zero(rr, nn);
    st.ea = DenseMatrix::Zero(rr, nn);
    st.eb = DenseMatrix::Zero(rr, nn);
    st.p = DenseMatrix::Zero(static_cast<Eigen::Index>(c), rr);
    st.mu = params.mu0;
    return st;
}

DenseMatrix update_a(const AlmState& st, const SparseBinaryMatrix& tags) {
    check_shape(st.p, static_cast<Eigen::Index>(tags.rows()), st.z.rows(), "P");
    check_shape(st.ea, st.z.rows(), st.z.cols(), "E_A");
    const DenseMatrix t = st.z - tags.left_project(st.p) + st.ea / st.mu;
    return prox_l21_columns(t, 1.0 / st.mu);
}

DenseMatrix update_p(const AlmState& st, const SparseBinaryMatrix& tags, const TrainParams& params) {
    if (tags.cols() != static_cast<std::size_t>(st.z.cols()))
        throw DimensionMismatch("update_p: tags and codes disagree on n");
    check_shape(st.a, st.z.rows(), st.z.cols(), "A");
    check_shape(st.ea, st.z.rows(), st.z.cols(), "E_A");
    // (Z^T - A^T + E_A^T / mu) is n x r; Y times it is c x r.
    const DenseMatrix target = st.z - st.a + st.ea / st.mu;
    return solve_ridge(tags.gram(), tags.times_transpose(target), params.ridge_eps);
}

DenseMatrix update_b(const AlmState& st, const GraphOperators& ops, const TrainParams& params) {
    check_shape(st.eb, st.z.rows(), st.z.cols(), "E_B");
    DenseMatrix b = st.z + st.eb / st.mu;
    if (params.alpha > 0.0 && ops.graph) b += (params.alpha / st.mu) * apply_affinity(*ops.graph, st.z);
    const double beta = params.effective_beta();
    if (beta > 0.0 && ops.hyper) b += (beta / st.mu) * apply_hyperkernel(*ops.hyper, st.z);
    return b;
}

DenseMatrix code_argument(const AlmState& st, const SparseBinaryMatrix* tags,
                          const GraphOperators& ops, const DenseMatrix& phi,
                          const TrainParams& params) {
    check_shape(st.b, st.z.rows(), st.z.cols(), "B");
    DenseMatrix arg = st.mu * st.b - st.eb;
    if (params.uses_direct()) {
        const DenseMatrix pty = require_tags(tags).left_project(st.p);
        check_shape(pty, st.z.rows(), st.z.cols(), "P^T Y");
        arg += st.mu * pty;
        if (params.uses_l21()) arg += st.mu * st.a - st.ea;
    }
    if (params.alpha > 0.0 && ops.graph) arg += params.alpha * apply_affinity(*ops.graph, st.b);
    const double beta = params.effective_beta();
    if (beta > 0.0 && ops.hyper) arg += beta * apply_hyperkernel(*ops.hyper, st.b);
    if (params.nu > 0.0) {
        check_shape(phi, st.z.rows(), st.z.cols(), "phi");
        arg += 2.0 * params.nu * phi;
    }
    return arg;
}

DenseMatrix update_z(const AlmState& st, const SparseBinaryMatrix* tags, const GraphOperators& ops,
                     const DenseMatrix& phi, const TrainParams& params) {
    return sign_matrix(code_argument(st, tags, ops, phi, params));
}

void update_multipliers(AlmState& st, const SparseBinaryMatrix* tags, const TrainParams& params) {
    if (params.uses_l21())
        st.ea += st.mu * (st.z - require_tags(tags).left_project(st.p) - st.a);
    st.eb += st.mu * (st.z - st.b);
    st.mu = std::min(params.rho * st.mu, params.mu_max);
}

double objective_raw(const DenseMatrix& z, const DenseMatrix& p, const SparseBinaryMatrix* tags,
                     const GraphOperators& ops, const DenseMatrix& phi, const TrainParams& params) {
    double f = 0.0;
    if (params.uses_direct()) {
        const DenseMatrix resid = z - require_tags(tags).left_project(p);
        f += params.uses_l21() ? l21_columns(resid) : resid.squaredNorm();
    }
    if (params.alpha > 0.0 && ops.graph) f -= params.alpha * quad_form(z, apply_affinity(*ops.graph, z));
    const double beta = params.effective_beta();
    if (beta > 0.0 && ops.hyper) f -= beta * quad_form(z, apply_hyperkernel(*ops.hyper, z));
    if (params.nu > 0.0) {
        check_shape(phi, z.rows(), z.cols(), "phi");
        f += params.nu * (phi - z).squaredNorm();
    }
    return f;
}

double augmented_objective(const AlmState& st, const SparseBinaryMatrix* tags,
                           const GraphOperators& ops, const DenseMatrix& phi,
                           const TrainParams& params) {
    const double mu = st.mu;
    double f = 0.5 * mu * (st.z - st.b + st.eb / mu).squaredNorm();
    if (params.uses_direct()) {
        const DenseMatrix pty = require_tags(tags).left_project(st.p);
        if (params.uses_l21())
            f += l21_columns(st.a) + 0.5 * mu * (st.z - pty - st.a + st.ea / mu).squaredNorm();
        else
            f += 0.5 * mu * (st.z - pty).squaredNorm();
        f += 0.5 * mu * params.ridge_eps * st.p.squaredNorm();
    }
    if (params.alpha > 0.0 && ops.graph) f -= params.alpha * quad_form(st.z, apply_affinity(*ops.graph, st.b));
    const double beta = params.effective_beta();
    if (beta > 0.0 && ops.hyper) f -= beta * quad_form(st.z, apply_hyperkernel(*ops.hyper, st.b));
    if (params.nu > 0.0) f += params.nu * (phi - st.z).squaredNorm();
    return f;
}

DenseMatrix mean_threshold(const DenseMatrix& continuous) {
    const DenseVector mean = continuous.rowwise().mean();
    DenseMatrix out(continuous.rows(), continuous.cols());
    for (Eigen::Index j = 0; j < continuous.cols(); ++j)
        for (Eigen::Index i = 0; i < continuous.rows(); ++i)
            out(i, j) = continuous(i, j) > mean(i) ? 1.0 : -1.0;
    return out;
}

namespace {

TrainResult run_alm(const DenseMatrix& x, const SparseBinaryMatrix* tags, const GraphOperators& ops,
                    const TrainParams& params, const FeatureModelFitter& fitter_in, bool relaxed) {
    params.validate();
    const std::size_t n = static_cast<std::size_t>(x.cols());
    if (n == 0) throw DimensionMismatch("cannot train on zero samples");
    if (params.uses_direct() && !tags) throw InvalidConfig("variant requires tags");
    if (tags && tags->cols() != n) throw DimensionMismatch("tags and features disagree on n");
    if (ops.graph && ops.graph->n != n) throw DimensionMismatch("anchor graph built on a different n");
    if (ops.hyper && ops.hyper->n != n) throw DimensionMismatch("hypergraph built on a different n");
    if (params.variant == Variant::no_tags && ops.hyper && ops.hyper->concepts.rows() != x.rows())
        throw InvalidConfig("no_tags variant requires a hypergraph built on features only");

    const FeatureModelFitter fitter = fitter_in ? fitter_in : FeatureModelFitter(
        [eps = params.ridge_eps](const DenseMatrix& xx, const DenseMatrix& zz) {
            return fit_feature_model(xx, zz, eps);
        });

    const std::size_t c = params.uses_direct() ? tags->rows() : 0;
    AlmState st = initial_state(params.r, n, c, params);
    const auto r = static_cast<Eigen::Index>(params.r);
    const auto nn = static_cast<Eigen::Index>(n);

    FeatureModel fm;
    DenseMatrix phi = DenseMatrix::Zero(r, nn);
    const bool joint = params.nu > 0.0;
    if (joint) {
        fm = fitter(x, st.z);
        phi = fm.outputs(x);
    }

    auto checked = [&](auto&& step, const char* name) {
        if (!params.verify_steps) {
            step();
            return;
        }
        const double before = augmented_objective(st, tags, ops, phi, params);
        step();
        verify_step(before, augmented_objective(st, tags, ops, phi, params), name);
    };

    TrainResult res;
    for (std::size_t it = 0; it < params.max_outer_iters; ++it) {
        if (params.uses_l21()) checked([&] { st.a = update_a(st, *tags); }, "A");
        if (params.uses_direct()) checked([&] { st.p = update_p(st, *tags, params); }, "P");
        checked([&] { st.b = update_b(st, ops, params); }, "B");
        checked([&] {
            const DenseMatrix arg = code_argument(st, tags, ops, phi, params);
            if (relaxed) {
                const double denom = (params.uses_direct() ? 2.0 : 1.0) * st.mu + 2.0 * params.nu;
                st.z = arg / denom;
            } else {
                st.z = sign_matrix(arg);
            }
        }, "Z");
        if (joint) {
            auto refit = [&] {
                fm = fitter(x, st.z);
                phi = fm.outputs(x);
            };
            // Only the identity model is a least-squares fit of Z.
            if (fm.activation == Activation::identity)
                checked(refit, "feature model");
            else
                refit();
        }
        update_multipliers(st, tags, params);
        ++st.iter;

        const double f = objective_raw(st.z, st.p, tags, ops, phi, params);
        if (!std::isfinite(f)) throw NumericalError("objective became non-finite");
        res.objective_history.push_back(f);
        if (res.objective_history.size() >= 2) {
            const double prev = res.objective_history[res.objective_history.size() - 2];
            const double rel = std::abs(f - prev) / std::max(std::abs(prev), 1e-12);
            if (rel < params.rel_tol) {
                res.converged = true;
                break;
            }
        }
    }
    res.iters_used = res.objective_history.size();
    res.p = st.p;
    if (relaxed) {
        res.continuous = st.z;
        res.z = mean_threshold(st.z);
    } else {
        res.z = st.z;
    }
    res.feature_model = fitter(x, res.z);
    return res;
}

}  // namespace

TrainResult train(const DenseMatrix& x, const SparseBinaryMatrix* tags, const GraphOperators& ops,
                  const TrainParams& params, const FeatureModelFitter& fitter) {
    if (params.variant == Variant::relaxed) return train_relaxed(x, tags, ops, params, fitter);
    return run_alm(x, tags, ops, params, fitter, false);
}

TrainResult train_relaxed(const DenseMatrix& x, const SparseBinaryMatrix* tags,
                          const GraphOperators& ops, const TrainParams& params,
                          const FeatureModelFitter& fitter) {
    if (params.variant != Variant::relaxed)
        throw InvalidConfig("train_relaxed requires variant = relaxed");
    return run_alm(x, tags, ops, params, fitter, true);
}

}  // namespace taghash
