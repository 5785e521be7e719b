#include "taghash/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "taghash/config.hpp"
#include "taghash/errors.hpp"
#include "taghash/eval.hpp"
#include "taghash/retrieval.hpp"

namespace fs = std::filesystem;

namespace taghash {

namespace {

struct Overrides {
    std::string config;
    std::string variant;
    std::optional<std::size_t> bits;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string features;
    std::string tags;
    std::string labels;
    std::string variants;
    std::string seeds;
    std::string bits_list;
};

RunConfig resolve(const Overrides& o) {
    RunConfig cfg;
    if (!o.config.empty()) load_config_file(cfg, o.config);
    if (!o.variant.empty()) apply_setting(cfg, "variant", o.variant);
    if (o.bits) cfg.train.r = *o.bits;
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.features.empty()) cfg.features_path = o.features;
    if (!o.tags.empty()) cfg.tags_path = o.tags;
    if (!o.labels.empty()) cfg.labels_path = o.labels;
    if (!o.variants.empty()) apply_setting(cfg, "ablate_variants", o.variants);
    if (!o.seeds.empty()) apply_setting(cfg, "ablate_seeds", o.seeds);
    if (!o.bits_list.empty()) apply_setting(cfg, "ablate_bits", o.bits_list);
    cfg.validate();
    return cfg;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw IoError("cannot write " + path.string());
}

bool variant_reads_tags(Variant v) { return v != Variant::no_tags; }

// Loads the dataset named by the config. Tags are required unless the
// variant ignores them; labels are optional.
Dataset load_dataset(const RunConfig& cfg, bool need_tags, bool need_labels) {
    if (cfg.features_path.empty()) throw InvalidConfig("no features file configured");
    Dataset ds;
    ds.features = load_dense_matrix(cfg.features_path);
    const auto n = static_cast<std::size_t>(ds.features.cols());
    if (!cfg.tags_path.empty()) {
        ds.tags = load_sparse_binary(cfg.tags_path);
    } else if (need_tags) {
        throw IoError("variant '" + std::string(to_string(cfg.train.variant)) +
                      "' needs a tag file but none was configured");
    } else {
        ds.tags = SparseBinaryMatrix(0, n);
    }
    if (!cfg.labels_path.empty()) ds.labels = load_sparse_binary(cfg.labels_path);
    else if (need_labels) throw IoError("no labels file configured");
    ds.validate();
    return ds;
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.resolved()) j[k] = v;
    return j;
}

int cmd_synth(const Overrides& o, std::ostream& out) {
    RunConfig cfg = resolve(o);
    SynthConfig sc = cfg.synth;
    sc.seed = derive_seeds(cfg.seed).dataset;
    const Dataset ds = generate_synthetic(sc);
    const fs::path dir(cfg.out_dir);
    ensure_dir(dir);
    write_dense_matrix(dir / "features.dmat", ds.features, DenseFormat::binary);
    write_sparse_binary(dir / "tags.txt", ds.tags);
    write_sparse_binary(dir / "labels.txt", *ds.labels);
    out << "wrote " << ds.size() << " samples to " << dir.string() << "\n";
    return kExitOk;
}

int cmd_train(const Overrides& o, std::ostream& out) {
    const auto wall0 = std::chrono::steady_clock::now();
    RunConfig cfg = resolve(o);
    const Dataset ds = load_dataset(cfg, variant_reads_tags(cfg.train.variant), false);
    const StageSeeds seeds = derive_seeds(cfg.seed);

    const std::size_t avail = ds.size() >= cfg.query_n ? ds.size() - cfg.query_n : 0;
    const std::size_t train_n = cfg.train_n == 0 ? avail : cfg.train_n;
    const DatasetSplit split = split_dataset(ds, train_n, cfg.query_n, seeds.split);

    const SparseBinaryMatrix* tags = cfg.tags_path.empty() ? nullptr : &split.train.tags;
    const TrainedModel tm = train_model(split.train.features, tags, cfg.graph, cfg.train, seeds, cfg.fit);

    const fs::path dir(cfg.out_dir);
    ensure_dir(dir);
    write_model(dir / "model.hmod", tm.model);
    write_dense_matrix(dir / "db_features.dmat", split.retrieval.features, DenseFormat::binary);
    write_dense_matrix(dir / "query_features.dmat", split.query.features, DenseFormat::binary);
    if (split.retrieval.labels) {
        write_sparse_binary(dir / "db_labels.txt", *split.retrieval.labels);
        write_sparse_binary(dir / "query_labels.txt", *split.query.labels);
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    nlohmann::ordered_json report;
    report["variant"] = std::string(to_string(cfg.train.variant));
    report["bits"] = cfg.train.r;
    report["train_n"] = split.train.size();
    report["retrieval_n"] = split.retrieval.size();
    report["query_n"] = split.query.size();
    report["iterations"] = tm.result.iters_used;
    report["converged"] = tm.result.converged;
    report["objective_history"] = tm.result.objective_history;
    report["wall_time_seconds"] = {
        {"graphs", tm.graph_seconds}, {"optimize", tm.optimize_seconds}, {"total", wall}};
    report["config"] = config_json(cfg);
    write_text(dir / "report.json", report.dump(2) + "\n");

    out << "trained " << to_string(cfg.train.variant) << " r=" << cfg.train.r << " in "
        << tm.result.iters_used << " iterations; model at " << (dir / "model.hmod").string() << "\n";
    return kExitOk;
}

int cmd_encode(const std::string& model_path, const std::string& features_path,
               const std::string& out_path, std::ostream& out) {
    const HashModel model = read_model(model_path);
    const DenseMatrix x = load_dense_matrix(features_path);
    const PackedCodes codes = encode(model, x);
    write_codes(out_path, codes);
    out << "encoded " << codes.n << " items with " << codes.r << " bits\n";
    return kExitOk;
}

PackedCodes query_codes(const std::string& codes_path, const std::string& features_path,
                        const std::string& model_path) {
    if (!codes_path.empty()) return read_codes(codes_path);
    if (features_path.empty() || model_path.empty())
        throw InvalidConfig("query needs --queries, or --query-features with --model");
    return encode(read_model(model_path), load_dense_matrix(features_path));
}

int cmd_query(const std::string& db_path, const PackedCodes& q, std::size_t k,
              const std::string& out_path, std::ostream& out) {
    if (k == 0) throw InvalidConfig("k must be at least 1");
    const HammingIndex index(read_codes(db_path));
    if (q.r != index.bits()) throw DimensionMismatch("query and database code lengths differ");
    std::ostringstream tsv;
    tsv << "query\trank\tid\tdistance\n";
    for (std::size_t i = 0; i < q.n; ++i) {
        const auto hits = index.query(q.code(i), k);
        for (std::size_t rank = 0; rank < hits.size(); ++rank)
            tsv << i << '\t' << rank + 1 << '\t' << hits[rank].id << '\t' << hits[rank].distance << '\n';
    }
    if (out_path.empty()) out << tsv.str();
    else write_text(out_path, tsv.str());
    return kExitOk;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10f", v);
    return buf;
}

int cmd_evaluate(const std::string& db_path, const std::string& q_path, const std::string& db_labels,
                 const std::string& q_labels, std::optional<std::size_t> cutoff,
                 const std::string& out_dir, std::ostream& out) {
    if (cutoff && *cutoff == 0) throw InvalidConfig("k must be at least 1");
    const HammingIndex index(read_codes(db_path));
    const PackedCodes q = read_codes(q_path);
    if (q.r != index.bits()) throw DimensionMismatch("query and database code lengths differ");
    const SparseBinaryMatrix dbl = load_sparse_binary(db_labels);
    const SparseBinaryMatrix ql = load_sparse_binary(q_labels);
    if (dbl.cols() != index.size()) throw LengthMismatch("database labels do not match code count");
    if (ql.cols() != q.n) throw LengthMismatch("query labels do not match code count");
    const RelevanceJudge judge(ql, dbl);

    const MapReport map = mean_average_precision(index, q, judge, cutoff);
    const PrCurve pr = pr_curve(index, q, judge);

    const fs::path dir(out_dir);
    ensure_dir(dir);
    std::string map_csv = "bits,queries,cutoff,zero_relevant_queries,map\n";
    map_csv += std::to_string(index.bits()) + "," + std::to_string(q.n) + "," +
               (cutoff ? std::to_string(*cutoff) : "all") + "," +
               std::to_string(map.zero_relevant_queries) + "," + fmt(map.map) + "\n";
    write_text(dir / "map.csv", map_csv);
    std::string pr_csv = "recall,precision\n";
    for (const auto& p : pr.points) pr_csv += fmt(p.recall) + "," + fmt(p.precision) + "\n";
    write_text(dir / "pr.csv", pr_csv);

    out << "map\t" << fmt(map.map) << "\n";
    return kExitOk;
}

int cmd_ablate(const Overrides& o, std::ostream& out) {
    RunConfig cfg = resolve(o);
    const Dataset ds = load_dataset(cfg, true, true);
    AblationSpec spec;
    spec.query_n = cfg.query_n;
    spec.train_n = cfg.train_n == 0 && ds.size() >= cfg.query_n ? ds.size() - cfg.query_n : cfg.train_n;
    spec.variants = cfg.ablate_variants;
    spec.bits = cfg.ablate_bits.empty() ? std::vector<std::size_t>{cfg.train.r} : cfg.ablate_bits;
    spec.seeds = cfg.ablate_seeds.empty() ? std::vector<std::uint64_t>{cfg.seed} : cfg.ablate_seeds;
    const auto rows = run_ablation_suite(ds, cfg.graph, cfg.train, spec, cfg.fit);
    const fs::path dir(cfg.out_dir);
    ensure_dir(dir);
    const std::string csv = ablation_csv(rows);
    write_text(dir / "ablation.csv", csv);
    out << csv;
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"taghash: tag-supervised binary hashing"};
    app.require_subcommand(1);

    Overrides o;
    const auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "Config file (key = value)");
        sub->add_option("--seed", o.seed, "Global seed");
        sub->add_option("--out", o.out, "Output directory");
    };

    auto* synth = app.add_subcommand("synth", "Generate a planted-cluster dataset");
    add_common(synth);

    auto* train = app.add_subcommand("train", "Learn codes and a hash function");
    add_common(train);
    train->add_option("--variant", o.variant, "full|no_direct|no_indirect|no_tags|no_denoise|relaxed");
    train->add_option("--bits", o.bits, "Code length");
    train->add_option("--features", o.features, "Feature matrix (d x n)");
    train->add_option("--tags", o.tags, "Tag matrix (c x n, triplet text)");
    train->add_option("--labels", o.labels, "Label matrix (evaluation only)");

    std::string model_path, features_path, out_path;
    auto* enc = app.add_subcommand("encode", "Hash a feature matrix");
    enc->add_option("--model", model_path, "Model file")->required();
    enc->add_option("--features", features_path, "Feature matrix")->required();
    enc->add_option("--out", out_path, "Output code file")->required();

    std::string db_path, q_path;
    std::size_t k = 10;
    auto* query = app.add_subcommand("query", "Rank a database for each query code");
    query->add_option("--db", db_path, "Database code file")->required();
    query->add_option("--queries", q_path, "Query code file");
    query->add_option("--query-features", features_path, "Raw query features (with --model)");
    query->add_option("--model", model_path, "Model file for raw query features");
    query->add_option("--k", k, "Neighbors per query");
    query->add_option("--out", out_path, "TSV output file (default stdout)");

    std::string db_labels, q_labels, eval_dir = ".";
    std::optional<std::size_t> cutoff;
    auto* evaluate = app.add_subcommand("evaluate", "MAP and precision-recall");
    evaluate->add_option("--db", db_path, "Database code file")->required();
    evaluate->add_option("--queries", q_path, "Query code file")->required();
    evaluate->add_option("--db-labels", db_labels, "Database labels")->required();
    evaluate->add_option("--query-labels", q_labels, "Query labels")->required();
    evaluate->add_option("--k", cutoff, "MAP cutoff (default: full ranking)");
    evaluate->add_option("--out", eval_dir, "Output directory");

    auto* ablate = app.add_subcommand("ablate", "Train and score every variant");
    add_common(ablate);
    ablate->add_option("--variants", o.variants, "Comma-separated variants");
    ablate->add_option("--seeds", o.seeds, "Comma-separated seeds");
    ablate->add_option("--bits", o.bits_list, "Comma-separated code lengths");
    ablate->add_option("--features", o.features, "Feature matrix");
    ablate->add_option("--tags", o.tags, "Tag matrix");
    ablate->add_option("--labels", o.labels, "Label matrix");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (synth->parsed()) return cmd_synth(o, out);
        if (train->parsed()) return cmd_train(o, out);
        if (enc->parsed()) return cmd_encode(model_path, features_path, out_path, out);
        if (query->parsed())
            return cmd_query(db_path, query_codes(q_path, features_path, model_path), k, out_path, out);
        if (evaluate->parsed())
            return cmd_evaluate(db_path, q_path, db_labels, q_labels, cutoff, eval_dir, out);
        if (ablate->parsed()) return cmd_ablate(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace taghash
