#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "taghash/cli.hpp"
#include "taghash/dataio.hpp"
#include "taghash/eval.hpp"
#include "taghash/hash_model.hpp"
#include "taghash/retrieval.hpp"
#include "test_util.hpp"

using namespace taghash;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

// Small dataset so the command round trips stay quick.
void write_small_config(const std::filesystem::path& p) {
    std::ofstream f(p);
    f << "n = 400\nd = 8\nc = 16\nn_clusters = 4\nm = 20\na = 40\nbits = 16\n"
         "query_n = 40\ntrain_n = 200\nmax_iters = 10\n";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth writes deterministic files and validates the config") {
    TempDir dir;
    write_small_config(dir / "s.conf");
    const auto a = (dir / "a").string();
    const auto b = (dir / "b").string();
    CHECK(cli({"synth", "--config", (dir / "s.conf").string(), "--seed", "3", "--out", a}).code == 0);
    CHECK(cli({"synth", "--config", (dir / "s.conf").string(), "--seed", "3", "--out", b}).code == 0);
    for (const char* f : {"features.dmat", "tags.txt", "labels.txt"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(load_dense_matrix(dir / "a" / "features.dmat").cols() == 400);

    std::ofstream(dir / "bad.conf") << "tag_noise = 1.5\n";
    CHECK(cli({"synth", "--config", (dir / "bad.conf").string(), "--out", a}).code == 2);
    std::ofstream(dir / "unk.conf") << "whatever = 1\n";
    CHECK(cli({"synth", "--config", (dir / "unk.conf").string(), "--out", a}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
}

TEST_CASE("train, encode, query, evaluate") {
    TempDir dir;
    write_small_config(dir / "s.conf");
    const auto conf = (dir / "s.conf").string();
    const auto data = dir / "data";
    const auto run = dir / "run";
    REQUIRE(cli({"synth", "--config", conf, "--out", data.string()}).code == 0);
    const std::vector<std::string> paths = {"--features", (data / "features.dmat").string(),
                                            "--tags", (data / "tags.txt").string(),
                                            "--labels", (data / "labels.txt").string()};
    std::vector<std::string> train_args = {"train", "--config", conf, "--out", run.string()};
    train_args.insert(train_args.end(), paths.begin(), paths.end());
    const Run tr = cli(train_args);
    REQUIRE_MESSAGE(tr.code == 0, tr.err);

    const auto report = nlohmann::json::parse(slurp(run / "report.json"));
    CHECK(report["variant"] == "full");
    CHECK(report["objective_history"].size() == report["iterations"].get<std::size_t>());
    CHECK(report["config"]["bits"] == "16");
    CHECK(report["wall_time_seconds"].contains("total"));

    REQUIRE(cli({"encode", "--model", (run / "model.hmod").string(), "--features",
                 (run / "db_features.dmat").string(), "--out", (run / "db.hcod").string()}).code == 0);
    REQUIRE(cli({"encode", "--model", (run / "model.hmod").string(), "--features",
                 (run / "query_features.dmat").string(), "--out", (run / "q.hcod").string()}).code == 0);

    SUBCASE("encoded codes match the model applied directly") {
        const HashModel model = read_model(run / "model.hmod");
        const PackedCodes codes = read_codes(run / "db.hcod");
        CHECK(codes == encode(model, load_dense_matrix(run / "db_features.dmat")));
        CHECK(codes.n == 360);
        CHECK(codes.r == 16);
    }
    SUBCASE("encode rejects the wrong dimension and accepts an empty set") {
        write_dense_matrix(dir / "wrong.dmat", DenseMatrix::Zero(5, 3));
        CHECK(cli({"encode", "--model", (run / "model.hmod").string(), "--features",
                   (dir / "wrong.dmat").string(), "--out", (dir / "w.hcod").string()}).code == 3);
        write_dense_matrix(dir / "empty.dmat", DenseMatrix(8, 0));
        CHECK(cli({"encode", "--model", (run / "model.hmod").string(), "--features",
                   (dir / "empty.dmat").string(), "--out", (dir / "e.hcod").string()}).code == 0);
        CHECK(read_codes(dir / "e.hcod").n == 0);
    }
    SUBCASE("query output agrees with the index") {
        const Run q = cli({"query", "--db", (run / "db.hcod").string(), "--queries",
                           (run / "db.hcod").string(), "--k", "1"});
        REQUIRE(q.code == 0);
        std::istringstream lines(q.out);
        std::string header;
        std::getline(lines, header);
        CHECK(header == "query\trank\tid\tdistance");
        std::size_t qi, rank, id, dist;
        lines >> qi >> rank >> id >> dist;
        CHECK(rank == 1);
        CHECK(dist == 0);

        const Run q2 = cli({"query", "--db", (run / "db.hcod").string(), "--query-features",
                            (run / "query_features.dmat").string(), "--model",
                            (run / "model.hmod").string(), "--k", "5"});
        REQUIRE(q2.code == 0);
        const HammingIndex index(read_codes(run / "db.hcod"));
        const PackedCodes qc = read_codes(run / "q.hcod");
        std::istringstream l2(q2.out);
        std::getline(l2, header);
        for (std::size_t i = 0; i < qc.n; ++i) {
            const auto hits = index.query(qc.code(i), 5);
            for (std::size_t t = 0; t < 5; ++t) {
                l2 >> qi >> rank >> id >> dist;
                CHECK(qi == i);
                CHECK(rank == t + 1);
                CHECK(id == hits[t].id);
                CHECK(dist == hits[t].distance);
            }
        }
        CHECK(cli({"query", "--db", (run / "db.hcod").string(), "--queries",
                   (run / "q.hcod").string(), "--k", "0"}).code == 2);
    }
    SUBCASE("evaluate writes MAP and a 101-point curve") {
        const Run ev = cli({"evaluate", "--db", (run / "db.hcod").string(), "--queries",
                            (run / "q.hcod").string(), "--db-labels", (run / "db_labels.txt").string(),
                            "--query-labels", (run / "query_labels.txt").string(), "--out",
                            (dir / "eval").string()});
        REQUIRE_MESSAGE(ev.code == 0, ev.err);
        std::istringstream pr(slurp(dir / "eval" / "pr.csv"));
        std::string line;
        std::size_t rows = 0;
        std::getline(pr, line);
        CHECK(line == "recall,precision");
        while (std::getline(pr, line)) ++rows;
        CHECK(rows == kPrPoints);

        const HammingIndex index(read_codes(run / "db.hcod"));
        const auto dbl = load_sparse_binary(run / "db_labels.txt");
        const auto ql = load_sparse_binary(run / "query_labels.txt");
        RelevanceJudge judge(ql, dbl);
        const double map = mean_average_precision(index, read_codes(run / "q.hcod"), judge).map;
        CHECK(std::stod(ev.out.substr(ev.out.find('\t') + 1)) == doctest::Approx(map).epsilon(1e-9));
    }
    SUBCASE("relaxed variant and missing inputs") {
        std::vector<std::string> args = {"train", "--config", conf, "--variant", "relaxed",
                                         "--out", (dir / "rel").string()};
        args.insert(args.end(), paths.begin(), paths.end());
        REQUIRE(cli(args).code == 0);
        CHECK(nlohmann::json::parse(slurp(dir / "rel" / "report.json"))["variant"] == "relaxed");

        CHECK(cli({"train", "--config", conf, "--features", (data / "features.dmat").string(),
                   "--tags", (dir / "nope.txt").string(), "--out", (dir / "x").string()}).code == 3);
        CHECK(cli({"train", "--config", conf, "--features", (data / "features.dmat").string(),
                   "--out", (dir / "x").string()}).code == 3);
        CHECK(cli({"train", "--config", conf, "--variant", "bogus", "--features",
                   (data / "features.dmat").string(), "--out", (dir / "x").string()}).code == 2);
        CHECK(cli({"train", "--config", conf, "--features", (data / "features.dmat").string(),
                   "--variant", "no_tags", "--out", (dir / "nt").string()}).code == 0);
    }
    SUBCASE("a huge visual weight overflows to a numerical error") {
        std::vector<std::string> args = {"train", "--config", conf, "--out", (dir / "num").string()};
        args.insert(args.end(), paths.begin(), paths.end());
        std::ofstream(dir / "huge.conf") << "include = s.conf\nalpha = 1e308\nbeta = 1e308\n";
        args[2] = (dir / "huge.conf").string();
        CHECK(cli(args).code == 4);
    }
}

TEST_CASE("ablate produces one row per seed, length and variant") {
    TempDir dir;
    write_small_config(dir / "s.conf");
    const auto conf = (dir / "s.conf").string();
    const auto data = dir / "data";
    REQUIRE(cli({"synth", "--config", conf, "--out", data.string()}).code == 0);
    const std::vector<std::string> args = {
        "ablate", "--config", conf, "--features", (data / "features.dmat").string(), "--tags",
        (data / "tags.txt").string(), "--labels", (data / "labels.txt").string(), "--seeds", "1,2",
        "--bits", "8,16", "--out", (dir / "abl").string()};
    const Run a = cli(args);
    REQUIRE_MESSAGE(a.code == 0, a.err);
    std::istringstream csv(slurp(dir / "abl" / "ablation.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "variant,r,seed,map");
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 2 * 2 * 6);
    const std::string first = slurp(dir / "abl" / "ablation.csv");
    REQUIRE(cli(args).code == 0);
    CHECK(slurp(dir / "abl" / "ablation.csv") == first);
}

}
