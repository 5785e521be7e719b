#include "taghash/dataio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "taghash/binary_io.hpp"
#include "taghash/errors.hpp"

namespace taghash {

namespace {

constexpr std::array<char, 6> kDenseMagic = {'D', 'M', 'A', 'T', '1', '\0'};

std::string read_file(const std::filesystem::path& path) { return read_binary_file(path); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_real(std::string_view tok, const std::string& where) {
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
        throw MalformedFile(where + ": cannot parse number '" + std::string(tok) + "'");
    if (!std::isfinite(v)) throw MalformedFile(where + ": non-finite entry");
    return v;
}

DenseMatrix load_csv(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        std::vector<double> row;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            row.push_back(parse_real(line.substr(start, comma - start), where));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw MalformedFile(where + ": row has " + std::to_string(row.size()) +
                                " fields, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw MalformedFile(path.string() + ": empty matrix file");
    DenseMatrix m(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

DenseMatrix load_binary(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    ByteReader reader(bytes, path.string());
    reader.expect_magic(kDenseMagic);
    const std::uint64_t rows = reader.u64();
    const std::uint64_t cols = reader.u64();
    if (rows != 0 && cols > reader.remaining() / 8 / rows)
        throw MalformedFile(path.string() + ": declared dimensions exceed file size");
    if (reader.remaining() != rows * cols * 8)
        throw MalformedFile(path.string() + ": payload size does not match dimensions");
    DenseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    double* data = m.data();
    for (std::uint64_t k = 0; k < rows * cols; ++k) {
        data[k] = reader.f64();
        if (!std::isfinite(data[k])) throw MalformedFile(path.string() + ": non-finite entry");
    }
    return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string format_real(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace

void Dataset::validate() const {
    if (static_cast<std::size_t>(features.cols()) != tags.cols())
        throw DimensionMismatch("features and tags disagree on sample count");
    if (labels && labels->cols() != tags.cols())
        throw DimensionMismatch("labels disagree on sample count");
}

DenseFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? DenseFormat::csv : DenseFormat::binary;
}

DenseMatrix load_dense_matrix(const std::filesystem::path& path, DenseFormat format) {
    return format == DenseFormat::csv ? load_csv(path) : load_binary(path);
}

DenseMatrix load_dense_matrix(const std::filesystem::path& path) {
    return load_dense_matrix(path, format_for_path(path));
}

void write_dense_matrix(const std::filesystem::path& path, const DenseMatrix& m,
                        DenseFormat format) {
    if (!all_finite(m)) throw MalformedFile("refusing to write non-finite matrix");
    if (format == DenseFormat::csv) {
        std::string text;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (j) text += ',';
                text += format_real(m(i, j));
            }
            text += '\n';
        }
        write_text(path, text);
        return;
    }
    ByteWriter w;
    w.magic(kDenseMagic);
    w.u64(static_cast<std::uint64_t>(m.rows()));
    w.u64(static_cast<std::uint64_t>(m.cols()));
    const double* data = m.data();
    for (Eigen::Index k = 0; k < m.size(); ++k) w.f64(data[k]);
    w.save(path);
}

void write_dense_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
    write_dense_matrix(path, m, format_for_path(path));
}

SparseBinaryMatrix load_sparse_binary(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    long long rows = -1;
    long long cols = -1;
    std::vector<std::vector<std::uint32_t>> columns;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        long long a = 0;
        long long b = 0;
        std::string extra;
        if (!(ls >> a >> b) || (ls >> extra))
            throw MalformedFile(path.string() + ":" + std::to_string(line_no) +
                                ": expected two integers");
        if (rows < 0) {
            if (a < 0 || b < 0) throw MalformedFile(path.string() + ": negative dimensions");
            if (a > static_cast<long long>(UINT32_MAX))
                throw MalformedFile(path.string() + ": too many rows");
            rows = a;
            cols = b;
            columns.assign(static_cast<std::size_t>(cols), {});
            continue;
        }
        if (a < 0 || b < 0)
            throw MalformedFile(path.string() + ":" + std::to_string(line_no) + ": negative index");
        if (a >= rows || b >= cols)
            throw MalformedFile(path.string() + ":" + std::to_string(line_no) +
                                ": index out of range");
        columns[static_cast<std::size_t>(b)].push_back(static_cast<std::uint32_t>(a));
    }
    if (rows < 0) throw MalformedFile(path.string() + ": missing header");
    return SparseBinaryMatrix::from_columns(static_cast<std::size_t>(rows), std::move(columns));
}

void write_sparse_binary(const std::filesystem::path& path, const SparseBinaryMatrix& m) {
    std::string text = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (auto i : m.column(j)) text += std::to_string(i) + " " + std::to_string(j) + "\n";
    write_text(path, text);
}

void SynthConfig::validate() const {
    if (n == 0 || d == 0 || c == 0 || n_clusters == 0)
        throw InvalidConfig("synthetic dataset sizes must be positive");
    if (!(tag_noise_rate >= 0.0 && tag_noise_rate <= 1.0))
        throw InvalidConfig("tag_noise_rate must lie in [0, 1]");
    if (!(cluster_spread >= 0.0) || !std::isfinite(cluster_spread))
        throw InvalidConfig("cluster_spread must be a finite non-negative real");
    if (n_clusters > n) throw InvalidConfig("n_clusters exceeds n");
    if (n_clusters > c) throw InvalidConfig("n_clusters exceeds the tag vocabulary size");
}

Dataset generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto d = static_cast<Eigen::Index>(cfg.d);
    const auto k = static_cast<Eigen::Index>(cfg.n_clusters);
    DenseMatrix centers(d, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < d; ++i) centers(i, j) = 4.0 * normal(rng);

    const std::size_t per_cluster = (cfg.c + cfg.n_clusters - 1) / cfg.n_clusters;
    const double tag_density = static_cast<double>(per_cluster) / static_cast<double>(cfg.c);
    std::vector<std::vector<bool>> owned(cfg.n_clusters, std::vector<bool>(cfg.c, false));
    for (std::size_t cl = 0; cl < cfg.n_clusters; ++cl)
        for (std::size_t t = 0; t < per_cluster; ++t) owned[cl][(cl * per_cluster + t) % cfg.c] = true;

    Dataset ds;
    ds.features.resize(d, static_cast<Eigen::Index>(cfg.n));
    std::vector<std::vector<std::uint32_t>> tag_cols(cfg.n);
    std::vector<std::vector<std::uint32_t>> label_cols(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const std::size_t cl = i % cfg.n_clusters;
        auto x = ds.features.col(static_cast<Eigen::Index>(i));
        for (Eigen::Index r = 0; r < d; ++r)
            x(r) = centers(r, static_cast<Eigen::Index>(cl)) + cfg.cluster_spread * normal(rng);
        for (std::size_t t = 0; t < cfg.c; ++t) {
            bool on = owned[cl][t];
            if (unit(rng) < cfg.tag_noise_rate) on = unit(rng) < tag_density;
            if (on) tag_cols[i].push_back(static_cast<std::uint32_t>(t));
        }
        label_cols[i].push_back(static_cast<std::uint32_t>(cl));
    }
    ds.tags = SparseBinaryMatrix::from_columns(cfg.c, std::move(tag_cols));
    ds.labels = SparseBinaryMatrix::from_columns(cfg.n_clusters, std::move(label_cols));
    return ds;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> idx) {
    Dataset out;
    out.features = select_columns(ds.features, idx);
    out.tags = ds.tags.select_columns(idx);
    if (ds.labels) out.labels = ds.labels->select_columns(idx);
    return out;
}

DatasetSplit split_dataset(const Dataset& ds, std::size_t train_n, std::size_t query_n,
                           std::uint64_t seed) {
    ds.validate();
    const std::size_t n = ds.size();
    if (query_n >= n) throw InvalidSplit("query set leaves an empty retrieval set");
    if (train_n + query_n > n) throw InvalidSplit("train_n + query_n exceeds dataset size");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    DatasetSplit s;
    s.query_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(query_n));
    s.train_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(query_n),
                       perm.begin() + static_cast<std::ptrdiff_t>(query_n + train_n));
    s.retrieval_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(query_n), perm.end());
    // Database and query order follow the original sample order.
    std::sort(s.query_idx.begin(), s.query_idx.end());
    std::sort(s.retrieval_idx.begin(), s.retrieval_idx.end());
    std::sort(s.train_idx.begin(), s.train_idx.end());

    s.train = subset(ds, s.train_idx);
    s.retrieval = subset(ds, s.retrieval_idx);
    s.query = subset(ds, s.query_idx);
    return s;
}

}  // namespace taghash
