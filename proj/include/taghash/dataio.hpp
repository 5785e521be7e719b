#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "taghash/matrix.hpp"

namespace taghash {

struct Dataset {
    DenseMatrix features;               // d x n
    SparseBinaryMatrix tags;            // c x n
    std::optional<SparseBinaryMatrix> labels;  // evaluation only

    std::size_t size() const { return static_cast<std::size_t>(features.cols()); }
    void validate() const;
};

enum class DenseFormat { csv, binary };

// ".csv" selects CSV; anything else is the DMAT1 binary format.
DenseFormat format_for_path(const std::filesystem::path& path);

DenseMatrix load_dense_matrix(const std::filesystem::path& path, DenseFormat format);
DenseMatrix load_dense_matrix(const std::filesystem::path& path);
void write_dense_matrix(const std::filesystem::path& path, const DenseMatrix& m, DenseFormat format);
void write_dense_matrix(const std::filesystem::path& path, const DenseMatrix& m);

SparseBinaryMatrix load_sparse_binary(const std::filesystem::path& path);
void write_sparse_binary(const std::filesystem::path& path, const SparseBinaryMatrix& m);

struct SynthConfig {
    std::size_t n = 4000;
    std::size_t d = 32;
    std::size_t n_clusters = 8;
    std::size_t c = 40;
    double tag_noise_rate = 0.2;
    double cluster_spread = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Planted-cluster dataset. Sample i belongs to cluster i mod n_clusters.
// Cluster k owns tags {(k*T + j) mod c : j < T} with T = ceil(c / n_clusters).
// Each tag slot is independently redrawn with probability tag_noise_rate from
// Bernoulli(T / c), so tag_noise_rate = 1 makes tags independent of clusters.
Dataset generate_synthetic(const SynthConfig& cfg);

struct DatasetSplit {
    Dataset train;
    Dataset retrieval;
    Dataset query;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> retrieval_idx;
    std::vector<std::size_t> query_idx;
};

// Queries are held out; the retrieval set is every non-query sample and the
// training set is drawn from the retrieval set.
DatasetSplit split_dataset(const Dataset& ds, std::size_t train_n, std::size_t query_n,
                           std::uint64_t seed);

Dataset subset(const Dataset& ds, std::span<const std::size_t> idx);

}  // namespace taghash
