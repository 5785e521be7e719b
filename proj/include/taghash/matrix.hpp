#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace taghash {

// Column-major real matrix; samples are columns (features are d x n).
using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;

bool all_finite(const DenseMatrix& m);

// Binary matrix stored as sorted per-column row-index lists. Used for the
// tag matrix (c x n) and the evaluation label matrix.
class SparseBinaryMatrix {
public:
    SparseBinaryMatrix() = default;
    SparseBinaryMatrix(std::size_t rows, std::size_t cols);

    // Indices are sorted and deduplicated; throws MalformedFile when an
    // index is out of range.
    static SparseBinaryMatrix from_columns(std::size_t rows,
                                           std::vector<std::vector<std::uint32_t>> columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    std::size_t nnz() const;

    std::span<const std::uint32_t> column(std::size_t j) const { return columns_[j]; }
    bool contains(std::size_t row, std::size_t col) const;

    SparseBinaryMatrix select_columns(std::span<const std::size_t> idx) const;
    DenseMatrix to_dense() const;

    // Y * Y^T (rows x rows).
    DenseMatrix gram() const;
    // Y * M^T for M with cols() columns; result rows() x M.rows().
    DenseMatrix times_transpose(const DenseMatrix& m) const;
    // P^T * Y for P of shape rows() x r; result r x cols().
    DenseMatrix left_project(const DenseMatrix& p) const;

    bool operator==(const SparseBinaryMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::vector<std::vector<std::uint32_t>> columns_;
};

// True when column `a` of `x` and column `b` of `y` share at least one index.
bool columns_intersect(const SparseBinaryMatrix& x, std::size_t a,
                       const SparseBinaryMatrix& y, std::size_t b);

DenseMatrix select_columns(const DenseMatrix& m, std::span<const std::size_t> idx);

// Solves (G + ridge I) X = rhs for symmetric PSD G. Throws SingularSystem
// when the regularized system is not positive definite.
DenseMatrix solve_ridge(const DenseMatrix& gram, const DenseMatrix& rhs, double ridge);

}  // namespace taghash
