#include "taghash/matrix.hpp"

#include <algorithm>
#include <string>

#include "taghash/errors.hpp"

namespace taghash {

bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

SparseBinaryMatrix::SparseBinaryMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), columns_(cols) {}

SparseBinaryMatrix SparseBinaryMatrix::from_columns(
    std::size_t rows, std::vector<std::vector<std::uint32_t>> columns) {
    SparseBinaryMatrix out;
    out.rows_ = rows;
    for (auto& col : columns) {
        std::sort(col.begin(), col.end());
        col.erase(std::unique(col.begin(), col.end()), col.end());
        if (!col.empty() && col.back() >= rows) {
            throw MalformedFile("row index " + std::to_string(col.back()) +
                                " out of range for " + std::to_string(rows) + " rows");
        }
    }
    out.columns_ = std::move(columns);
    return out;
}

std::size_t SparseBinaryMatrix::nnz() const {
    std::size_t total = 0;
    for (const auto& c : columns_) total += c.size();
    return total;
}

bool SparseBinaryMatrix::contains(std::size_t row, std::size_t col) const {
    const auto& c = columns_.at(col);
    return std::binary_search(c.begin(), c.end(), static_cast<std::uint32_t>(row));
}

SparseBinaryMatrix SparseBinaryMatrix::select_columns(std::span<const std::size_t> idx) const {
    SparseBinaryMatrix out(rows_, 0);
    out.columns_.reserve(idx.size());
    for (std::size_t j : idx) out.columns_.push_back(columns_.at(j));
    return out;
}

DenseMatrix SparseBinaryMatrix::to_dense() const {
    DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_),
                                      static_cast<Eigen::Index>(cols()));
    for (std::size_t j = 0; j < cols(); ++j)
        for (auto i : columns_[j]) d(i, static_cast<Eigen::Index>(j)) = 1.0;
    return d;
}

DenseMatrix SparseBinaryMatrix::gram() const {
    const auto c = static_cast<Eigen::Index>(rows_);
    DenseMatrix g = DenseMatrix::Zero(c, c);
    for (const auto& col : columns_)
        for (auto a : col)
            for (auto b : col) g(a, b) += 1.0;
    return g;
}

DenseMatrix SparseBinaryMatrix::times_transpose(const DenseMatrix& m) const {
    if (static_cast<std::size_t>(m.cols()) != cols())
        throw DimensionMismatch("Y * M^T: column counts differ");
    DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_), m.rows());
    for (std::size_t j = 0; j < cols(); ++j) {
        const auto mj = m.col(static_cast<Eigen::Index>(j));
        for (auto i : columns_[j]) out.row(i) += mj.transpose();
    }
    return out;
}

DenseMatrix SparseBinaryMatrix::left_project(const DenseMatrix& p) const {
    if (static_cast<std::size_t>(p.rows()) != rows_)
        throw DimensionMismatch("P^T * Y: P rows must equal tag count");
    DenseMatrix out = DenseMatrix::Zero(p.cols(), static_cast<Eigen::Index>(cols()));
    for (std::size_t j = 0; j < cols(); ++j) {
        auto oj = out.col(static_cast<Eigen::Index>(j));
        for (auto i : columns_[j]) oj += p.row(i).transpose();
    }
    return out;
}

bool columns_intersect(const SparseBinaryMatrix& x, std::size_t a,
                       const SparseBinaryMatrix& y, std::size_t b) {
    auto ca = x.column(a);
    auto cb = y.column(b);
    auto i = ca.begin();
    auto j = cb.begin();
    while (i != ca.end() && j != cb.end()) {
        if (*i == *j) return true;
        if (*i < *j) ++i; else ++j;
    }
    return false;
}

DenseMatrix select_columns(const DenseMatrix& m, std::span<const std::size_t> idx) {
    DenseMatrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = m.col(static_cast<Eigen::Index>(idx[k]));
    return out;
}

DenseMatrix solve_ridge(const DenseMatrix& gram, const DenseMatrix& rhs, double ridge) {
    if (gram.rows() != gram.cols() || gram.rows() != rhs.rows())
        throw DimensionMismatch("solve_ridge: incompatible shapes");
    DenseMatrix g = gram;
    g.diagonal().array() += ridge;
    Eigen::LDLT<DenseMatrix> ldlt(g);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystem("normal equations could not be factorized");
    const DenseVector d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (g.rows() > 0 && (dmax <= 0.0 || d.minCoeff() <= 1e-13 * dmax))
        throw SingularSystem("normal equations are singular; set ridge_eps > 0");
    return ldlt.solve(rhs);
}

}  // namespace taghash
