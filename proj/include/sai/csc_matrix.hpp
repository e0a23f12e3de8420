#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sai {

using Index = std::size_t;

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Sparse vector with strictly increasing indices and no stored zeros.
struct SparseVector {
  Index dim = 0;
  std::vector<Index> indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
  std::vector<double> to_dense() const;

  /// Sorts by index, sums duplicates and purges zeros.
  void normalize();
};

/** Compressed sparse column matrix.
 *
 * Immutable once built. The constructor checks the storage invariants:
 * col_ptr is monotone with col_ptr[0] = 0 and col_ptr[n_cols] = nnz, rows are
 * strictly increasing inside each column, and all values are finite. Explicit
 * zeros are purged.
 */
class CscMatrix {
 public:
  CscMatrix() = default;
  CscMatrix(Index n_rows, Index n_cols);
  CscMatrix(Index n_rows, Index n_cols, std::vector<Index> col_ptr,
            std::vector<Index> row_idx, std::vector<double> values);

  /// Duplicates are summed, zeros dropped, order is irrelevant.
  static CscMatrix from_triplets(Index n_rows, Index n_cols,
                                 std::span<const Triplet> entries);
  static CscMatrix from_dense(const Eigen::MatrixXd& dense);
  static CscMatrix identity(Index n);

  Index rows() const noexcept { return n_rows_; }
  Index cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return row_idx_.size(); }
  bool is_square() const noexcept { return n_rows_ == n_cols_; }

  const std::vector<Index>& col_ptr() const noexcept { return col_ptr_; }
  const std::vector<Index>& row_idx() const noexcept { return row_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const Index> col_rows(Index j) const {
    return {row_idx_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }
  std::span<const double> col_values(Index j) const {
    return {values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }
  std::size_t col_nnz(Index j) const { return col_ptr_[j + 1] - col_ptr_[j]; }

  /// Value at (i, j), zero when not stored. Binary search in column j.
  double coeff(Index i, Index j) const;
  bool has_entry(Index i, Index j) const;

  SparseVector column(Index j) const;
  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const CscMatrix&, const CscMatrix&) = default;

 private:
  void validate_and_purge();

  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

struct ColumnStats {
  std::size_t p = 0;  ///< floor(nnz / n_cols), clamped to >= 1
  std::vector<std::size_t> per_col_nnz;
  std::size_t p_d = 0;
  std::size_t s = 0;
  std::vector<Index> irregular_cols;
  double factor = 10.0;
};

/// Columns with nnz >= factor * p are irregular.
ColumnStats column_stats(const CscMatrix& a, double factor = 10.0);

/// y = A x, accumulated column by column.
std::vector<double> matvec(const CscMatrix& a, std::span<const double> x);
void matvec(const CscMatrix& a, std::span<const double> x, std::span<double> y);

double norm1(const CscMatrix& a);
double norm_inf(const CscMatrix& a);
double frobenius_norm(const CscMatrix& a);

CscMatrix transpose(const CscMatrix& a);

/// Returns P A where row i of the result is row perm[i] of A.
CscMatrix permute_rows(const CscMatrix& a, std::span<const Index> perm);

/// Stable FNV-1a hash over shape, pattern and value bits.
std::uint64_t checksum(const CscMatrix& a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

}  // namespace sai
