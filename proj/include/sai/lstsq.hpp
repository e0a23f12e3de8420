#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "sai/csc_matrix.hpp"

namespace sai {

struct LsOptions {
  /// A column is dependent when its incoming diagonal is below
  /// rank_tol * (largest diagonal so far).
  double rank_tol = 1e-12;
  /// Abort with WorkspaceGuardError once the dense factor would exceed this.
  std::size_t workspace_limit_bytes = std::size_t{2} << 30;
};

/** Dense least-squares workspace for one column of a sparse approximate inverse.
 *
 * Minimises || A(:, S) m - e_k || over coefficients on the column set S. Only
 * the rows L touched by A(:, S), plus row k itself, enter the dense problem.
 * The factorisation is a compact Householder QR that grows in place: appending
 * columns brings in new rows, which are zero in every old column, so old
 * reflectors extend by zeros and only the new columns need work.
 *
 * Columns that are numerically dependent on earlier ones stay in the pattern
 * with a zero coefficient and are reported by dependent_columns().
 *
 * The workspace keeps a pointer to A, which must outlive it.
 */
class LsWorkspace {
 public:
  LsWorkspace(const CscMatrix& a, Index k, std::span<const Index> initial_pattern,
              LsOptions options = {});

  /// Adds columns (disjoint from the current pattern) and updates the factor.
  void augment(std::span<const Index> new_cols);

  /// Removes columns and refactors on the reduced pattern.
  void drop_columns(std::span<const Index> drop);

  Index target() const noexcept { return k_; }
  std::size_t pattern_size() const noexcept { return cols_.size(); }
  std::size_t row_count() const noexcept { return rows_.size(); }
  std::size_t rank() const noexcept { return factor_cols_.size(); }

  std::vector<Index> pattern() const;  ///< sorted S
  std::vector<Index> rows() const;     ///< sorted L
  bool contains(Index col) const;

  /// Coefficient of every pattern column (sorted by column), zeros included.
  std::vector<std::pair<Index, double>> coefficients() const;
  /// Solution as a normalised sparse vector of length n (exact zeros removed).
  SparseVector solution() const;

  double residual_norm() const noexcept { return residual_norm_; }
  /// A(:, S) m - e_k, stored on L.
  SparseVector residual() const;

  std::vector<Index> dependent_columns() const;

 private:
  void add_columns(std::span<const Index> new_cols);
  void solve();

  const CscMatrix* a_;
  Index k_;
  LsOptions options_;

  std::vector<Index> cols_;                // insertion order
  std::vector<double> coef_;               // aligned with cols_
  std::vector<bool> dependent_;            // aligned with cols_
  std::vector<Index> rows_;                // local -> global
  std::unordered_map<Index, std::size_t> row_pos_;

  std::vector<std::size_t> factor_cols_;   // factor column -> index into cols_
  std::vector<std::vector<double>> qr_;    // compact Householder storage
  std::vector<double> tau_;
  std::vector<double> qte_;                // Q^T e_k(L)
  double max_diag_ = 0.0;
  double residual_norm_ = 1.0;
};

}  // namespace sai
