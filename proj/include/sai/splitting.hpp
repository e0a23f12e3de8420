#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sai/csc_matrix.hpp"

namespace sai {

enum class SparsifyStrategy { nearest_diagonal, largest_magnitude };

std::string to_string(SparsifyStrategy s);
SparsifyStrategy parse_strategy(const std::string& name);

struct SplitOptions {
  double factor = 10.0;                 ///< irregular when nnz >= factor * p
  SparsifyStrategy strategy = SparsifyStrategy::nearest_diagonal;
  std::optional<std::size_t> p_kept;    ///< entries kept per irregular column, default p
};

/** A = a_tilde + U V^T with V = (e_{j_1}, ..., e_{j_s}).
 *
 * Column i of U holds exactly the entries dropped from column irregular_cols[i]
 * of A; every other column of a_tilde is copied from A unchanged.
 */
struct SplitSystem {
  CscMatrix a_tilde;
  CscMatrix u;  ///< n x s
  std::vector<Index> irregular_cols;
  SparsifyStrategy strategy = SparsifyStrategy::nearest_diagonal;
  std::size_t p_kept = 0;
  double factor = 10.0;
  ColumnStats stats;

  std::size_t s() const noexcept { return irregular_cols.size(); }
};

/** Splits A into a regular part and a rank-s correction.
 *
 * Each irregular column keeps its diagonal plus the p_kept - 1 off-diagonal
 * entries nearest to the diagonal (ties to the smaller row) or largest in
 * magnitude (ties to the smaller row). Columns with at most p_kept entries are
 * left alone and do not count as irregular. An irregular column without a
 * stored diagonal is an error; permute rows first.
 */
SplitSystem split(const CscMatrix& a, const SplitOptions& options = {});

/// a_tilde + U V^T.
CscMatrix reconstruct(const SplitSystem& sys);

/// beta_i = |a_ii| - sum_{j != i} |a_ij|.
std::vector<double> row_margins(const CscMatrix& a);
/// Same in the column sense.
std::vector<double> col_margins(const CscMatrix& a);

/// Strong connectivity of the off-diagonal pattern digraph.
bool is_irreducible(const CscMatrix& a);

struct MatrixClassReport {
  bool strict_row_dd = false;
  bool strict_col_dd = false;
  bool irreducible = false;
  bool irreducible_row_dd = false;  ///< weak row dominance, one strict row, irreducible
  bool irreducible_col_dd = false;
  bool m_matrix = false;
  bool m_matrix_checked = true;     ///< false above the dense cutoff
  std::vector<double> beta;
  std::vector<double> beta_tilde;   ///< filled by dominance_margins only
};

/// Dense inverse-nonnegativity is used to certify the M-matrix property for
/// n <= dense_cutoff. Above it, only the sufficient test (sign pattern plus
/// strict dominance) is applied and m_matrix_checked is false.
MatrixClassReport classify(const CscMatrix& a, std::size_t dense_cutoff = 500);

struct DominanceMargins {
  std::vector<double> beta;
  std::vector<double> beta_tilde;
  double bound_a = 0.0;        ///< 1 / min beta >= ||A^{-1}||_inf
  double bound_a_tilde = 0.0;
};

/// Both matrices must be strictly row diagonally dominant.
DominanceMargins dominance_margins(const CscMatrix& a, const CscMatrix& a_tilde);

enum class MatrixKind { dominant_row, dominant_col, m_matrix, irreducible_dd };

std::string to_string(MatrixKind k);
MatrixKind parse_matrix_kind(const std::string& name);

struct GeneratorSpec {
  MatrixKind kind = MatrixKind::dominant_row;
  std::size_t n = 10;
  double density = 0.05;             ///< probability of each off-diagonal entry
  std::size_t planted_dense_cols = 0;
  std::uint64_t seed = 0;
};

/// Random sparse matrix in the requested class, with fully dense columns
/// planted before the diagonal is fixed so the class survives.
CscMatrix generate_test_matrix(const GeneratorSpec& spec);

/// kappa_1 from a dense inverse, for n <= cutoff only.
std::optional<double> condition_number_1(const CscMatrix& a, std::size_t cutoff = 500);

}  // namespace sai
