#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sai/csc_matrix.hpp"

namespace sai {

/// Residual entries at or below this fraction of the largest one are treated as zero when forming J~.
inline constexpr double kResidualRoundoff = 1e-14;

struct SpaiConfig {
  double delta = 0.4;        ///< column residual tolerance, in (0, 1)
  std::size_t l_max = 20;    ///< augmentation loops
  std::size_t mn = 5;        ///< most profitable indices added per loop
  /// Per-column initial patterns; {k} for every column when empty.
  std::vector<std::vector<Index>> initial_patterns;
  std::size_t threads = 1;
  std::size_t workspace_limit_bytes = std::size_t{2} << 30;

  void validate() const;
};

/// Instrumentation for one augmentation loop of one column.
struct SpaiLoopTrace {
  double residual_norm = 0.0;       ///< before augmentation
  std::size_t residual_rows = 0;    ///< |L|, nonzeros of r_k
  std::size_t candidates = 0;       ///< |J~|
  std::vector<Index> added;
};

struct ColumnResult {
  SparseVector m;
  double residual_norm = 1.0;
  std::size_t loops_used = 0;
  bool converged = false;
  std::vector<Index> initial_pattern;
  std::vector<SpaiLoopTrace> profile;
  std::string error;  ///< non-empty when the column could not be built
};

struct Profit {
  Index j;
  double rho;  ///< norm of r + mu A e_j
  double mu;
};

struct Profitability {
  std::vector<Profit> profits;
  std::vector<Index> skipped;  ///< candidates with A e_j = 0
};

/// J~ = N \ S, N the nonzero columns of A(L, :), L the nonzero rows of r_k.
/// Takes A^T for row access. Sorted.
std::vector<Index> spai_candidates(const CscMatrix& a_transpose, const SparseVector& residual,
                                   std::span<const Index> pattern);

/// One-dimensional residual reduction for every candidate.
Profitability spai_profitability(const CscMatrix& a, std::span<const double> residual,
                                 std::span<const Index> candidates);

/// The mn candidates with smallest rho; ties go to the smaller index. Sorted by index.
std::vector<Index> most_profitable(std::vector<Profit> profits, std::size_t mn);

ColumnResult spai_column(const CscMatrix& a, const CscMatrix& a_transpose, Index k,
                         const SpaiConfig& cfg);
ColumnResult spai_column(const CscMatrix& a, Index k, const SpaiConfig& cfg);

struct SpaiResult {
  CscMatrix m;
  std::vector<ColumnResult> columns;
  std::vector<double> residuals;
  std::size_t n_c = 0;  ///< columns with residual > delta
  std::size_t max_candidates = 0;
};

/// Builds M column by column. Per-column failures are recorded, not thrown,
/// except WorkspaceGuardError which aborts the whole build.
SpaiResult spai(const CscMatrix& a, const SpaiConfig& cfg);

/// Assembles columns into an n_rows x columns.size() matrix.
CscMatrix assemble_columns(Index n_rows, std::span<const SparseVector> columns);

}  // namespace sai
