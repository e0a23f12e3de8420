#pragma once

#include <string>
#include <vector>

#include "sai/csc_matrix.hpp"

namespace sai {

enum class TolPolicy { adaptive, fixed };

struct PsaiConfig {
  double delta = 0.4;        ///< residual tolerance, in (0, 0.5)
  std::size_t l_max = 10;
  TolPolicy tol_policy = TolPolicy::adaptive;
  double fixed_tol = 0.0;    ///< used when tol_policy == fixed
  bool dropping = true;      ///< false gives the basic procedure (BPSAI)
  std::size_t threads = 1;
  std::size_t workspace_limit_bytes = std::size_t{2} << 30;

  void validate() const;
};

/// Entries removed after the solve of one loop.
struct DropEvent {
  std::size_t loop = 0;
  double tol = 0.0;
  std::size_t nnz_before = 0;  ///< nnz of the freshly solved m_k
  std::vector<std::pair<Index, double>> dropped;
};

struct PsaiColumnResult {
  SparseVector m;
  double residual_norm = 1.0;
  std::size_t loops_used = 0;   ///< l_m for this column
  std::size_t dropped_count = 0;
  bool converged = false;
  std::size_t max_pattern = 0;  ///< largest |S| solved
  std::vector<DropEvent> drops;
  std::string error;
};

/// Adaptive dropping tolerance delta / (nnz(m_k) * ||A||_1).
double psai_tol(double delta, std::size_t nnz_mk, double a_norm1);

/** One column of PSAI(tol).
 *
 * Starting from S = {k} and a = e_k, each loop sets a <- A a, grows
 * S <- P(a) U S, re-solves, then drops every entry |m_jk| <= tol_k (the
 * diagonal position k is never dropped) and re-solves once on the reduced
 * pattern. Dropped positions may come back through P(a) in later loops.
 * The pattern of a is propagated structurally, so numeric cancellation never
 * removes a member.
 */
PsaiColumnResult psai_column(const CscMatrix& a, Index k, const PsaiConfig& cfg, double a_norm1);
PsaiColumnResult psai_column(const CscMatrix& a, Index k, const PsaiConfig& cfg);

/// psai_column with dropping disabled.
PsaiColumnResult bpsai_column(const CscMatrix& a, Index k, PsaiConfig cfg);

struct PsaiResult {
  CscMatrix m;
  std::vector<PsaiColumnResult> columns;
  std::vector<double> residuals;
  std::size_t l_m = 0;  ///< max loops over columns
  std::size_t n_c = 0;  ///< columns with residual > delta
  std::size_t max_pattern = 0;
};

/// Per-column failures are recorded; WorkspaceGuardError aborts the build.
PsaiResult psai(const CscMatrix& a, const PsaiConfig& cfg);

}  // namespace sai
