#include "sai/spai.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "sai/errors.hpp"
#include "sai/lstsq.hpp"

namespace sai {

void SpaiConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("spai: delta must lie in (0, 1)");
  if (mn < 1) throw DomainError("spai: mn must be at least 1");
}

std::vector<Index> spai_candidates(const CscMatrix& a_transpose, const SparseVector& residual,
                                   std::span<const Index> pattern) {
  std::vector<Index> out;
  for (std::size_t t = 0; t < residual.indices.size(); ++t) {
    if (residual.values[t] == 0.0) continue;
    auto cols = a_transpose.col_rows(residual.indices[t]);
    out.insert(out.end(), cols.begin(), cols.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::vector<Index> sorted_pattern(pattern.begin(), pattern.end());
  std::sort(sorted_pattern.begin(), sorted_pattern.end());
  std::vector<Index> diff;
  std::set_difference(out.begin(), out.end(), sorted_pattern.begin(), sorted_pattern.end(),
                      std::back_inserter(diff));
  return diff;
}

Profitability spai_profitability(const CscMatrix& a, std::span<const double> residual,
                                 std::span<const Index> candidates) {
  if (residual.size() != a.rows()) throw DimensionMismatch("spai_profitability: residual length");
  const double r2 = dot(residual, residual);
  Profitability out;
  out.profits.reserve(candidates.size());
  for (Index j : candidates) {
    double rta = 0.0;
    double a2 = 0.0;
    auto rows = a.col_rows(j);
    auto vals = a.col_values(j);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      rta += residual[rows[t]] * vals[t];
      a2 += vals[t] * vals[t];
    }
    if (a2 == 0.0) {
      out.skipped.push_back(j);
      continue;
    }
    const double rho2 = std::max(0.0, r2 - rta * rta / a2);
    out.profits.push_back({j, std::sqrt(rho2), -rta / a2});
  }
  return out;
}

std::vector<Index> most_profitable(std::vector<Profit> profits, std::size_t mn) {
  auto better = [](const Profit& x, const Profit& y) {
    return x.rho < y.rho || (x.rho == y.rho && x.j < y.j);
  };
  const std::size_t take = std::min(mn, profits.size());
  std::partial_sort(profits.begin(), profits.begin() + static_cast<std::ptrdiff_t>(take),
                    profits.end(), better);
  std::vector<Index> chosen;
  chosen.reserve(take);
  for (std::size_t t = 0; t < take; ++t) chosen.push_back(profits[t].j);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

// Rows whose exact residual is zero can come back as a few ulps after incremental updates.
SparseVector prune_roundoff(SparseVector r) {
  double big = 0.0;
  for (double v : r.values) big = std::max(big, std::abs(v));
  SparseVector out{r.dim, {}, {}};
  for (std::size_t t = 0; t < r.indices.size(); ++t)
    if (std::abs(r.values[t]) > kResidualRoundoff * big) {
      out.indices.push_back(r.indices[t]);
      out.values.push_back(r.values[t]);
    }
  return out;
}


LsWorkspace start_workspace(const CscMatrix& a, const CscMatrix& at, Index k,
                            std::vector<Index> pattern, const LsOptions& opts,
                            std::vector<Index>& used) {
  try {
    used = pattern;
    return LsWorkspace(a, k, pattern, opts);
  } catch (const DegeneratePatternError&) {
  }
  if (!(pattern.size() == 1 && pattern[0] == k)) {
    try {
      used = {k};
      return LsWorkspace(a, k, used, opts);
    } catch (const DegeneratePatternError&) {
    }
  }
  // column k is empty: start from the columns that reach row k
  auto touching = at.col_rows(k);
  used.assign(touching.begin(), touching.end());
  if (used.empty())
    throw DegeneratePatternError("spai: no column of A reaches row " + std::to_string(k));
  return LsWorkspace(a, k, used, opts);
}

}  // namespace

ColumnResult spai_column(const CscMatrix& a, const CscMatrix& a_transpose, Index k,
                         const SpaiConfig& cfg) {
  if (!a.is_square()) throw DomainError("spai: matrix must be square");
  if (k >= a.cols()) throw DomainError("spai: column index out of range");
  std::vector<Index> initial{k};
  if (!cfg.initial_patterns.empty()) initial = cfg.initial_patterns.at(k);
  std::sort(initial.begin(), initial.end());

  LsOptions opts;
  opts.workspace_limit_bytes = cfg.workspace_limit_bytes;
  ColumnResult out;
  LsWorkspace ws = start_workspace(a, a_transpose, k, initial, opts, out.initial_pattern);

  std::vector<double> dense(a.rows(), 0.0);
  for (std::size_t loop = 0;; ++loop) {
    const double res = ws.residual_norm();
    if (res <= cfg.delta || loop == cfg.l_max) break;

    SpaiLoopTrace trace;
    trace.residual_norm = res;
    SparseVector r = prune_roundoff(ws.residual());
    trace.residual_rows = r.nnz();
    auto candidates = spai_candidates(a_transpose, r, ws.pattern());
    trace.candidates = candidates.size();
    if (candidates.empty()) {
      out.profile.push_back(std::move(trace));
      break;
    }
    for (std::size_t t = 0; t < r.indices.size(); ++t) dense[r.indices[t]] = r.values[t];
    auto prof = spai_profitability(a, dense, candidates);
    for (Index i : r.indices) dense[i] = 0.0;

    trace.added = most_profitable(std::move(prof.profits), cfg.mn);
    if (trace.added.empty()) {
      out.profile.push_back(std::move(trace));
      break;
    }
    ws.augment(trace.added);
    out.profile.push_back(std::move(trace));
    out.loops_used = loop + 1;
  }

  out.m = ws.solution();
  out.residual_norm = ws.residual_norm();
  out.converged = out.residual_norm <= cfg.delta;
  return out;
}

ColumnResult spai_column(const CscMatrix& a, Index k, const SpaiConfig& cfg) {
  return spai_column(a, transpose(a), k, cfg);
}

CscMatrix assemble_columns(Index n_rows, std::span<const SparseVector> columns) {
  std::vector<Index> col_ptr{0};
  std::vector<Index> rows;
  std::vector<double> vals;
  for (const auto& c : columns) {
    rows.insert(rows.end(), c.indices.begin(), c.indices.end());
    vals.insert(vals.end(), c.values.begin(), c.values.end());
    col_ptr.push_back(rows.size());
  }
  return CscMatrix(n_rows, columns.size(), std::move(col_ptr), std::move(rows), std::move(vals));
}

SpaiResult spai(const CscMatrix& a, const SpaiConfig& cfg) {
  cfg.validate();
  if (!a.is_square()) throw DomainError("spai: matrix must be square");
  if (!cfg.initial_patterns.empty() && cfg.initial_patterns.size() != a.cols())
    throw DomainError("spai: one initial pattern per column is required");
  const CscMatrix at = transpose(a);
  const Index n = a.cols();

  SpaiResult out;
  out.columns.resize(n);
  detail::parallel_for(n, cfg.threads, [&](std::size_t k) {
    try {
      out.columns[k] = spai_column(a, at, k, cfg);
    } catch (const WorkspaceGuardError&) {
      throw;
    } catch (const Error& e) {
      ColumnResult failed;
      failed.m.dim = n;
      failed.residual_norm = 1.0;  // || -e_k ||
      failed.error = e.what();
      out.columns[k] = std::move(failed);
    }
  });

  std::vector<SparseVector> cols;
  cols.reserve(n);
  out.residuals.reserve(n);
  for (const auto& c : out.columns) {
    cols.push_back(c.m);
    out.residuals.push_back(c.residual_norm);
    if (c.residual_norm > cfg.delta) ++out.n_c;
    for (const auto& t : c.profile) out.max_candidates = std::max(out.max_candidates, t.candidates);
  }
  out.m = assemble_columns(n, cols);
  return out;
}

}  // namespace sai
