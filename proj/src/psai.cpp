#include "sai/psai.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "sai/errors.hpp"
#include "sai/lstsq.hpp"
#include "sai/spai.hpp"

namespace sai {

void PsaiConfig::validate() const {
  if (!(delta > 0.0 && delta < 0.5)) throw DomainError("psai: delta must lie in (0, 0.5)");
  if (tol_policy == TolPolicy::fixed && !(fixed_tol >= 0.0))
    throw DomainError("psai: fixed tolerance must be non-negative");
}

double psai_tol(double delta, std::size_t nnz_mk, double a_norm1) {
  if (nnz_mk == 0) throw DomainError("psai_tol: nnz(m_k) must be positive");
  if (!(a_norm1 > 0.0)) throw DomainError("psai_tol: ||A||_1 must be positive");
  return delta / (static_cast<double>(nnz_mk) * a_norm1);
}

PsaiColumnResult psai_column(const CscMatrix& a, Index k, const PsaiConfig& cfg, double a_norm1) {
  if (!a.is_square()) throw DomainError("psai: matrix must be square");
  if (k >= a.cols()) throw DomainError("psai: column index out of range");
  if (a.col_nnz(k) == 0)
    throw DegeneratePatternError("psai: column " + std::to_string(k) + " of A is zero");

  LsOptions opts;
  opts.workspace_limit_bytes = cfg.workspace_limit_bytes;
  const Index start[] = {k};
  LsWorkspace ws(a, k, start, opts);

  PsaiColumnResult out;
  out.max_pattern = 1;
  std::vector<Index> reach{k};
  std::vector<char> mark(a.rows(), 0);
  std::size_t loop = 0;
  while (ws.residual_norm() > cfg.delta && loop < cfg.l_max) {
    ++loop;
    // P(A a) from P(a)
    std::vector<Index> next;
    for (Index j : reach)
      for (Index r : a.col_rows(j))
        if (!mark[r]) {
          mark[r] = 1;
          next.push_back(r);
        }
    for (Index r : next) mark[r] = 0;
    std::sort(next.begin(), next.end());
    reach = std::move(next);

    const auto current = ws.pattern();
    std::vector<Index> fresh;
    std::set_difference(reach.begin(), reach.end(), current.begin(), current.end(),
                        std::back_inserter(fresh));
    ws.augment(fresh);
    out.max_pattern = std::max(out.max_pattern, ws.pattern_size());

    if (!cfg.dropping) continue;
    const auto coef = ws.coefficients();
    const auto nnz = static_cast<std::size_t>(
        std::count_if(coef.begin(), coef.end(), [](const auto& c) { return c.second != 0.0; }));
    DropEvent ev;
    ev.loop = loop;
    ev.nnz_before = nnz;
    ev.tol = cfg.tol_policy == TolPolicy::adaptive ? psai_tol(cfg.delta, std::max<std::size_t>(nnz, 1), a_norm1)
                                                   : cfg.fixed_tol;
    std::vector<Index> drop;
    for (const auto& [j, v] : coef) {
      if (j == k) continue;
      if (std::abs(v) <= ev.tol) {
        drop.push_back(j);
        ev.dropped.emplace_back(j, v);
      }
    }
    if (drop.empty()) continue;
    ws.drop_columns(drop);
    out.dropped_count += drop.size();
    out.drops.push_back(std::move(ev));
  }

  out.loops_used = loop;
  out.m = ws.solution();
  out.residual_norm = ws.residual_norm();
  out.converged = out.residual_norm <= cfg.delta;
  return out;
}

PsaiColumnResult psai_column(const CscMatrix& a, Index k, const PsaiConfig& cfg) {
  return psai_column(a, k, cfg, norm1(a));
}

PsaiColumnResult bpsai_column(const CscMatrix& a, Index k, PsaiConfig cfg) {
  cfg.dropping = false;
  return psai_column(a, k, cfg, norm1(a));
}

PsaiResult psai(const CscMatrix& a, const PsaiConfig& cfg) {
  cfg.validate();
  if (!a.is_square()) throw DomainError("psai: matrix must be square");
  const Index n = a.cols();
  const double a1 = norm1(a);

  PsaiResult out;
  out.columns.resize(n);
  detail::parallel_for(n, cfg.threads, [&](std::size_t k) {
    try {
      out.columns[k] = psai_column(a, k, cfg, a1);
    } catch (const WorkspaceGuardError&) {
      throw;
    } catch (const Error& e) {
      PsaiColumnResult failed;
      failed.m.dim = n;
      failed.error = "column " + std::to_string(k) + ": " + e.what();
      out.columns[k] = std::move(failed);
    }
  });

  std::vector<SparseVector> cols;
  cols.reserve(n);
  for (const auto& c : out.columns) {
    cols.push_back(c.m);
    out.residuals.push_back(c.residual_norm);
    out.l_m = std::max(out.l_m, c.loops_used);
    out.max_pattern = std::max(out.max_pattern, c.max_pattern);
    if (c.residual_norm > cfg.delta) ++out.n_c;
  }
  out.m = assemble_columns(n, cols);
  return out;
}

}  // namespace sai
