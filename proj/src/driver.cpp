#include "sai/driver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "sai/errors.hpp"
#include "sai/matching.hpp"

namespace sai {

std::string to_string(Method m) { return m == Method::spai ? "spai" : "psai"; }

Method parse_method(const std::string& name) {
  if (name == "spai") return Method::spai;
  if (name == "psai") return Method::psai;
  throw DomainError("unknown method '" + name + "'");
}

std::string to_string(PermutePolicy p) {
  switch (p) {
    case PermutePolicy::automatic: return "auto";
    case PermutePolicy::always: return "always";
    case PermutePolicy::never: return "never";
  }
  return "?";
}

PermutePolicy parse_permute_policy(const std::string& name) {
  if (name == "auto") return PermutePolicy::automatic;
  if (name == "always") return PermutePolicy::always;
  if (name == "never") return PermutePolicy::never;
  throw DomainError("unknown permutation policy '" + name + "'");
}

void DriverConfig::validate() const {
  if (!(epsilon > 0.0)) throw DomainError("driver: epsilon must be positive");
  if (!(c_value > 0.0)) throw DomainError("driver: c must be positive");
  if (method == Method::spai)
    spai.validate();
  else
    psai.validate();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Capacitance {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double condition = 1.0;
};

Capacitance factor_capacitance(const Eigen::MatrixXd& cap) {
  Capacitance out;
  if (cap.rows() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cap);
  const auto& sv = svd.singularValues();
  out.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                           : std::numeric_limits<double>::infinity();
  out.lu.compute(cap);
  const double scale = cap.cwiseAbs().maxCoeff();
  const double min_pivot = out.lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > 1e-14 * scale))
    throw SingularUpdateError("capacitance matrix I + V^T W is singular (condition estimate " +
                                  std::to_string(out.condition) + ")",
                              out.condition);
  return out;
}

}  // namespace

Assembly assemble_solution(std::span<const double> y_hat, const Eigen::MatrixXd& w_hat,
                           std::span<const Index> irregular_cols) {
  const auto n = static_cast<Eigen::Index>(y_hat.size());
  const auto s = static_cast<Eigen::Index>(irregular_cols.size());
  if (w_hat.rows() != n || w_hat.cols() != s) throw DimensionMismatch("assemble_solution: W shape");
  Assembly out;
  out.x_hat.assign(y_hat.begin(), y_hat.end());
  if (s == 0) return out;

  Eigen::MatrixXd cap = Eigen::MatrixXd::Identity(s, s);
  Eigen::VectorXd vty(s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto row = static_cast<Eigen::Index>(irregular_cols[static_cast<std::size_t>(i)]);
    if (row >= n) throw DomainError("assemble_solution: irregular column out of range");
    cap.row(i) += w_hat.row(row);
    vty(i) = y_hat[static_cast<std::size_t>(row)];
  }
  auto fac = factor_capacitance(cap);
  out.condition = fac.condition;
  const Eigen::VectorXd z = fac.lu.solve(vty);
  out.c = z.norm();
  const Eigen::VectorXd wz = w_hat * z;
  for (Eigen::Index i = 0; i < n; ++i) out.x_hat[static_cast<std::size_t>(i)] -= wz(i);
  return out;
}

std::vector<double> smw_inverse_apply(const DenseSolve& a_tilde_solve, const CscMatrix& u,
                                      std::span<const Index> irregular_cols,
                                      std::span<const double> b) {
  if (u.cols() != irregular_cols.size()) throw DimensionMismatch("smw_inverse_apply: U width");
  const std::size_t n = b.size();
  std::vector<double> y = a_tilde_solve(b);
  Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(u.cols()));
  for (Index t = 0; t < u.cols(); ++t) {
    auto wt = a_tilde_solve(u.column(t).to_dense());
    for (std::size_t i = 0; i < n; ++i) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = wt[i];
  }
  return assemble_solution(y, w, irregular_cols).x_hat;
}

SubsystemTolerances subsystem_tolerances(double epsilon, std::size_t s, double c, double norm_b,
                                         std::span<const double> norm_u) {
  if (!(epsilon > 0.0)) throw DomainError("subsystem_tolerances: epsilon must be positive");
  if (!(c > 0.0)) throw DomainError("subsystem_tolerances: c must be positive");
  if (!(norm_b > 0.0)) throw DomainError("subsystem_tolerances: ||b|| must be positive");
  if (norm_u.size() != s) throw DimensionMismatch("subsystem_tolerances: one norm per u_j");
  SubsystemTolerances out;
  out.tol_y = epsilon / 2.0;
  const double root_s = std::sqrt(static_cast<double>(s));
  for (double nu : norm_u) {
    if (!(nu > 0.0)) throw DomainError("subsystem_tolerances: ||u_j|| must be positive");
    out.tol_w.push_back(epsilon * norm_b / (2.0 * root_s * c * nu));
  }
  return out;
}

CscMatrix build_preconditioner(const CscMatrix& a, const DriverConfig& cfg, PreconditionerStats& stats) {
  const auto t0 = Clock::now();
  stats.method = cfg.method;
  CscMatrix m;
  if (cfg.method == Method::spai) {
    SpaiConfig sc = cfg.spai;
    sc.threads = cfg.threads;
    auto res = spai(a, sc);
    stats.n_c = res.n_c;
    stats.max_candidates = res.max_candidates;
    for (const auto& c : res.columns) stats.l_m = std::max(stats.l_m, c.loops_used);
    m = std::move(res.m);
  } else {
    PsaiConfig pc = cfg.psai;
    pc.threads = cfg.threads;
    auto res = psai(a, pc);
    stats.n_c = res.n_c;
    stats.l_m = res.l_m;
    stats.max_pattern = res.max_pattern;
    m = std::move(res.m);
  }
  stats.setup_seconds = seconds_since(t0);
  stats.nnz = m.nnz();
  stats.spar = a.nnz() > 0 ? static_cast<double>(m.nnz()) / static_cast<double>(a.nnz()) : 0.0;
  stats.checksum = checksum(m);
  return m;
}

namespace {

struct Prepared {
  CscMatrix a;
  std::vector<double> b;
  bool permuted = false;
};

Prepared prepare(const CscMatrix& a, std::span<const double> b, const DriverConfig& cfg) {
  Prepared p{a, {b.begin(), b.end()}, false};
  const bool want = cfg.permute == PermutePolicy::always ||
                    (cfg.permute == PermutePolicy::automatic && !has_zero_free_diagonal(a));
  if (!want) return p;
  auto perm = zero_free_diagonal_permutation(a);
  if (is_identity_permutation(perm)) return p;
  p.a = permute_rows(a, perm);
  for (std::size_t i = 0; i < perm.size(); ++i) p.b[i] = b[perm[i]];
  p.permuted = true;
  return p;
}

void check_inputs(const CscMatrix& a, std::span<const double> b, const DriverConfig& cfg) {
  cfg.validate();
  if (!a.is_square()) throw DomainError("driver: matrix must be square");
  if (b.size() != a.rows()) throw DimensionMismatch("driver: right-hand side length");
  for (double v : b)
    if (!std::isfinite(v)) throw DomainError("driver: right-hand side is not finite");
  if (cfg.preconditioner && (cfg.preconditioner->rows() != a.rows() || cfg.preconditioner->cols() != a.cols()))
    throw DimensionMismatch("driver: supplied preconditioner has the wrong shape");
}

CscMatrix obtain_preconditioner(const CscMatrix& target, const DriverConfig& cfg, PreconditionerStats& stats) {
  if (!cfg.preconditioner) return build_preconditioner(target, cfg, stats);
  stats.method = cfg.method;
  stats.reused = true;
  stats.nnz = cfg.preconditioner->nnz();
  stats.spar = static_cast<double>(stats.nnz) / static_cast<double>(std::max<std::size_t>(1, target.nnz()));
  stats.checksum = checksum(*cfg.preconditioner);
  return *cfg.preconditioner;
}

void finish_report(SolveReport& rep, const CscMatrix& a, std::span<const double> b, double norm_b) {
  auto ax = matvec(a, rep.x_hat);
  double r2 = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) r2 += (b[i] - ax[i]) * (b[i] - ax[i]);
  rep.rr = std::sqrt(r2) / norm_b;
  rep.a = rep.rr / rep.epsilon;
  rep.max_iter_used = rep.iter_y;
  for (auto it : rep.iter_w) rep.max_iter_used = std::max(rep.max_iter_used, it);
  rep.subsystems_converged = rep.flag_y == SolveFlag::converged;
  for (auto f : rep.flag_w) rep.subsystems_converged = rep.subsystems_converged && f == SolveFlag::converged;
}

}  // namespace

SolveReport solve_irregular(const CscMatrix& a, std::span<const double> b, const DriverConfig& cfg) {
  check_inputs(a, b, cfg);
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.epsilon = cfg.epsilon;
  rep.n = a.rows();
  rep.nnz_a = a.nnz();
  const double norm_b = norm2(b);
  if (norm_b == 0.0) {
    rep.x_hat.assign(a.rows(), 0.0);
    rep.nnz_a_tilde = a.nnz();
    return rep;
  }

  Prepared prep = prepare(a, b, cfg);
  rep.permuted = prep.permuted;
  SplitSystem sys = split(prep.a, cfg.split);
  rep.nnz_a_tilde = sys.a_tilde.nnz();
  rep.s = sys.s();
  rep.irregular_cols = sys.irregular_cols;

  const CscMatrix m = obtain_preconditioner(sys.a_tilde, cfg, rep.precond);
  const LinearOperator op = make_operator(sys.a_tilde);
  const LinearOperator pre = make_operator(m);
  const std::size_t s = rep.s;
  const auto n = prep.a.rows();

  std::vector<std::vector<double>> u_cols(s);
  std::vector<double> norm_u(s);
  for (std::size_t t = 0; t < s; ++t) {
    u_cols[t] = sys.u.column(t).to_dense();
    norm_u[t] = norm2(u_cols[t]);
  }
  if (s == 0) {
    rep.tol_y = cfg.epsilon;
  } else {
    auto tols = subsystem_tolerances(cfg.epsilon, s, cfg.c_value, norm_b, norm_u);
    rep.tol_y = tols.tol_y;
    rep.tol_w = tols.tol_w;
  }

  std::vector<SolveOutcome> outcomes(s + 1);
  const std::vector<double> zero(n, 0.0);
  detail::parallel_for(s + 1, cfg.threads, [&](std::size_t task) {
    BicgstabOptions opt;
    opt.max_iter = cfg.max_iter;
    if (task == 0) {
      opt.tol = rep.tol_y;
      outcomes[0] = bicgstab(op, &pre, prep.b, zero, opt);
    } else {
      opt.tol = rep.tol_w[task - 1];
      outcomes[task] = bicgstab(op, &pre, u_cols[task - 1], zero, opt);
    }
  });

  Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s));
  auto load_w = [&](std::size_t t) {
    for (std::size_t i = 0; i < n; ++i)
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = outcomes[t + 1].x[i];
  };
  for (std::size_t t = 0; t < s; ++t) load_w(t);
  Assembly asm_out = assemble_solution(outcomes[0].x, w, sys.irregular_cols);
  rep.iter_w.assign(s, 0);
  for (std::size_t t = 0; t < s; ++t) rep.iter_w[t] = outcomes[t + 1].iterations;

  if (cfg.c_policy == CPolicy::posthoc && s > 0) {
    // tighten the w solves until they meet the tolerance built from the exact c
    for (std::size_t pass = 0; pass < cfg.max_posthoc_passes; ++pass) {
      const double c = std::max(asm_out.c, 1e-300);
      auto exact = subsystem_tolerances(cfg.epsilon, s, c, norm_b, norm_u);
      std::vector<std::size_t> redo;
      for (std::size_t t = 0; t < s; ++t)
        if (!(outcomes[t + 1].rel_residual < exact.tol_w[t])) redo.push_back(t);
      if (redo.empty()) break;
      ++rep.posthoc_passes;
      detail::parallel_for(redo.size(), cfg.threads, [&](std::size_t r) {
        const std::size_t t = redo[r];
        BicgstabOptions opt;
        opt.max_iter = cfg.max_iter;
        opt.tol = 0.9 * exact.tol_w[t];
        rep.tol_w[t] = opt.tol;
        outcomes[t + 1] = bicgstab(op, &pre, u_cols[t], outcomes[t + 1].x, opt);
      });
      for (std::size_t t : redo) {
        load_w(t);
        rep.iter_w[t] += outcomes[t + 1].iterations;
      }
      asm_out = assemble_solution(outcomes[0].x, w, sys.irregular_cols);
    }
  }

  rep.x_hat = std::move(asm_out.x_hat);
  rep.c = asm_out.c;
  rep.small_system_condition = asm_out.condition;
  rep.iter_y = outcomes[0].iterations;
  rep.flag_y = outcomes[0].flag;
  rep.res_y = outcomes[0].rel_residual;
  for (std::size_t t = 0; t < s; ++t) {
    rep.flag_w.push_back(outcomes[t + 1].flag);
    rep.res_w.push_back(outcomes[t + 1].rel_residual);
  }
  finish_report(rep, a, b, norm_b);
  rep.solve_seconds = seconds_since(t0) - rep.precond.setup_seconds;
  return rep;
}

SolveReport solve_standard(const CscMatrix& a, std::span<const double> b, const DriverConfig& cfg) {
  check_inputs(a, b, cfg);
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.epsilon = cfg.epsilon;
  rep.n = a.rows();
  rep.nnz_a = a.nnz();
  rep.nnz_a_tilde = a.nnz();
  const double norm_b = norm2(b);
  if (norm_b == 0.0) {
    rep.x_hat.assign(a.rows(), 0.0);
    return rep;
  }
  Prepared prep = prepare(a, b, cfg);
  rep.permuted = prep.permuted;
  const CscMatrix m = obtain_preconditioner(prep.a, cfg, rep.precond);
  rep.tol_y = cfg.epsilon;
  BicgstabOptions opt;
  opt.tol = cfg.epsilon;
  opt.max_iter = cfg.max_iter;
  const std::vector<double> zero(a.rows(), 0.0);
  auto out = bicgstab(prep.a, &m, prep.b, zero, opt);
  rep.x_hat = std::move(out.x);
  rep.iter_y = out.iterations;
  rep.flag_y = out.flag;
  rep.res_y = out.rel_residual;
  finish_report(rep, a, b, norm_b);
  rep.solve_seconds = seconds_since(t0) - rep.precond.setup_seconds;
  return rep;
}

}  // namespace sai
