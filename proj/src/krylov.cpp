#include "sai/krylov.hpp"

#include <algorithm>
#include <cmath>

#include "sai/errors.hpp"

namespace sai {

LinearOperator make_operator(const CscMatrix& a) {
  return [&a](std::span<const double> x, std::span<double> y) { matvec(a, x, y); };
}

std::string to_string(SolveFlag f) {
  switch (f) {
    case SolveFlag::converged: return "converged";
    case SolveFlag::max_iter: return "max_iter";
    case SolveFlag::breakdown: return "breakdown";
    case SolveFlag::stagnation: return "stagnation";
  }
  return "?";
}

namespace {

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

SolveOutcome bicgstab(const LinearOperator& apply_op, const LinearOperator* apply_precond,
                      std::span<const double> b, std::span<const double> x0,
                      const BicgstabOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("bicgstab: tol must be positive");
  const std::size_t n = b.size();
  if (x0.size() != n) throw DimensionMismatch("bicgstab: x0 length differs from b");

  SolveOutcome out;
  const double norm_b = norm2(b);
  if (norm_b == 0.0) {
    out.x.assign(n, 0.0);
    return out;
  }

  auto precondition = [&](std::span<const double> in, std::span<double> res) {
    if (apply_precond)
      (*apply_precond)(in, res);
    else
      std::copy(in.begin(), in.end(), res.begin());
  };

  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> ax(n), true_r(n);
  auto true_residual = [&](const std::vector<double>& xv) {
    apply_op(xv, ax);
    for (std::size_t i = 0; i < n; ++i) true_r[i] = b[i] - ax[i];
    return norm2(true_r) / norm_b;
  };

  double best = true_residual(x);
  std::vector<double> best_x = x;
  auto finish = [&](SolveFlag flag, std::size_t it) {
    out.x = std::move(best_x);
    out.rel_residual = best;
    out.iterations = it;
    out.flag = flag;
    return out;
  };
  if (!std::isfinite(best)) return finish(SolveFlag::breakdown, 0);
  if (best <= options.tol) return finish(SolveFlag::converged, 0);

  std::vector<double> r(true_r), r_hat(true_r), p(n, 0.0), v(n, 0.0), p_hat(n), s(n), s_hat(n),
      t(n), x_half(n);
  double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
  const double tiny = 1e-30 * norm_b * norm_b;
  std::size_t replacements_without_progress = 0;

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const double rho = dot(r_hat, r);
    if (!std::isfinite(rho) || std::abs(rho) < tiny) return finish(SolveFlag::breakdown, it - 1);
    const double beta = (rho / rho_prev) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precondition(p, p_hat);
    apply_op(p_hat, v);
    const double rv = dot(r_hat, v);
    if (!std::isfinite(rv) || std::abs(rv) < tiny) return finish(SolveFlag::breakdown, it - 1);
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = r[i] - alpha * v[i];
      x_half[i] = x[i] + alpha * p_hat[i];
    }
    if (!finite(x_half)) return finish(SolveFlag::breakdown, it - 1);

    if (norm2(s) / norm_b <= options.tol) {
      const double rel = true_residual(x_half);
      if (rel < best) {
        best = rel;
        best_x = x_half;
      }
      if (rel <= options.tol) return finish(SolveFlag::converged, it);
    }

    precondition(s, s_hat);
    apply_op(s_hat, t);
    const double tt = dot(t, t);
    if (!std::isfinite(tt) || tt < tiny) {
      return finish(SolveFlag::breakdown, it);
    }
    omega = dot(t, s) / tt;
    if (!std::isfinite(omega) || std::abs(omega) < 1e-30) return finish(SolveFlag::breakdown, it);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = x_half[i] + omega * s_hat[i];
      r[i] = s[i] - omega * t[i];
    }
    if (!finite(x)) return finish(SolveFlag::breakdown, it);

    const double rel = true_residual(x);
    const bool improved = rel < best;
    if (improved) {
      best = rel;
      best_x = x;
    }
    if (rel <= options.tol) return finish(SolveFlag::converged, it);
    // recursive residual has drifted from the true one: replace it
    if (norm2(r) / norm_b <= options.tol) {
      r = true_r;
      replacements_without_progress = improved ? 0 : replacements_without_progress + 1;
      if (replacements_without_progress >= 3) return finish(SolveFlag::stagnation, it);
    }
    rho_prev = rho;
  }
  return finish(SolveFlag::max_iter, options.max_iter);
}

SolveOutcome bicgstab(const CscMatrix& a, const CscMatrix* m, std::span<const double> b,
                      std::span<const double> x0, const BicgstabOptions& options) {
  if (!a.is_square() || a.rows() != b.size()) throw DimensionMismatch("bicgstab: A and b disagree");
  LinearOperator op = make_operator(a);
  if (m == nullptr) return bicgstab(op, nullptr, b, x0, options);
  if (m->rows() != a.rows() || m->cols() != a.cols())
    throw DimensionMismatch("bicgstab: preconditioner shape");
  LinearOperator pre = make_operator(*m);
  return bicgstab(op, &pre, b, x0, options);
}

}  // namespace sai
