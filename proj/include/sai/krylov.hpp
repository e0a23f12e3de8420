#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sai/csc_matrix.hpp"

namespace sai {

/// y = Op(x). Output span is preallocated by the caller.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

LinearOperator make_operator(const CscMatrix& a);

enum class SolveFlag { converged, max_iter, breakdown, stagnation };

std::string to_string(SolveFlag f);

struct SolveOutcome {
  std::vector<double> x;
  std::size_t iterations = 0;
  double rel_residual = 0.0;  ///< ||b - A x|| / ||b|| of the returned x
  SolveFlag flag = SolveFlag::converged;
};

struct BicgstabOptions {
  double tol = 1e-8;
  std::size_t max_iter = 500;
};

/** Right-preconditioned BiCGStab.
 *
 * Solves A M z = b and returns x = M z. Convergence is judged on the true
 * residual ||b - A x|| / ||b|| at every half and full step. The returned
 * iterate is the best one seen. Breakdown is declared when |rho| or |omega|
 * terms fall below 1e-30 * ||b||^2, and no restart is attempted.
 */
SolveOutcome bicgstab(const LinearOperator& apply_op, const LinearOperator* apply_precond,
                      std::span<const double> b, std::span<const double> x0,
                      const BicgstabOptions& options);

/// Convenience overload for a sparse matrix and optional sparse right preconditioner.
SolveOutcome bicgstab(const CscMatrix& a, const CscMatrix* m, std::span<const double> b,
                      std::span<const double> x0, const BicgstabOptions& options);

}  // namespace sai
