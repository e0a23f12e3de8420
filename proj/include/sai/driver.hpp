#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sai/csc_matrix.hpp"
#include "sai/krylov.hpp"
#include "sai/psai.hpp"
#include "sai/spai.hpp"
#include "sai/splitting.hpp"

namespace sai {

enum class Method { spai, psai };
enum class CPolicy { fixed, posthoc };
enum class PermutePolicy { automatic, always, never };

std::string to_string(Method m);
Method parse_method(const std::string& name);
std::string to_string(PermutePolicy p);
PermutePolicy parse_permute_policy(const std::string& name);

struct DriverConfig {
  double epsilon = 1e-8;
  CPolicy c_policy = CPolicy::fixed;
  double c_value = 1.0;  ///< c used in the w tolerances under the fixed policy
  std::size_t max_posthoc_passes = 5;
  Method method = Method::psai;
  std::size_t max_iter = 500;
  PermutePolicy permute = PermutePolicy::automatic;
  SplitOptions split;
  SpaiConfig spai;
  PsaiConfig psai;
  std::size_t threads = 1;
  /// Reuse this preconditioner instead of building one.
  std::optional<CscMatrix> preconditioner;

  void validate() const;
};

struct PreconditionerStats {
  Method method = Method::psai;
  std::size_t nnz = 0;
  double spar = 0.0;  ///< nnz(M) / nnz of the matrix it preconditions
  std::size_t n_c = 0;
  std::size_t l_m = 0;
  std::size_t max_candidates = 0;  ///< SPAI only
  std::size_t max_pattern = 0;     ///< PSAI only
  std::uint64_t checksum = 0;
  bool reused = false;
  double setup_seconds = 0.0;
};

struct SolveReport {
  std::vector<double> x_hat;
  double rr = 0.0;  ///< ||b - A x_hat|| / ||b|| against the original A, b
  double a = 0.0;   ///< rr / epsilon
  double epsilon = 0.0;
  std::size_t n = 0;
  std::size_t nnz_a = 0;
  std::size_t nnz_a_tilde = 0;
  std::size_t s = 0;
  std::vector<Index> irregular_cols;
  bool permuted = false;

  double tol_y = 0.0;
  std::vector<double> tol_w;
  std::size_t iter_y = 0;
  std::vector<std::size_t> iter_w;
  std::size_t max_iter_used = 0;
  SolveFlag flag_y = SolveFlag::converged;
  std::vector<SolveFlag> flag_w;
  double res_y = 0.0;             ///< relative residual of y_hat
  std::vector<double> res_w;      ///< relative residuals of each w_hat
  bool subsystems_converged = true;

  double c = 0.0;                 ///< ||(I + V^T W)^{-1} V^T y|| of the final assembly
  std::size_t posthoc_passes = 0;
  double small_system_condition = 1.0;

  PreconditionerStats precond;
  double solve_seconds = 0.0;
};

/// x = y - W (I + V^T W)^{-1} V^T y, plus c and the capacitance condition number.
struct Assembly {
  std::vector<double> x_hat;
  double c = 0.0;
  double condition = 1.0;
};

/** Combines the s+1 subsystem solutions into an approximate solution of A x = b.
 *
 * w_hat is n x s, column t approximating a_tilde^{-1} u_t. V^T W is read off as
 * the rows irregular_cols of w_hat. Throws SingularUpdateError when a pivot of
 * I + V^T W falls below 1e-14 times its largest entry.
 */
Assembly assemble_solution(std::span<const double> y_hat, const Eigen::MatrixXd& w_hat,
                           std::span<const Index> irregular_cols);

using DenseSolve = std::function<std::vector<double>(std::span<const double>)>;

/// Exact SMW recovery with caller-supplied exact solves of a_tilde; the ground-truth oracle.
std::vector<double> smw_inverse_apply(const DenseSolve& a_tilde_solve, const CscMatrix& u,
                                      std::span<const Index> irregular_cols,
                                      std::span<const double> b);

struct SubsystemTolerances {
  double tol_y = 0.0;
  std::vector<double> tol_w;
};

/// tol_y = eps / 2 and tol_w[j] = eps ||b|| / (2 sqrt(s) c ||u_j||), both relative.
SubsystemTolerances subsystem_tolerances(double epsilon, std::size_t s, double c, double norm_b,
                                         std::span<const double> norm_u);

/// Builds M for the given matrix according to cfg.method.
CscMatrix build_preconditioner(const CscMatrix& a, const DriverConfig& cfg, PreconditionerStats& stats);

/** Split, precondition the regular part once, solve the s+1 systems, recover x.
 *
 * With s = 0 this is the standard path. Subsystem failures do not throw: the
 * solution is still assembled and reported with its flags.
 */
SolveReport solve_irregular(const CscMatrix& a, std::span<const double> b, const DriverConfig& cfg);

/// Preconditions A directly and solves once with tolerance epsilon.
SolveReport solve_standard(const CscMatrix& a, std::span<const double> b, const DriverConfig& cfg);

}  // namespace sai
