#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sai/csc_matrix.hpp"

namespace oracle {

using sai::CscMatrix;
using sai::Index;

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Random sparse matrix with the given density and a nonzero diagonal made dominant.
inline CscMatrix random_dominant(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  std::bernoulli_distribution keep(density), neg(0.5);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (i != j && keep(rng)) d(i, j) = neg(rng) ? -mag(rng) : mag(rng);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = d.row(i).cwiseAbs().sum() + 1.0;
  return CscMatrix::from_dense(d);
}

/// Random matrix with every entry present.
inline Eigen::MatrixXd random_dense(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd d(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) d(i, j) = u(rng);
  return d;
}

/// min ||A(:, S) m - e_k|| via SVD of the dense restriction.
inline double ls_residual_svd(const CscMatrix& a, Index k, const std::vector<Index>& pattern) {
  Eigen::MatrixXd full = a.to_dense();
  Eigen::MatrixXd sub(full.rows(), static_cast<Eigen::Index>(pattern.size()));
  for (std::size_t c = 0; c < pattern.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = full.col(pattern[c]);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(full.rows());
  e(static_cast<Eigen::Index>(k)) = 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  Eigen::VectorXd m = svd.solve(e);
  return (sub * m - e).norm();
}

/// ||A m - e_k|| recomputed densely from a sparse column.
inline double column_residual(const CscMatrix& a, const sai::SparseVector& m, Index k) {
  Eigen::VectorXd r = a.to_dense() * to_eigen(m.to_dense());
  r(static_cast<Eigen::Index>(k)) -= 1.0;
  return r.norm();
}

/// Golden-section minimisation of a unimodal scalar function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol * (1.0 + std::abs(lo) + std::abs(hi))) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return f((lo + hi) / 2.0);
}

/// Boolean pattern of (I + |A|)^power.
inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> boolean_power(const CscMatrix& a, std::size_t power) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> base(n, n), acc(n, n);
  base.setConstant(false);
  for (Eigen::Index i = 0; i < n; ++i) base(i, i) = true;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i : a.col_rows(j)) base(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = true;
  acc.setConstant(false);
  for (Eigen::Index i = 0; i < n; ++i) acc(i, i) = true;
  for (std::size_t p = 0; p < power; ++p) {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> next(n, n);
    next.setConstant(false);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index l = 0; l < n; ++l)
        if (base(i, l))
          for (Eigen::Index j = 0; j < n; ++j)
            if (acc(l, j)) next(i, j) = true;
    acc = next;
  }
  return acc;
}

inline double rel_err(const Eigen::VectorXd& x, const Eigen::VectorXd& ref) {
  return (x - ref).norm() / ref.norm();
}

}  // namespace oracle
