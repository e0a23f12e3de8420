#include <doctest.h>

#include "oracles.hpp"
#include "sai/krylov.hpp"
#include "sai/psai.hpp"

using namespace sai;

TEST_CASE("bicgstab: identity") {
  std::vector<double> b{1.0, -2.0, 3.5}, x0(3, 0.0);
  auto out = bicgstab(CscMatrix::identity(3), nullptr, b, x0, {});
  CHECK(out.flag == SolveFlag::converged);
  CHECK(out.iterations <= 1);
  for (int i = 0; i < 3; ++i) CHECK(out.x[i] == doctest::Approx(b[i]));
}

TEST_CASE("bicgstab: diagonal closed form") {
  std::vector<Triplet> t;
  for (Index i = 0; i < 10; ++i) t.push_back({i, i, static_cast<double>(i + 1)});
  auto a = CscMatrix::from_triplets(10, 10, t);
  std::vector<double> b(10, 1.0), x0(10, 0.0);
  auto out = bicgstab(a, nullptr, b, x0, {1e-12, 100});
  CHECK(out.flag == SolveFlag::converged);
  for (Index i = 0; i < 10; ++i) CHECK(std::abs(out.x[i] - 1.0 / static_cast<double>(i + 1)) <= 1e-10);
  CHECK(out.rel_residual <= 1e-12);
}

TEST_CASE("bicgstab: preconditioning helps") {
  auto a = oracle::random_dominant(50, 0.1, 21);
  std::vector<double> b(50, 1.0), x0(50, 0.0);
  auto m = psai(a, {}).m;
  auto plain = bicgstab(a, nullptr, b, x0, {1e-8, 500});
  auto pre = bicgstab(a, &m, b, x0, {1e-8, 500});
  CHECK(plain.flag == SolveFlag::converged);
  CHECK(pre.flag == SolveFlag::converged);
  CHECK(pre.iterations < plain.iterations);
  Eigen::VectorXd ref = a.to_dense().partialPivLu().solve(oracle::to_eigen(b));
  CHECK(oracle::rel_err(oracle::to_eigen(pre.x), ref) <= 1e-6);
}

TEST_CASE("bicgstab: reported residual is the true residual") {
  auto a = oracle::random_dominant(60, 0.1, 4);
  std::vector<double> b(60), x0(60, 0.0);
  for (std::size_t i = 0; i < 60; ++i) b[i] = std::sin(static_cast<double>(i));
  auto out = bicgstab(a, nullptr, b, x0, {1e-10, 500});
  Eigen::VectorXd r = oracle::to_eigen(b) - a.to_dense() * oracle::to_eigen(out.x);
  CHECK(std::abs(r.norm() / oracle::to_eigen(b).norm() - out.rel_residual) <= 1e-14);
}

TEST_CASE("bicgstab: zero rhs and iteration cap") {
  auto a = oracle::random_dominant(30, 0.2, 9);
  std::vector<double> zero(30, 0.0);
  auto z = bicgstab(a, nullptr, zero, zero, {});
  CHECK(z.flag == SolveFlag::converged);
  CHECK(z.iterations == 0);

  std::vector<double> b(30, 1.0);
  auto capped = bicgstab(a, nullptr, b, zero, {1e-15, 1});
  CHECK(capped.flag != SolveFlag::converged);
  CHECK(capped.iterations <= 1);
  CHECK(to_string(SolveFlag::max_iter) == "max_iter");
}
