#include <doctest.h>

#include "contract_checks.hpp"
#include "oracles.hpp"
#include "sai/errors.hpp"
#include "sai/psai.hpp"

using namespace sai;

namespace {

CscMatrix banded(std::size_t n, double diag, double lower, double upper) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, diag});
    if (i + 1 < n) {
      if (lower != 0.0) t.push_back({i + 1, i, lower});
      if (upper != 0.0) t.push_back({i, i + 1, upper});
    }
  }
  return CscMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST_CASE("adaptive tolerance") {
  CHECK(psai_tol(0.4, 1, 1.0) == doctest::Approx(0.4));
  CHECK(psai_tol(0.4, 8, 5.0) == doctest::Approx(0.01));
  CHECK(psai_tol(0.4, 20, 3.0) == doctest::Approx(psai_tol(0.4, 10, 3.0) / 2.0));
  CHECK_THROWS_AS(psai_tol(0.4, 0, 1.0), DomainError);
  CHECK_THROWS_AS(psai_tol(0.4, 1, 0.0), DomainError);
}

TEST_CASE("psai column") {
  PsaiConfig cfg;
  SUBCASE("identity") {
    auto c = psai_column(CscMatrix::identity(5), 3, cfg);
    CHECK(c.loops_used == 0);
    CHECK(c.m.indices == std::vector<Index>{3});
    CHECK(c.residual_norm == doctest::Approx(0.0));
  }
  SUBCASE("2x2 upper triangular") {
    auto a = CscMatrix::from_dense((Eigen::MatrixXd(2, 2) << 2, 1, 0, 3).finished());
    auto loose = psai_column(a, 1, cfg);
    CHECK(loose.converged);
    CHECK(loose.residual_norm <= 0.4);
    cfg.delta = 0.1;
    auto c = psai_column(a, 1, cfg);
    CHECK(c.loops_used == 1);
    CHECK(c.residual_norm <= 1e-14);
    auto m = c.m.to_dense();
    CHECK(m[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
    CHECK(m[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("tridiagonal: residuals and recorded drops") {
    auto a = banded(30, 4.0, -1.0, 1.5);
    for (Index k = 0; k < 30; ++k) {
      auto c = psai_column(a, k, cfg);
      CHECK(c.converged);
      CHECK(c.loops_used <= 10);
      CHECK(oracle::column_residual(a, c.m, k) <= 0.4 + 1e-12);
      for (const auto& ev : c.drops) {
        CHECK(ev.tol == doctest::Approx(psai_tol(cfg.delta, ev.nnz_before, norm1(a))));
        for (auto [j, v] : ev.dropped) {
          CHECK(std::abs(v) <= ev.tol);
          CHECK(j != k);
        }
      }
    }
  }
  SUBCASE("zero column") {
    CscMatrix a(2, 2, {0, 1, 1}, {0}, {1.0});
    CHECK_THROWS_AS(psai_column(a, 1, cfg), DegeneratePatternError);
  }
}

TEST_CASE("bpsai") {
  PsaiConfig cfg;
  CHECK(bpsai_column(CscMatrix::identity(4), 1, cfg).m.indices == std::vector<Index>{1});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto a = oracle::random_dominant(30, 0.08, seed);
    for (Index k = 0; k < 30; k += 3) {
      auto b = bpsai_column(a, k, cfg);
      auto p = psai_column(a, k, cfg);
      CHECK(b.dropped_count == 0);
      CHECK(b.m.nnz() >= p.m.nnz());
      if (b.residual_norm <= cfg.delta) CHECK(p.residual_norm <= 2 * cfg.delta);
    }
  }
}

TEST_CASE("psai matrix") {
  PsaiConfig cfg;
  SUBCASE("identity") {
    auto r = psai(CscMatrix::identity(7), cfg);
    CHECK(r.m == CscMatrix::identity(7));
    CHECK(r.l_m == 0);
  }
  SUBCASE("upper bidiagonal 20x20") {
    auto a = banded(20, 4.0, 0.0, 1.0);
    auto r = psai(a, cfg);
    CHECK(r.l_m <= 10);
    for (Index k = 0; k < 20; ++k) CHECK(r.residuals[k] <= 0.4);
  }
  SUBCASE("pattern envelope on 15x15") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto a = oracle::random_dominant(15, 0.12, seed + 50);
      cfg.delta = 0.1;
      auto r = psai(a, cfg);
      CHECK(contract::envelope_violations(a, r.m, r.l_m) == 0);
    }
  }
  SUBCASE("fixed tolerance policy drops more with a larger tol") {
    auto a = oracle::random_dominant(40, 0.1, 3);
    cfg.tol_policy = TolPolicy::fixed;
    cfg.fixed_tol = 1e-6;
    auto tight = psai(a, cfg);
    cfg.fixed_tol = 1e-2;
    auto loose = psai(a, cfg);
    CHECK(loose.m.nnz() <= tight.m.nnz());
  }
  SUBCASE("invalid delta") {
    cfg.delta = 0.5;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
  }
}
