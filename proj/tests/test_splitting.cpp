#include <doctest.h>

#include "oracles.hpp"
#include "sai/errors.hpp"
#include "sai/splitting.hpp"

using namespace sai;

namespace {

Eigen::MatrixXd tridiagonal_dense(Eigen::Index n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 4.0;
    if (i + 1 < n) d(i + 1, i) = d(i, i + 1) = 1.0;
  }
  return d;
}

}  // namespace

TEST_CASE("split: regular matrix is untouched") {
  auto a = CscMatrix::from_dense(tridiagonal_dense(12));
  auto sys = split(a);
  CHECK(sys.s() == 0);
  CHECK(sys.a_tilde == a);
  CHECK(sys.u.rows() == 12);
  CHECK(sys.u.cols() == 0);
}

TEST_CASE("split: 5x5 hand instance") {
  Eigen::MatrixXd d = tridiagonal_dense(5);
  d.col(2) << 0.5, 1.0, 4.0, 1.0, -0.5;
  auto a = CscMatrix::from_dense(d);
  SplitOptions opts;
  opts.factor = 1.5;
  auto sys = split(a, opts);
  REQUIRE(sys.s() == 1);
  CHECK(sys.stats.p == 3);
  CHECK(sys.irregular_cols == std::vector<Index>{2});
  CHECK(std::vector<Index>(sys.a_tilde.col_rows(2).begin(), sys.a_tilde.col_rows(2).end()) ==
        std::vector<Index>{1, 2, 3});
  CHECK(std::vector<Index>(sys.u.col_rows(0).begin(), sys.u.col_rows(0).end()) == std::vector<Index>{0, 4});
  CHECK(reconstruct(sys) == a);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(5, 1);
  v(2, 0) = 1.0;
  CHECK((sys.a_tilde.to_dense() + sys.u.to_dense() * v.transpose() - d).norm() == 0.0);
}

TEST_CASE("split: largest-magnitude strategy") {
  Eigen::MatrixXd d = tridiagonal_dense(6);
  d.col(3) << 0.1, 3.0, 1.0, 9.0, 0.2, 2.5;
  SplitOptions opts;
  opts.factor = 1.5;
  opts.strategy = SparsifyStrategy::largest_magnitude;
  opts.p_kept = 3;
  auto sys = split(CscMatrix::from_dense(d), opts);
  REQUIRE(sys.s() == 1);
  CHECK(std::vector<Index>(sys.a_tilde.col_rows(3).begin(), sys.a_tilde.col_rows(3).end()) ==
        std::vector<Index>{1, 3, 5});
  CHECK(reconstruct(sys) == CscMatrix::from_dense(d));
}

TEST_CASE("split: errors") {
  Eigen::MatrixXd d = tridiagonal_dense(5);
  d.col(2).setConstant(1.0);
  d(2, 2) = 0.0;
  SplitOptions opts;
  opts.factor = 1.0;
  CHECK_THROWS_AS(split(CscMatrix::from_dense(d), opts), DomainError);
  CHECK_THROWS_AS(split(CscMatrix(3, 4)), DomainError);
  opts.p_kept = 0;
  CHECK_THROWS_AS(split(CscMatrix::identity(3), opts), DomainError);
}

TEST_CASE("classify") {
  auto id = classify(CscMatrix::identity(4));
  CHECK(id.strict_row_dd);
  CHECK(id.strict_col_dd);
  CHECK(id.m_matrix);

  auto a = CscMatrix::from_dense((Eigen::MatrixXd(2, 2) << 1, -2, 0, 1).finished());
  auto c = classify(a);
  CHECK_FALSE(c.strict_row_dd);
  CHECK(row_margins(a) == std::vector<double>{-1.0, 1.0});

  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    CHECK(classify(oracle::random_dominant(25, 0.2, seed)).strict_row_dd);

  Eigen::MatrixXd cyc = Eigen::MatrixXd::Identity(4, 4) * 2.0;
  for (Eigen::Index i = 0; i < 4; ++i) cyc(i, (i + 1) % 4) = -1.0;
  CHECK(is_irreducible(CscMatrix::from_dense(cyc)));
  CHECK_FALSE(is_irreducible(CscMatrix::identity(3)));
}

TEST_CASE("dominance margins") {
  SUBCASE("2I") {
    std::vector<Triplet> t{{0, 0, 2.0}, {1, 1, 2.0}};
    auto a = CscMatrix::from_triplets(2, 2, t);
    auto m = dominance_margins(a, a);
    CHECK(m.beta == std::vector<double>{2.0, 2.0});
    CHECK(m.bound_a == 0.5);
    Eigen::MatrixXd inv = a.to_dense().inverse();
    CHECK(inv.cwiseAbs().rowwise().sum().maxCoeff() == 0.5);
  }
  SUBCASE("split of a dominant matrix") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto a = generate_test_matrix({MatrixKind::dominant_row, 40, 0.05, 1, seed});
      auto sys = split(a);
      REQUIRE(sys.s() == 1);
      auto m = dominance_margins(a, sys.a_tilde);
      CHECK(*std::min_element(m.beta_tilde.begin(), m.beta_tilde.end()) >=
            *std::min_element(m.beta.begin(), m.beta.end()));
      CHECK(m.bound_a_tilde <= m.bound_a);
    }
  }
  SUBCASE("bound validity") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto a = oracle::random_dominant(20, 0.3, seed);
      auto m = dominance_margins(a, a);
      Eigen::MatrixXd inv = a.to_dense().inverse();
      CHECK(m.bound_a >= inv.cwiseAbs().rowwise().sum().maxCoeff() * (1 - 1e-12));
    }
  }
}

TEST_CASE("generator") {
  auto a = generate_test_matrix({MatrixKind::dominant_row, 10, 0.2, 0, 1});
  CHECK(classify(a).strict_row_dd);

  auto m = generate_test_matrix({MatrixKind::m_matrix, 8, 0.3, 0, 2});
  Eigen::MatrixXd d = m.to_dense();
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) {
      if (i == j)
        CHECK(d(i, j) > 0.0);
      else
        CHECK(d(i, j) <= 0.0);
    }
  CHECK(d.inverse().minCoeff() >= -1e-12);
  CHECK(classify(m).m_matrix);

  auto p = generate_test_matrix({MatrixKind::dominant_col, 60, 0.05, 2, 3});
  auto stats = column_stats(p);
  const double factor = 60.0 / static_cast<double>(stats.p);
  CHECK(column_stats(p, factor).s == 2);
  CHECK(classify(p).strict_col_dd);

  auto irr = generate_test_matrix({MatrixKind::irreducible_dd, 30, 0.1, 0, 4});
  CHECK(classify(irr).irreducible_row_dd);

  auto again = generate_test_matrix({MatrixKind::dominant_col, 60, 0.05, 2, 3});
  CHECK(again == p);
}

TEST_CASE("condition number") {
  CHECK(*condition_number_1(CscMatrix::identity(5)) == doctest::Approx(1.0));
  CHECK_FALSE(condition_number_1(CscMatrix::identity(5), 4).has_value());
}
