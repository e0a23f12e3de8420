#include <algorithm>
#include <numeric>
#include <sstream>

#include <doctest.h>

#include "oracles.hpp"
#include "sai/errors.hpp"
#include "sai/matching.hpp"
#include "sai/matrix_market.hpp"

using namespace sai;

namespace {

CscMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in);
}

CscMatrix tridiagonal(std::size_t n, double diag, double off) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, diag});
    if (i + 1 < n) {
      t.push_back({i + 1, i, off});
      t.push_back({i, i + 1, off});
    }
  }
  return CscMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST_CASE("matrix market: identity") {
  auto a = parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 2 1\n");
  CHECK(a.col_ptr() == std::vector<Index>{0, 1, 2});
  CHECK(a.values() == std::vector<double>{1.0, 1.0});
  CHECK(a.row_idx() == std::vector<Index>{0, 1});
}

TEST_CASE("matrix market: duplicates are summed") {
  auto a = parse("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2.0\n1 1 2.0\n2 1 1.5\n");
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(2, 2);
  ref(0, 0) += 2.0;
  ref(0, 0) += 2.0;
  ref(1, 0) += 1.5;
  CHECK(a.nnz() == 2);
  CHECK(a.coeff(0, 0) == 4.0);
  CHECK(a.to_dense() == ref);
}

TEST_CASE("matrix market: rejected input") {
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real general\n3 3 1\n4 1 1.0\n"), ParseError);
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate real general\n3 3 2\n1 1 1.0\n"), ParseError);
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
                  UnsupportedFieldError);
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"),
                  UnsupportedFieldError);
  CHECK_THROWS_AS(parse("%%MatrixMarket matrix array real general\n1 1\n1\n"), UnsupportedFieldError);
  CHECK_THROWS_AS(parse("not a header\n"), ParseError);
  CHECK_THROWS_AS(read_matrix_market(std::filesystem::path("/nonexistent/x.mtx")), Error);
}

TEST_CASE("matrix market: symmetric expansion and explicit zeros") {
  auto a = parse(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 3\n1 1 2\n3 1 -1\n2 2 0\n");
  CHECK(a.nnz() == 3);
  CHECK(a.coeff(0, 2) == -1.0);
  CHECK(a.coeff(2, 0) == -1.0);
  CHECK_FALSE(a.has_entry(1, 1));
}

TEST_CASE("matrix market: round trip is exact") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto a = CscMatrix::from_dense(oracle::random_dense(7, 5, seed) * 1e3 / 7.0);
    std::stringstream buf;
    write_matrix_market(buf, a);
    CHECK(buf.str().rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
    auto b = read_matrix_market(buf);
    CHECK(a == b);
  }
}

TEST_CASE("csc: constructor validation") {
  CHECK_THROWS_AS(CscMatrix(2, 2, {0, 1, 1}, {0, 0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(CscMatrix(2, 1, {0, 2}, {1, 0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(CscMatrix(2, 1, {0, 1}, {2}, {1.0}), Error);
  CscMatrix z(2, 1, {0, 2}, {0, 1}, {0.0, 3.0});
  CHECK(z.nnz() == 1);
  CHECK(z.coeff(1, 0) == 3.0);
}

TEST_CASE("column stats") {
  SUBCASE("identity") {
    auto s = column_stats(CscMatrix::identity(100));
    CHECK(s.p == 1);
    CHECK(s.p_d == 1);
    CHECK(s.s == 0);
  }
  SUBCASE("tridiagonal plus one full column") {
    auto t = tridiagonal(50, 4.0, 1.0).to_dense();
    t.col(17).setConstant(0.5);
    auto a = CscMatrix::from_dense(t);
    std::size_t pd = 0, nnz = 0;
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      std::size_t c = static_cast<std::size_t>((t.col(j).array() != 0.0).count());
      pd = std::max(pd, c);
      nnz += c;
    }
    auto s = column_stats(a);
    CHECK(s.p == nnz / 50);
    CHECK(s.p_d == pd);
    CHECK(s.p_d == 50);
    CHECK(s.s == 1);
    CHECK(s.irregular_cols == std::vector<Index>{17});
  }
}

TEST_CASE("matvec") {
  std::vector<double> x{1.0, 1.0};
  auto a = CscMatrix::from_dense((Eigen::MatrixXd(2, 2) << 2, 1, 0, 3).finished());
  CHECK(matvec(a, x) == std::vector<double>{3.0, 3.0});
  std::vector<double> v{1.5, -2.0, 3.0};
  CHECK(matvec(CscMatrix::identity(3), v) == v);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::Index n = seed == 10 ? 200 : 20;
    Eigen::MatrixXd d = oracle::random_dense(n, n, seed);
    d = d.unaryExpr([](double z) { return std::abs(z) < 0.6 ? 0.0 : z; });
    Eigen::VectorXd xv = oracle::random_dense(n, 1, seed + 100).col(0);
    auto y = matvec(CscMatrix::from_dense(d), oracle::to_std(xv));
    CHECK(oracle::rel_err(oracle::to_eigen(y), d * xv) <= 1e-13);
  }
}

TEST_CASE("norms and transpose") {
  CHECK(norm1(CscMatrix::identity(4)) == 1.0);
  CHECK(norm1(CscMatrix::from_dense((Eigen::MatrixXd(2, 2) << 2, -1, 0, 3).finished())) == 4.0);
  Eigen::MatrixXd d = oracle::random_dense(30, 30, 7);
  auto a = CscMatrix::from_dense(d);
  double col_max = 0.0;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) sum += std::abs(d(i, j));
    col_max = std::max(col_max, sum);
  }
  CHECK(norm1(a) == col_max);
  CHECK(norm_inf(a) == doctest::Approx(d.cwiseAbs().rowwise().sum().maxCoeff()).epsilon(1e-15));
  CHECK(transpose(a).to_dense() == d.transpose());
}

TEST_CASE("matching: zero-free diagonal") {
  CHECK(is_identity_permutation(zero_free_diagonal_permutation(tridiagonal(6, 2, 1))));

  auto anti = CscMatrix::from_dense((Eigen::MatrixXd(3, 3) << 0, 0, 1, 0, 1, 0, 1, 0, 0).finished());
  auto perm = zero_free_diagonal_permutation(anti);
  std::vector<Index> p{0, 1, 2};
  std::vector<std::vector<Index>> valid;
  do {
    bool ok = true;
    for (Index j = 0; j < 3; ++j) ok = ok && anti.has_entry(p[j], j);
    if (ok) valid.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  REQUIRE(valid.size() == 1);
  CHECK(perm == valid[0]);
  CHECK(perm == std::vector<Index>{2, 1, 0});

  auto singular = CscMatrix::from_dense((Eigen::MatrixXd(2, 2) << 1, 1, 0, 0).finished());
  CHECK_THROWS_AS(zero_free_diagonal_permutation(singular), StructuralSingularityError);
}

TEST_CASE("matching: permuted diagonal is structurally nonzero") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + trial % 20;
    std::vector<Index> hidden(n);
    std::iota(hidden.begin(), hidden.end(), 0);
    std::shuffle(hidden.begin(), hidden.end(), rng);
    std::vector<Triplet> t;
    std::bernoulli_distribution extra(0.15);
    for (Index j = 0; j < n; ++j) {
      t.push_back({hidden[j], j, 1.0});
      for (Index i = 0; i < n; ++i)
        if (i != hidden[j] && extra(rng)) t.push_back({i, j, 0.5});
    }
    auto a = CscMatrix::from_triplets(n, n, t);
    auto perm = zero_free_diagonal_permutation(a);
    auto pa = permute_rows(a, perm);
    CHECK(has_zero_free_diagonal(pa));
    std::vector<Index> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (Index i = 0; i < n; ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("checksum distinguishes values and pattern") {
  auto a = tridiagonal(5, 2, 1);
  auto b = tridiagonal(5, 2, 1);
  auto c = tridiagonal(5, 2, 1.0000000001);
  CHECK(checksum(a) == checksum(b));
  CHECK(checksum(a) != checksum(c));
  CHECK(checksum(a) != checksum(CscMatrix::identity(5)));
}
