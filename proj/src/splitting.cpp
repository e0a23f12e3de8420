#include "sai/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sai/errors.hpp"

namespace sai {

std::string to_string(SparsifyStrategy s) {
  return s == SparsifyStrategy::nearest_diagonal ? "nearest" : "largest";
}

SparsifyStrategy parse_strategy(const std::string& name) {
  if (name == "nearest") return SparsifyStrategy::nearest_diagonal;
  if (name == "largest") return SparsifyStrategy::largest_magnitude;
  throw DomainError("unknown sparsification strategy '" + name + "'");
}

SplitSystem split(const CscMatrix& a, const SplitOptions& options) {
  if (!a.is_square()) throw DomainError("split: matrix must be square");
  SplitSystem sys;
  sys.factor = options.factor;
  sys.strategy = options.strategy;
  sys.stats = column_stats(a, options.factor);
  sys.p_kept = options.p_kept.value_or(sys.stats.p);
  if (sys.p_kept < 1) throw DomainError("split: p_kept must be at least 1");

  const Index n = a.cols();
  std::vector<char> is_irregular(n, 0);
  for (Index j : sys.stats.irregular_cols)
    if (a.col_nnz(j) > sys.p_kept) is_irregular[j] = 1;

  std::vector<Index> tp{0}, tr, up{0}, ur;
  std::vector<double> tv, uv;
  tr.reserve(a.nnz());
  tv.reserve(a.nnz());
  for (Index j = 0; j < n; ++j) {
    auto rows = a.col_rows(j);
    auto vals = a.col_values(j);
    if (!is_irregular[j]) {
      tr.insert(tr.end(), rows.begin(), rows.end());
      tv.insert(tv.end(), vals.begin(), vals.end());
      tp.push_back(tr.size());
      continue;
    }
    if (!a.has_entry(j, j))
      throw DomainError("split: irregular column " + std::to_string(j) +
                        " has a structurally zero diagonal; apply a zero-free diagonal row "
                        "permutation first");

    std::vector<std::size_t> off;
    for (std::size_t t = 0; t < rows.size(); ++t)
      if (rows[t] != j) off.push_back(t);
    auto dist = [&](std::size_t t) { return rows[t] > j ? rows[t] - j : j - rows[t]; };
    if (options.strategy == SparsifyStrategy::nearest_diagonal) {
      std::stable_sort(off.begin(), off.end(), [&](std::size_t x, std::size_t y) {
        return dist(x) < dist(y) || (dist(x) == dist(y) && rows[x] < rows[y]);
      });
    } else {
      std::stable_sort(off.begin(), off.end(), [&](std::size_t x, std::size_t y) {
        const double ax = std::abs(vals[x]), ay = std::abs(vals[y]);
        return ax > ay || (ax == ay && rows[x] < rows[y]);
      });
    }
    std::vector<char> keep(rows.size(), 0);
    for (std::size_t t = 0; t < rows.size(); ++t)
      if (rows[t] == j) keep[t] = 1;
    for (std::size_t t = 0; t + 1 < sys.p_kept && t < off.size(); ++t) keep[off[t]] = 1;

    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (keep[t]) {
        tr.push_back(rows[t]);
        tv.push_back(vals[t]);
      } else {
        ur.push_back(rows[t]);
        uv.push_back(vals[t]);
      }
    }
    tp.push_back(tr.size());
    up.push_back(ur.size());
    sys.irregular_cols.push_back(j);
  }
  sys.a_tilde = CscMatrix(n, n, std::move(tp), std::move(tr), std::move(tv));
  sys.u = CscMatrix(n, sys.irregular_cols.size(), std::move(up), std::move(ur), std::move(uv));
  return sys;
}

CscMatrix reconstruct(const SplitSystem& sys) {
  const CscMatrix& at = sys.a_tilde;
  std::vector<Triplet> entries;
  entries.reserve(at.nnz() + sys.u.nnz());
  for (Index j = 0; j < at.cols(); ++j) {
    auto r = at.col_rows(j);
    auto v = at.col_values(j);
    for (std::size_t t = 0; t < r.size(); ++t) entries.push_back({r[t], j, v[t]});
  }
  for (Index i = 0; i < sys.irregular_cols.size(); ++i) {
    auto r = sys.u.col_rows(i);
    auto v = sys.u.col_values(i);
    for (std::size_t t = 0; t < r.size(); ++t) entries.push_back({r[t], sys.irregular_cols[i], v[t]});
  }
  return CscMatrix::from_triplets(at.rows(), at.cols(), entries);
}

std::vector<double> row_margins(const CscMatrix& a) {
  if (!a.is_square()) throw DomainError("row_margins: matrix must be square");
  std::vector<double> diag(a.rows(), 0.0), off(a.rows(), 0.0);
  for (Index j = 0; j < a.cols(); ++j) {
    auto r = a.col_rows(j);
    auto v = a.col_values(j);
    for (std::size_t t = 0; t < r.size(); ++t) (r[t] == j ? diag : off)[r[t]] += std::abs(v[t]);
  }
  for (Index i = 0; i < a.rows(); ++i) diag[i] -= off[i];
  return diag;
}

std::vector<double> col_margins(const CscMatrix& a) {
  if (!a.is_square()) throw DomainError("col_margins: matrix must be square");
  std::vector<double> beta(a.cols(), 0.0);
  for (Index j = 0; j < a.cols(); ++j) {
    auto r = a.col_rows(j);
    auto v = a.col_values(j);
    double diag = 0.0, off = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) (r[t] == j ? diag : off) += std::abs(v[t]);
    beta[j] = diag - off;
  }
  return beta;
}

namespace {

bool all_reachable(const CscMatrix& adj) {
  // edges j -> i for every stored (i, j)
  const Index n = adj.cols();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    Index j = stack.back();
    stack.pop_back();
    for (Index i : adj.col_rows(j))
      if (!seen[i]) {
        seen[i] = 1;
        ++count;
        stack.push_back(i);
      }
  }
  return count == n;
}

bool weak_dd_with_strict(const std::vector<double>& margins) {
  bool strict = false;
  for (double b : margins) {
    if (b < 0.0) return false;
    if (b > 0.0) strict = true;
  }
  return strict;
}

}  // namespace

bool is_irreducible(const CscMatrix& a) {
  if (!a.is_square()) throw DomainError("is_irreducible: matrix must be square");
  return all_reachable(a) && all_reachable(transpose(a));
}

MatrixClassReport classify(const CscMatrix& a, std::size_t dense_cutoff) {
  if (!a.is_square()) throw DomainError("classify: matrix must be square");
  MatrixClassReport rep;
  rep.beta = row_margins(a);
  const auto col_beta = col_margins(a);
  rep.strict_row_dd = std::all_of(rep.beta.begin(), rep.beta.end(), [](double b) { return b > 0.0; });
  rep.strict_col_dd = std::all_of(col_beta.begin(), col_beta.end(), [](double b) { return b > 0.0; });
  rep.irreducible = is_irreducible(a);
  rep.irreducible_row_dd = rep.irreducible && weak_dd_with_strict(rep.beta);
  rep.irreducible_col_dd = rep.irreducible && weak_dd_with_strict(col_beta);

  bool sign_ok = true;
  for (Index j = 0; j < a.cols() && sign_ok; ++j) {
    if (!(a.coeff(j, j) > 0.0)) sign_ok = false;
    auto r = a.col_rows(j);
    auto v = a.col_values(j);
    for (std::size_t t = 0; t < r.size(); ++t)
      if (r[t] != j && v[t] > 0.0) sign_ok = false;
  }
  if (!sign_ok) {
    rep.m_matrix = false;
  } else if (a.rows() <= dense_cutoff) {
    const Eigen::MatrixXd d = a.to_dense();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(d);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    const double scale = d.cwiseAbs().maxCoeff();
    if (diag.minCoeff() <= 1e-14 * scale) {
      rep.m_matrix = false;
    } else {
      const Eigen::MatrixXd inv = lu.inverse();
      rep.m_matrix = inv.minCoeff() >= -1e-12;
    }
  } else {
    rep.m_matrix_checked = false;
    rep.m_matrix = rep.strict_row_dd || rep.strict_col_dd;
  }
  return rep;
}

DominanceMargins dominance_margins(const CscMatrix& a, const CscMatrix& a_tilde) {
  if (a.rows() != a_tilde.rows() || a.cols() != a_tilde.cols())
    throw DimensionMismatch("dominance_margins: shape mismatch");
  DominanceMargins out;
  out.beta = row_margins(a);
  out.beta_tilde = row_margins(a_tilde);
  const double min_b = *std::min_element(out.beta.begin(), out.beta.end());
  const double min_bt = *std::min_element(out.beta_tilde.begin(), out.beta_tilde.end());
  if (!(min_b > 0.0) || !(min_bt > 0.0))
    throw DomainError("dominance_margins: both matrices must be strictly row diagonally dominant");
  for (std::size_t i = 0; i < out.beta.size(); ++i)
    if (out.beta_tilde[i] < out.beta[i])
      throw DomainError("dominance_margins: a_tilde has a smaller margin than A in row " +
                        std::to_string(i));
  out.bound_a = 1.0 / min_b;
  out.bound_a_tilde = 1.0 / min_bt;
  return out;
}

std::string to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::dominant_row: return "dominant-row";
    case MatrixKind::dominant_col: return "dominant-col";
    case MatrixKind::m_matrix: return "m-matrix";
    case MatrixKind::irreducible_dd: return "irreducible-dd";
  }
  return "?";
}

MatrixKind parse_matrix_kind(const std::string& name) {
  if (name == "dominant-row") return MatrixKind::dominant_row;
  if (name == "dominant-col") return MatrixKind::dominant_col;
  if (name == "m-matrix") return MatrixKind::m_matrix;
  if (name == "irreducible-dd") return MatrixKind::irreducible_dd;
  throw DomainError("unknown matrix kind '" + name + "'");
}

CscMatrix generate_test_matrix(const GeneratorSpec& spec) {
  const std::size_t n = spec.n;
  if (n < 2) throw DomainError("generate_test_matrix: n must be at least 2");
  if (!(spec.density >= 0.0 && spec.density <= 1.0))
    throw DomainError("generate_test_matrix: density must lie in [0, 1]");
  if (spec.planted_dense_cols > n) throw DomainError("generate_test_matrix: too many dense columns");
  if (spec.kind == MatrixKind::irreducible_dd && spec.density * static_cast<double>(n - 1) < 1.0)
    throw DomainError("generate_test_matrix: density too low for an irreducible pattern");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool nonpositive = spec.kind == MatrixKind::m_matrix;
  auto offdiag = [&] {
    // magnitudes in [0.1, 1] keep planted columns visibly nonzero
    const double mag = 0.1 + 0.9 * unit(rng);
    if (nonpositive) return -mag;
    return unit(rng) < 0.5 ? -mag : mag;
  };

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::binomial_distribution<std::size_t> count_dist(n - 1, spec.density);
  std::vector<std::size_t> others(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t cnt = count_dist(rng);
    std::size_t w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) others[w++] = i;
    for (std::size_t t = 0; t < cnt; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, n - 2);
      std::swap(others[t], others[pick(rng)]);
      d(static_cast<Eigen::Index>(others[t]), static_cast<Eigen::Index>(j)) = offdiag();
    }
  }
  if (spec.kind == MatrixKind::irreducible_dd)
    for (std::size_t i = 0; i < n; ++i)
      if (d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((i + 1) % n)) == 0.0)
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((i + 1) % n)) = offdiag();

  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  std::shuffle(cols.begin(), cols.end(), rng);
  for (std::size_t c = 0; c < spec.planted_dense_cols; ++c)
    for (std::size_t i = 0; i < n; ++i)
      if (i != cols[c]) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[c])) = offdiag();

  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double off = 0.0;
    for (Eigen::Index t = 0; t < d.rows(); ++t)
      off += spec.kind == MatrixKind::dominant_col ? std::abs(d(t, ii)) : std::abs(d(ii, t));
    double diag = 0.0;
    switch (spec.kind) {
      case MatrixKind::irreducible_dd:
        diag = off + (i == 0 ? 0.5 + unit(rng) : 0.0);
        break;
      default:
        diag = off + 0.5 + unit(rng);
        break;
    }
    if (spec.kind != MatrixKind::m_matrix && unit(rng) < 0.25) diag = -diag;
    d(ii, ii) = diag;
  }
  return CscMatrix::from_dense(d);
}

std::optional<double> condition_number_1(const CscMatrix& a, std::size_t cutoff) {
  if (!a.is_square() || a.rows() > cutoff) return std::nullopt;
  const Eigen::MatrixXd d = a.to_dense();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(d);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd inv = lu.inverse();
  const double norm_a = d.cwiseAbs().colwise().sum().maxCoeff();
  const double norm_inv = inv.cwiseAbs().colwise().sum().maxCoeff();
  return norm_a * norm_inv;
}

}  // namespace sai
