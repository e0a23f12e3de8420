#include "sai/lstsq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sai/errors.hpp"

namespace sai {

LsWorkspace::LsWorkspace(const CscMatrix& a, Index k, std::span<const Index> initial_pattern,
                         LsOptions options)
    : a_(&a), k_(k), options_(options) {
  if (k >= a.rows()) throw DomainError("ls workspace: target index out of range");
  if (initial_pattern.empty()) throw DegeneratePatternError("ls workspace: empty initial pattern");
  rows_.push_back(k);
  row_pos_.emplace(k, 0);
  qte_.push_back(1.0);
  add_columns(initial_pattern);
  if (rank() == 0)
    throw DegeneratePatternError("ls workspace: A(:, S) is zero for column " + std::to_string(k));
  solve();
}

void LsWorkspace::augment(std::span<const Index> new_cols) {
  if (new_cols.empty()) return;
  add_columns(new_cols);
  solve();
}

void LsWorkspace::drop_columns(std::span<const Index> drop) {
  if (drop.empty()) return;
  for (Index j : drop)
    if (!contains(j)) throw DomainError("ls workspace: dropped column not in pattern");
  std::vector<Index> keep;
  for (Index j : cols_)
    if (std::find(drop.begin(), drop.end(), j) == drop.end()) keep.push_back(j);
  if (keep.empty()) throw DegeneratePatternError("ls workspace: dropping every column");
  std::sort(keep.begin(), keep.end());
  *this = LsWorkspace(*a_, k_, keep, options_);
}

bool LsWorkspace::contains(Index col) const {
  return std::find(cols_.begin(), cols_.end(), col) != cols_.end();
}

void LsWorkspace::add_columns(std::span<const Index> new_cols) {
  const CscMatrix& a = *a_;
  for (std::size_t t = 0; t < new_cols.size(); ++t) {
    const Index j = new_cols[t];
    if (j >= a.cols()) throw DomainError("ls workspace: column index out of range");
    if (contains(j) || std::find(new_cols.begin(), new_cols.begin() + t, j) != new_cols.begin() + t)
      throw DomainError("ls workspace: column already in pattern");
  }

  // new rows first: they are zero in every existing column
  std::vector<Index> fresh;
  for (Index j : new_cols)
    for (Index r : a.col_rows(j))
      if (row_pos_.find(r) == row_pos_.end()) fresh.push_back(r);
  std::sort(fresh.begin(), fresh.end());
  fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());

  const std::size_t m = rows_.size() + fresh.size();
  const std::size_t width = factor_cols_.size() + new_cols.size();
  if (static_cast<double>(m) * static_cast<double>(width) * sizeof(double) >
      static_cast<double>(options_.workspace_limit_bytes))
    throw WorkspaceGuardError("ls workspace: " + std::to_string(m) + "x" + std::to_string(width) +
                              " dense factor exceeds the workspace guard");
  for (Index r : fresh) {
    row_pos_.emplace(r, rows_.size());
    rows_.push_back(r);
  }
  if (!fresh.empty()) {
    for (auto& col : qr_) col.resize(m, 0.0);
    qte_.resize(m, 0.0);  // row k is already present, so new entries of e_k are zero
  }

  for (Index j : new_cols) {
    cols_.push_back(j);
    coef_.push_back(0.0);
    dependent_.push_back(true);

    std::vector<double> x(m, 0.0);
    double col_norm = 0.0;
    auto rr = a.col_rows(j);
    auto vv = a.col_values(j);
    for (std::size_t t = 0; t < rr.size(); ++t) {
      x[row_pos_.at(rr[t])] = vv[t];
      col_norm += vv[t] * vv[t];
    }
    col_norm = std::sqrt(col_norm);

    const std::size_t r = factor_cols_.size();
    for (std::size_t f = 0; f < r; ++f) {
      const auto& v = qr_[f];
      double w = x[f];
      for (std::size_t i = f + 1; i < m; ++i) w += v[i] * x[i];
      w *= tau_[f];
      x[f] -= w;
      for (std::size_t i = f + 1; i < m; ++i) x[i] -= w * v[i];
    }

    if (r >= m || col_norm == 0.0) continue;
    double sigma = 0.0;
    for (std::size_t i = r; i < m; ++i) sigma += x[i] * x[i];
    sigma = std::sqrt(sigma);
    const double scale = std::max(max_diag_, r == 0 ? col_norm : 0.0);
    if (sigma <= options_.rank_tol * scale || sigma == 0.0) continue;

    // Householder reflector zeroing x[r+1..m)
    const double alpha = x[r];
    const double beta = alpha >= 0.0 ? -sigma : sigma;
    const double tau = (beta - alpha) / beta;
    const double inv = 1.0 / (alpha - beta);
    for (std::size_t i = r + 1; i < m; ++i) x[i] *= inv;
    x[r] = beta;

    double w = qte_[r];
    for (std::size_t i = r + 1; i < m; ++i) w += x[i] * qte_[i];
    w *= tau;
    qte_[r] -= w;
    for (std::size_t i = r + 1; i < m; ++i) qte_[i] -= w * x[i];

    qr_.push_back(std::move(x));
    tau_.push_back(tau);
    factor_cols_.push_back(cols_.size() - 1);
    dependent_.back() = false;
    max_diag_ = std::max(max_diag_, std::abs(beta));
  }
}

void LsWorkspace::solve() {
  const std::size_t r = factor_cols_.size();
  std::vector<double> c(qte_.begin(), qte_.begin() + static_cast<std::ptrdiff_t>(r));
  for (std::size_t f = r; f-- > 0;) {
    double s = c[f];
    for (std::size_t g = f + 1; g < r; ++g) s -= qr_[g][f] * c[g];
    c[f] = s / qr_[f][f];
  }
  std::fill(coef_.begin(), coef_.end(), 0.0);
  for (std::size_t f = 0; f < r; ++f) coef_[factor_cols_[f]] = c[f];

  double res = 0.0;
  for (std::size_t i = r; i < qte_.size(); ++i) res += qte_[i] * qte_[i];
  residual_norm_ = std::sqrt(res);
}

std::vector<Index> LsWorkspace::pattern() const {
  std::vector<Index> p(cols_);
  std::sort(p.begin(), p.end());
  return p;
}

std::vector<Index> LsWorkspace::rows() const {
  std::vector<Index> r(rows_);
  std::sort(r.begin(), r.end());
  return r;
}

std::vector<std::pair<Index, double>> LsWorkspace::coefficients() const {
  std::vector<std::pair<Index, double>> out;
  out.reserve(cols_.size());
  for (std::size_t t = 0; t < cols_.size(); ++t) out.emplace_back(cols_[t], coef_[t]);
  std::sort(out.begin(), out.end());
  return out;
}

SparseVector LsWorkspace::solution() const {
  SparseVector m{a_->cols(), {}, {}};
  for (auto [j, v] : coefficients()) {
    if (v == 0.0) continue;
    m.indices.push_back(j);
    m.values.push_back(v);
  }
  return m;
}

SparseVector LsWorkspace::residual() const {
  SparseVector r{a_->rows(), {}, {}};
  std::vector<double> local(rows_.size(), 0.0);
  local[row_pos_.at(k_)] = -1.0;
  for (std::size_t t = 0; t < cols_.size(); ++t) {
    if (coef_[t] == 0.0) continue;
    auto rr = a_->col_rows(cols_[t]);
    auto vv = a_->col_values(cols_[t]);
    for (std::size_t i = 0; i < rr.size(); ++i) local[row_pos_.at(rr[i])] += vv[i] * coef_[t];
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    r.indices.push_back(rows_[i]);
    r.values.push_back(local[i]);
  }
  r.normalize();
  return r;
}

std::vector<Index> LsWorkspace::dependent_columns() const {
  std::vector<Index> out;
  for (std::size_t t = 0; t < cols_.size(); ++t)
    if (dependent_[t]) out.push_back(cols_[t]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sai
