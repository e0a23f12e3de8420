#include "sai/csc_matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "sai/errors.hpp"

namespace sai {

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (std::size_t t = 0; t < indices.size(); ++t) out[indices[t]] += values[t];
  return out;
}

void SparseVector::normalize() {
  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return indices[a] < indices[b]; });
  std::vector<Index> idx;
  std::vector<double> val;
  for (std::size_t t : order) {
    if (indices[t] >= dim) throw DomainError("sparse vector index out of range");
    if (!idx.empty() && idx.back() == indices[t]) {
      val.back() += values[t];
    } else {
      idx.push_back(indices[t]);
      val.push_back(values[t]);
    }
  }
  std::size_t w = 0;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (val[t] != 0.0) {
      idx[w] = idx[t];
      val[w] = val[t];
      ++w;
    }
  }
  idx.resize(w);
  val.resize(w);
  indices = std::move(idx);
  values = std::move(val);
}

CscMatrix::CscMatrix(Index n_rows, Index n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), col_ptr_(n_cols + 1, 0) {}

CscMatrix::CscMatrix(Index n_rows, Index n_cols, std::vector<Index> col_ptr,
                     std::vector<Index> row_idx, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
  validate_and_purge();
}

void CscMatrix::validate_and_purge() {
  if (col_ptr_.size() != n_cols_ + 1) throw DomainError("col_ptr must have n_cols+1 entries");
  if (col_ptr_.front() != 0) throw DomainError("col_ptr[0] must be 0");
  if (row_idx_.size() != values_.size()) throw DomainError("row_idx and values differ in length");
  if (col_ptr_.back() != row_idx_.size()) throw DomainError("col_ptr[n_cols] must equal nnz");
  for (Index j = 0; j < n_cols_; ++j) {
    if (col_ptr_[j] > col_ptr_[j + 1]) throw DomainError("col_ptr is not monotone");
    for (Index t = col_ptr_[j]; t < col_ptr_[j + 1]; ++t) {
      if (row_idx_[t] >= n_rows_) throw DomainError("row index out of range");
      if (t > col_ptr_[j] && row_idx_[t] <= row_idx_[t - 1])
        throw DomainError("row indices must strictly increase within a column");
      if (!std::isfinite(values_[t])) throw DomainError("non-finite matrix value");
    }
  }
  // purge stored zeros in place
  Index w = 0;
  Index start = 0;
  for (Index j = 0; j < n_cols_; ++j) {
    Index end = col_ptr_[j + 1];
    col_ptr_[j] = w;
    for (Index t = start; t < end; ++t) {
      if (values_[t] != 0.0) {
        row_idx_[w] = row_idx_[t];
        values_[w] = values_[t];
        ++w;
      }
    }
    start = end;
  }
  col_ptr_[n_cols_] = w;
  row_idx_.resize(w);
  values_.resize(w);
}

CscMatrix CscMatrix::from_triplets(Index n_rows, Index n_cols,
                                   std::span<const Triplet> entries) {
  std::vector<Index> counts(n_cols + 1, 0);
  for (const auto& e : entries) {
    if (e.row >= n_rows || e.col >= n_cols) throw DomainError("triplet index out of range");
    ++counts[e.col + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  std::vector<Index> rows(entries.size());
  std::vector<double> vals(entries.size());
  std::vector<Index> next(counts.begin(), counts.end() - 1);
  for (const auto& e : entries) {
    Index pos = next[e.col]++;
    rows[pos] = e.row;
    vals[pos] = e.value;
  }

  std::vector<Index> col_ptr(n_cols + 1, 0);
  std::vector<Index> out_rows;
  std::vector<double> out_vals;
  out_rows.reserve(entries.size());
  out_vals.reserve(entries.size());
  std::vector<std::size_t> order;
  for (Index j = 0; j < n_cols; ++j) {
    order.resize(counts[j + 1] - counts[j]);
    std::iota(order.begin(), order.end(), counts[j]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a] < rows[b]; });
    std::size_t col_start = out_rows.size();
    for (std::size_t t : order) {
      if (out_rows.size() > col_start && out_rows.back() == rows[t]) {
        out_vals.back() += vals[t];
      } else {
        out_rows.push_back(rows[t]);
        out_vals.push_back(vals[t]);
      }
    }
    col_ptr[j + 1] = out_rows.size();
  }
  return CscMatrix(n_rows, n_cols, std::move(col_ptr), std::move(out_rows), std::move(out_vals));
}

CscMatrix CscMatrix::from_dense(const Eigen::MatrixXd& dense) {
  std::vector<Index> col_ptr{0};
  std::vector<Index> rows;
  std::vector<double> vals;
  for (Eigen::Index j = 0; j < dense.cols(); ++j) {
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
      if (dense(i, j) != 0.0) {
        rows.push_back(static_cast<Index>(i));
        vals.push_back(dense(i, j));
      }
    }
    col_ptr.push_back(rows.size());
  }
  return CscMatrix(static_cast<Index>(dense.rows()), static_cast<Index>(dense.cols()),
                   std::move(col_ptr), std::move(rows), std::move(vals));
}

CscMatrix CscMatrix::identity(Index n) {
  std::vector<Index> col_ptr(n + 1);
  std::iota(col_ptr.begin(), col_ptr.end(), Index{0});
  std::vector<Index> rows(n);
  std::iota(rows.begin(), rows.end(), Index{0});
  return CscMatrix(n, n, std::move(col_ptr), std::move(rows), std::vector<double>(n, 1.0));
}

double CscMatrix::coeff(Index i, Index j) const {
  auto r = col_rows(j);
  auto it = std::lower_bound(r.begin(), r.end(), i);
  if (it == r.end() || *it != i) return 0.0;
  return values_[col_ptr_[j] + static_cast<Index>(it - r.begin())];
}

bool CscMatrix::has_entry(Index i, Index j) const {
  auto r = col_rows(j);
  return std::binary_search(r.begin(), r.end(), i);
}

SparseVector CscMatrix::column(Index j) const {
  auto r = col_rows(j);
  auto v = col_values(j);
  return SparseVector{n_rows_, {r.begin(), r.end()}, {v.begin(), v.end()}};
}

Eigen::MatrixXd CscMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_rows_),
                                            static_cast<Eigen::Index>(n_cols_));
  for (Index j = 0; j < n_cols_; ++j)
    for (Index t = col_ptr_[j]; t < col_ptr_[j + 1]; ++t)
      d(static_cast<Eigen::Index>(row_idx_[t]), static_cast<Eigen::Index>(j)) = values_[t];
  return d;
}

ColumnStats column_stats(const CscMatrix& a, double factor) {
  if (a.cols() == 0 || a.rows() == 0) throw DomainError("column_stats: empty matrix");
  if (!(factor > 0.0)) throw DomainError("column_stats: factor must be positive");
  ColumnStats st;
  st.factor = factor;
  st.p = std::max<std::size_t>(1, a.nnz() / a.cols());
  st.per_col_nnz.resize(a.cols());
  const double threshold = factor * static_cast<double>(st.p);
  for (Index j = 0; j < a.cols(); ++j) {
    st.per_col_nnz[j] = a.col_nnz(j);
    st.p_d = std::max(st.p_d, st.per_col_nnz[j]);
    if (static_cast<double>(st.per_col_nnz[j]) >= threshold) st.irregular_cols.push_back(j);
  }
  st.s = st.irregular_cols.size();
  return st;
}

void matvec(const CscMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols() || y.size() != a.rows())
    throw DimensionMismatch("matvec: dimension mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  const auto& cp = a.col_ptr();
  const auto& ri = a.row_idx();
  const auto& v = a.values();
  for (Index j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (Index t = cp[j]; t < cp[j + 1]; ++t) y[ri[t]] += v[t] * xj;
  }
}

std::vector<double> matvec(const CscMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows());
  matvec(a, x, y);
  return y;
}

double norm1(const CscMatrix& a) {
  double best = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (double v : a.col_values(j)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double norm_inf(const CscMatrix& a) {
  std::vector<double> row_sum(a.rows(), 0.0);
  for (Index t = 0; t < a.nnz(); ++t) row_sum[a.row_idx()[t]] += std::abs(a.values()[t]);
  return row_sum.empty() ? 0.0 : *std::max_element(row_sum.begin(), row_sum.end());
}

double frobenius_norm(const CscMatrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

CscMatrix transpose(const CscMatrix& a) {
  std::vector<Index> col_ptr(a.rows() + 1, 0);
  for (Index r : a.row_idx()) ++col_ptr[r + 1];
  std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
  std::vector<Index> next(col_ptr.begin(), col_ptr.end() - 1);
  std::vector<Index> rows(a.nnz());
  std::vector<double> vals(a.nnz());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index t = a.col_ptr()[j]; t < a.col_ptr()[j + 1]; ++t) {
      Index pos = next[a.row_idx()[t]]++;
      rows[pos] = j;
      vals[pos] = a.values()[t];
    }
  }
  return CscMatrix(a.cols(), a.rows(), std::move(col_ptr), std::move(rows), std::move(vals));
}

CscMatrix permute_rows(const CscMatrix& a, std::span<const Index> perm) {
  if (perm.size() != a.rows()) throw DimensionMismatch("permute_rows: permutation length");
  std::vector<Index> inverse(a.rows(), a.rows());
  for (Index i = 0; i < perm.size(); ++i) {
    if (perm[i] >= a.rows() || inverse[perm[i]] != a.rows())
      throw DomainError("permute_rows: not a permutation");
    inverse[perm[i]] = i;
  }
  std::vector<Triplet> entries;
  entries.reserve(a.nnz());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index t = a.col_ptr()[j]; t < a.col_ptr()[j + 1]; ++t)
      entries.push_back({inverse[a.row_idx()[t]], j, a.values()[t]});
  return CscMatrix::from_triplets(a.rows(), a.cols(), entries);
}

std::uint64_t checksum(const CscMatrix& a) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(a.rows());
  mix(a.cols());
  for (Index p : a.col_ptr()) mix(p);
  for (Index r : a.row_idx()) mix(r);
  for (double v : a.values()) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

}  // namespace sai
