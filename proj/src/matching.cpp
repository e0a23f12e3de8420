#include "sai/matching.hpp"

#include <limits>
#include <string>

#include "sai/errors.hpp"

namespace sai {
namespace {
constexpr Index kUnmatched = std::numeric_limits<Index>::max();
}

bool has_zero_free_diagonal(const CscMatrix& a) {
  if (!a.is_square()) return false;
  for (Index j = 0; j < a.cols(); ++j)
    if (!a.has_entry(j, j)) return false;
  return true;
}

bool is_identity_permutation(const std::vector<Index>& perm) {
  for (Index i = 0; i < perm.size(); ++i)
    if (perm[i] != i) return false;
  return true;
}

std::vector<Index> zero_free_diagonal_permutation(const CscMatrix& a) {
  if (!a.is_square()) throw DomainError("zero_free_diagonal_permutation: matrix must be square");
  const Index n = a.cols();
  std::vector<Index> row_match(n, kUnmatched);
  std::vector<Index> col_match(n, kUnmatched);

  for (Index j = 0; j < n; ++j) {
    if (a.has_entry(j, j)) {
      row_match[j] = j;
      col_match[j] = j;
    }
  }

  std::vector<Index> visited(n, 0);
  Index stamp = 0;
  std::vector<Index> cols, pos, via;
  for (Index start = 0; start < n; ++start) {
    if (col_match[start] != kUnmatched) continue;
    ++stamp;
    cols.assign(1, start);
    pos.assign(1, a.col_ptr()[start]);
    via.clear();
    Index free_row = kUnmatched;

    while (!cols.empty() && free_row == kUnmatched) {
      const Index c = cols.back();
      Index& p = pos.back();
      const Index end = a.col_ptr()[c + 1];
      bool descended = false;
      while (p < end) {
        const Index r = a.row_idx()[p++];
        if (visited[r] == stamp) continue;
        visited[r] = stamp;
        if (row_match[r] == kUnmatched) {
          free_row = r;
          break;
        }
        via.push_back(r);
        cols.push_back(row_match[r]);
        pos.push_back(a.col_ptr()[row_match[r]]);
        descended = true;
        break;
      }
      if (free_row != kUnmatched || descended) continue;
      cols.pop_back();
      pos.pop_back();
      if (!via.empty()) via.pop_back();
    }

    if (free_row == kUnmatched)
      throw StructuralSingularityError("matrix is structurally singular: column " +
                                       std::to_string(start) + " cannot be matched");
    Index row = free_row;
    for (Index d = cols.size(); d-- > 0;) {
      const Index c = cols[d];
      row_match[row] = c;
      col_match[c] = row;
      if (d > 0) row = via[d - 1];
    }
  }
  return col_match;
}

}  // namespace sai
