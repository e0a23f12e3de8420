#pragma once

#include <vector>

#include "sai/csc_matrix.hpp"

namespace sai {

/** Row permutation giving a structurally zero-free diagonal.
 *
 * Returns perm with perm[j] = row of A placed at position j, so that
 * (P A)(j, j) = A(perm[j], j) is a stored entry for every j. Computed by a
 * maximum bipartite matching (depth-first augmenting paths seeded with the
 * existing diagonal). Throws StructuralSingularityError when no perfect
 * matching exists.
 */
std::vector<Index> zero_free_diagonal_permutation(const CscMatrix& a);

bool has_zero_free_diagonal(const CscMatrix& a);

bool is_identity_permutation(const std::vector<Index>& perm);

}  // namespace sai
