#pragma once

#include <filesystem>
#include <iosfwd>

#include "sai/csc_matrix.hpp"

namespace sai {

/** Reads a Matrix Market coordinate file with a real field.
 *
 * Symmetric and skew-symmetric files are expanded to general storage and
 * duplicate entries are summed. Pattern, integer and complex fields, as well
 * as dense array files, are rejected with UnsupportedFieldError.
 */
CscMatrix read_matrix_market(std::istream& in);
CscMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes "coordinate real general" with 1-based indices and round-trip precision.
void write_matrix_market(std::ostream& out, const CscMatrix& a);
void write_matrix_market(const std::filesystem::path& path, const CscMatrix& a);

}  // namespace sai
