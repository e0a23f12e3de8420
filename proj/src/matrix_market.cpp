#include "sai/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sai/errors.hpp"

namespace sai {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

enum class Symmetry { general, symmetric, skew };

}  // namespace

CscMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("matrix market: empty input");

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw ParseError("matrix market: malformed header line: " + line);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format != "coordinate") throw UnsupportedFieldError("matrix market: only coordinate format is supported");
  if (field == "pattern" || field == "integer" || field == "complex")
    throw UnsupportedFieldError("matrix market: unsupported field '" + field + "'");
  if (field != "real" && field != "double") throw ParseError("matrix market: unknown field '" + field + "'");

  Symmetry sym;
  if (symmetry == "general") {
    sym = Symmetry::general;
  } else if (symmetry == "symmetric") {
    sym = Symmetry::symmetric;
  } else if (symmetry == "skew-symmetric") {
    sym = Symmetry::skew;
  } else if (symmetry == "hermitian") {
    throw UnsupportedFieldError("matrix market: hermitian storage is unsupported");
  } else {
    throw ParseError("matrix market: unknown symmetry '" + symmetry + "'");
  }

  // skip comments and blank lines
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    break;
  }
  long long rows = -1, cols = -1, nnz = -1;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
      throw ParseError("matrix market: malformed size line: " + line);
  }

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(sym == Symmetry::general ? nnz : 2 * nnz));
  long long seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v)) throw ParseError("matrix market: malformed entry line: " + line);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError("matrix market: entry (" + std::to_string(i) + "," + std::to_string(j) +
                       ") outside declared " + std::to_string(rows) + "x" + std::to_string(cols));
    if (!std::isfinite(v)) throw ParseError("matrix market: non-finite value: " + line);
    Index r = static_cast<Index>(i - 1);
    Index c = static_cast<Index>(j - 1);
    entries.push_back({r, c, v});
    if (sym != Symmetry::general && r != c) entries.push_back({c, r, sym == Symmetry::skew ? -v : v});
    ++seen;
  }
  if (seen != nnz)
    throw ParseError("matrix market: expected " + std::to_string(nnz) + " entries, found " +
                     std::to_string(seen));
  return CscMatrix::from_triplets(static_cast<Index>(rows), static_cast<Index>(cols), entries);
}

CscMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_matrix_market(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const UnsupportedFieldError& e) {
    throw UnsupportedFieldError(path.string() + ": " + e.what());
  }
}

void write_matrix_market(std::ostream& out, const CscMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out.precision(std::numeric_limits<double>::max_digits10);
  for (Index j = 0; j < a.cols(); ++j) {
    auto r = a.col_rows(j);
    auto v = a.col_values(j);
    for (std::size_t t = 0; t < r.size(); ++t) out << r[t] + 1 << ' ' << j + 1 << ' ' << v[t] << '\n';
  }
}

void write_matrix_market(const std::filesystem::path& path, const CscMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_matrix_market(out, a);
}

}  // namespace sai
