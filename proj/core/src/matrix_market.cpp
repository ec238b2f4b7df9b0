#include <bilu/matrix_market.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace bilu {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    const std::size_t start = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) +
                         "'",
                     line);
  return value;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

}  // namespace

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty input", 1);
  ++lineno;
  const auto header = split_ws(line);
  if (header.size() != 5 || lower(header[0]) != "%%matrixmarket")
    throw ParseError("missing '%%MatrixMarket' banner", lineno);
  if (lower(header[1]) != "matrix")
    throw ParseError("object '" + std::string(header[1]) + "' not supported",
                     lineno);
  if (lower(header[2]) != "coordinate")
    throw ParseError("format '" + std::string(header[2]) +
                         "' not supported (coordinate only)",
                     lineno);
  const std::string field = lower(header[3]);
  if (field != "real" && field != "integer")
    throw ParseError("field '" + std::string(header[3]) +
                         "' not supported (real or integer only)",
                     lineno);
  const std::string symmetry = lower(header[4]);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("symmetry '" + std::string(header[4]) +
                         "' not supported (general or symmetric only)",
                     lineno);
  const bool symmetric = symmetry == "symmetric";

  // size line, after any comments
  std::vector<std::string_view> tok;
  while (true) {
    if (!std::getline(in, line)) throw ParseError("missing size line", lineno + 1);
    ++lineno;
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    tok = split_ws(line);
    break;
  }
  if (tok.size() != 3) throw ParseError("size line needs 3 integers", lineno);
  const auto rows = parse_number<std::int64_t>(tok[0], lineno, "row count");
  const auto cols = parse_number<std::int64_t>(tok[1], lineno, "column count");
  const auto nnz = parse_number<std::int64_t>(tok[2], lineno, "entry count");
  if (rows < 0 || cols < 0 || nnz < 0)
    throw ParseError("negative size", lineno);
  if (rows > std::numeric_limits<index_t>::max() ||
      cols > std::numeric_limits<index_t>::max())
    throw ParseError("dimension exceeds 32-bit index range", lineno);
  if (symmetric && rows != cols)
    throw ParseError("symmetric matrix must be square", lineno);

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  std::int64_t seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    tok = split_ws(line);
    if (tok.size() != 3)
      throw ParseError("entry needs 'row col value', got " +
                           std::to_string(tok.size()) + " tokens",
                       lineno);
    const auto i = parse_number<std::int64_t>(tok[0], lineno, "row index");
    const auto j = parse_number<std::int64_t>(tok[1], lineno, "column index");
    const auto v = parse_number<double>(tok[2], lineno, "value");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError("index (" + std::to_string(i) + ", " +
                           std::to_string(j) + ") outside declared " +
                           std::to_string(rows) + " x " + std::to_string(cols),
                       lineno);
    const auto r = static_cast<index_t>(i - 1);
    const auto c = static_cast<index_t>(j - 1);
    entries.push_back({r, c, v});
    if (symmetric && r != c) entries.push_back({c, r, v});
    ++seen;
  }
  if (seen < nnz)
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                         std::to_string(seen),
                     lineno + 1);

  return csr_from_triplets(static_cast<index_t>(rows),
                           static_cast<index_t>(cols), entries);
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  return read_matrix_market(in);
}

}  // namespace bilu
