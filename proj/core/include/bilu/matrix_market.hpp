#pragma once

#include <bilu/sparse.hpp>

#include <filesystem>
#include <istream>

namespace bilu {

/// Reads a Matrix Market coordinate file with a real (or integer) field and
/// general or symmetric symmetry. Indices are converted to 0-based and
/// symmetric files are mirrored into full storage. Errors are reported as
/// ParseError carrying the offending line number.
CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market(const std::filesystem::path& path);

}  // namespace bilu
