#pragma once

// Plain numeric CSV: one matrix row per line, comma separated.

#include <iosfwd>
#include <string>
#include <string_view>

#include "netsync/matrix.hpp"

namespace netsync {

Matrix parse_matrix_csv(std::string_view text);
Matrix read_matrix_csv(const std::string& path);

/// Writes with round-trip precision (%.17g).
void write_matrix_csv(std::ostream& out, const Matrix& m);
std::string format_matrix_csv(const Matrix& m);

/// Writes `contents` to path via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace netsync
