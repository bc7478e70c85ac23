#pragma once

#include "xcca/matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace xcca {

enum class MatrixFormat { kCsv, kMxb };

/// Picks the format from the file extension (".mxb" -> MXB, anything else -> CSV).
MatrixFormat format_from_path(const std::filesystem::path& path);

Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
Matrix load_matrix(const std::filesystem::path& path);

void save_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format);
void save_matrix(const Matrix& m, const std::filesystem::path& path);

// MXB layout: "MXB1", u64 rows, u64 cols (little-endian), then rows*cols
// little-endian binary64 values in row-major order.
void write_mxb(std::ostream& out, const Matrix& m);
Matrix read_mxb(std::istream& in, std::string_view what);

/// Parses CSV text. An optional first line whose first cell is not numeric is
/// treated as a header and skipped.
Matrix parse_csv(std::string_view text, std::string_view what);

}  // namespace xcca
