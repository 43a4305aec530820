#pragma once

#include <filesystem>

#include "submod/common.hpp"

namespace submod {

// Matrix files are either headerless CSV (one row per item) or the binary
// layout: magic "SBMD", u16 version = 1, u32 rows, u32 cols, then rows*cols
// little-endian float32 values in row-major order. Readers sniff the magic.

Matrix read_matrix(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);

/// One real per line.
Vector read_scalar_column(const std::filesystem::path& path);
void write_scalar_column(const std::filesystem::path& path, const Vector& v);

}  // namespace submod
