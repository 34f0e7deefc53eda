#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ave/linalg.hpp"

namespace ave {

/// Reads a Matrix Market file. Coordinate files (real/integer/pattern,
/// general/symmetric/skew-symmetric) become SparseMatrix; array files become
/// DenseMatrix. Malformed input throws ParseError naming the line.
Matrix read_matrix_market(std::istream& in, const std::string& source = "<stream>");
Matrix read_matrix_market(const std::filesystem::path& path);

/// Writes `coordinate real general` with 17 significant digits. Dense
/// matrices are written in coordinate form too (nonzeros only).
void write_matrix_market(std::ostream& out, const Matrix& a);
void write_matrix_market(const std::filesystem::path& path, const Matrix& a);

/// One entry per line; blank lines and '#' / '%' comments are skipped.
/// Commas and whitespace are both accepted as separators.
Vector read_vector(std::istream& in, const std::string& source = "<stream>");
Vector read_vector(const std::filesystem::path& path);
void write_vector(std::ostream& out, const Vector& v);
void write_vector(const std::filesystem::path& path, const Vector& v);

/// Dense matrix as CSV, one row per line.
DenseMatrix read_dense_csv(std::istream& in, const std::string& source = "<stream>");
void write_dense_csv(std::ostream& out, const DenseMatrix& a);

}  // namespace ave
