#pragma once

#include <iosfwd>
#include <string>

#include "biot/sparse.hpp"

namespace biot {

// Matrix Market I/O. Matrices use "coordinate real general" with the stored
// pattern written as-is; vectors use "array real general" with one column.
// Values are printed with 17 significant digits so doubles round-trip exactly.

void write_matrix_market(std::ostream& os, const SparseMatrix& A);
void write_matrix_market(const std::string& path, const SparseMatrix& A);
SparseMatrix read_matrix_market(std::istream& is);
SparseMatrix read_matrix_market_file(const std::string& path);

void write_matrix_market_vector(std::ostream& os, const Vec& v);
void write_matrix_market_vector(const std::string& path, const Vec& v);
Vec read_matrix_market_vector(std::istream& is);
Vec read_matrix_market_vector_file(const std::string& path);

} // namespace biot
