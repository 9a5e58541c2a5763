#pragma once

#include <string>
#include <variant>

#include "sylkrylov/dense_matrix.hpp"
#include "sylkrylov/sparse_matrix.hpp"

namespace sylkrylov {

using MatrixVariant = std::variant<SparseMatrix, DenseMatrix>;

/// Reads a Matrix Market file: coordinate real general/symmetric becomes a
/// SparseMatrix (symmetric storage expanded to full), array real general
/// becomes a DenseMatrix. Anything else raises ParseError.
MatrixVariant read_matrix_market(const std::string& path);

/// As read_matrix_market but requires the given kind.
SparseMatrix read_matrix_market_sparse(const std::string& path);
DenseMatrix read_matrix_market_dense(const std::string& path);

/// Writes coordinate real general with 17 significant digits (round-trip exact).
void write_matrix_market(const SparseMatrix& m, const std::string& path);

/// Writes array real general with 17 significant digits (round-trip exact).
void write_matrix_market(const DenseMatrix& m, const std::string& path);

}  // namespace sylkrylov
