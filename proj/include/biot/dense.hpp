#pragma once

#include <vector>

#include "biot/sparse.hpp"

namespace biot {

// Column-major dense matrix, just enough for the desk-scale eigensolver and
// the small least-squares problems.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(j) * rows + i]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(j) * rows + i]; }

  std::span<double> col(int j) { return {a.data() + static_cast<std::size_t>(j) * rows, static_cast<std::size_t>(rows)}; }
  std::span<const double> col(int j) const { return {a.data() + static_cast<std::size_t>(j) * rows, static_cast<std::size_t>(rows)}; }

  static DenseMatrix from_sparse(const SparseMatrix& A);
  double frobenius_norm() const;
};

struct EigResult {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // columns are eigenvectors of A x = lambda B x
};

// Generalized symmetric eigenproblem A x = lambda B x with B SPD, solved by
// the B-Cholesky reduction followed by cyclic Jacobi rotations. Dimension is
// capped at 2000; this is a verification tool, not a production eigensolver.
EigResult dense_sym_eig(const DenseMatrix& A, const DenseMatrix& B);

// Eigenvalues only, for the standard symmetric problem.
std::vector<double> jacobi_eigenvalues(DenseMatrix C, DenseMatrix* vectors = nullptr);

// min ||F alpha||_2 subject to sum(alpha) = 1. The constraint is removed by
// writing alpha = centroid + Z gamma with Z the consecutive-difference basis
// of the sum-zero subspace; the reduced problem is solved by Householder QR
// with column pivoting, zeroing redundant directions. Duplicate columns in F
// therefore fall back toward the centroid weights ([0.5, 0.5] for two equal
// columns) and the weights always sum to 1 exactly up to roundoff.
std::vector<double> least_squares_constrained(const DenseMatrix& F);

// Residual 2-norm ||F alpha|| for a given weight vector (test helper).
double residual_norm(const DenseMatrix& F, const std::vector<double>& alpha);

} // namespace biot
