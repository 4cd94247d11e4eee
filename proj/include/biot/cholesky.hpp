#pragma once

#include <string>
#include <vector>

#include "biot/sparse.hpp"

namespace biot {

// Sparse Cholesky factor L with A ~= P^T (L L^T) P for the permutation P
// stored as a row map. Exact factors use a reverse Cuthill-McKee ordering;
// incomplete factors keep the natural ordering so drop patterns are
// reproducible. L is stored column-wise; the same arrays serve the forward
// sweep (columns of L) and the transposed sweep (rows of L^T).
struct CholeskyFactor {
  int n = 0;
  bool exact = true;
  double droptol = 0.0;
  double shift = 0.0;
  std::vector<int> perm;     // new index -> old index; empty = identity
  std::vector<int> col_ptr;  // size n+1
  std::vector<int> row_idx;  // entries, diagonal first in each column
  std::vector<double> lval;

  int nnz() const { return static_cast<int>(row_idx.size()); }

  // x = (L L^T)^{-1} b in the permuted ordering, unpermuted in/out.
  void solve(std::span<const double> b, std::span<double> x) const;
  Vec solve(const Vec& b) const;

  // L (L^T y) for reconstruction checks.
  void multiply(std::span<const double> x, std::span<double> y) const;
};

// Thrown when a pivot is non-positive; carries the offending row so callers
// can raise the shift and retry.
struct NotPositiveDefinite : std::runtime_error {
  int row;
  explicit NotPositiveDefinite(int r)
      : std::runtime_error("cholesky: non-positive pivot at row " + std::to_string(r)),
        row(r) {}
};

// Reverse Cuthill-McKee ordering of the symmetric pattern of A.
std::vector<int> rcm_ordering(const SparseMatrix& A);

// Exact factorization (up-looking, elimination-tree based) of the SPD matrix
// A, preordered with RCM.
CholeskyFactor cholesky_exact(const SparseMatrix& A);

// Threshold incomplete factorization of A + shift*diag(diag(A)). An entry
// L(i,j) is dropped when |L(i,j)| < droptol * ||row i of the shifted A||_2;
// dropped entries do not propagate into later updates. droptol = 0 keeps
// every entry (exact factor up to ordering).
CholeskyFactor cholesky_incomplete(const SparseMatrix& A, double droptol, double shift);

} // namespace biot
