#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace biot {

using Vec = std::vector<double>;

// Compressed-sparse-row matrix. Column indices are strictly increasing
// within each row and no explicit zeros are stored after finalization.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> ptr;    // size rows+1
  std::vector<int> idx;    // size nnz
  std::vector<double> val; // size nnz

  int nnz() const { return static_cast<int>(idx.size()); }
  bool empty() const { return rows == 0 || cols == 0; }

  static SparseMatrix identity(int n);

  // Entry lookup by binary search; zero if not stored.
  double at(int i, int j) const;

  std::vector<double> diagonal() const;
  // Euclidean norms of each row.
  std::vector<double> row_norms() const;
  double frobenius_norm() const;

  bool pattern_sorted() const;
};

// Triplet accumulator. Duplicate (i,j) entries are summed during build in
// insertion order, so a fixed insertion layout gives bit-reproducible
// matrices no matter how the fill loop was scheduled.
class TripletBuffer {
public:
  TripletBuffer() = default;
  explicit TripletBuffer(std::size_t reserve_hint);

  void reserve(std::size_t n);
  // Pre-size the buffer so parallel writers can fill disjoint slots.
  void resize(std::size_t n);
  void add(int i, int j, double v);
  void set(std::size_t slot, int i, int j, double v);
  std::size_t size() const { return r_.size(); }

  // Sorts by (row, col, slot) and sums duplicates; entries that cancel to
  // exactly 0.0 are kept out of the pattern only if never touched, so the
  // assembled pattern is insertion-stable.
  SparseMatrix build(int rows, int cols) const;

private:
  std::vector<int> r_, c_;
  std::vector<double> v_;
};

// y = A x, OpenMP-parallel over rows. Each row is reduced serially, so the
// result is identical to spmv_serial for any thread count.
void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y);

// Reference kernel used by tests and the kernel benchmark.
void spmv_serial(const SparseMatrix& A, std::span<const double> x, std::span<double> y);

// y += alpha * A x (serial).
void spmv_add(const SparseMatrix& A, std::span<const double> x, std::span<double> y,
              double alpha = 1.0);

SparseMatrix transpose(const SparseMatrix& A);

// C = alpha*A + beta*B on the union pattern.
SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B, double alpha, double beta);

SparseMatrix scale(const SparseMatrix& A, double alpha);

// Submatrix with the given (sorted) row and column index sets kept.
SparseMatrix restrict_matrix(const SparseMatrix& A, const std::vector<int>& keep_rows,
                             const std::vector<int>& keep_cols);

// max_ij |A - A^T| / max_ij |A|; zero for structurally+numerically symmetric input.
double symmetry_error(const SparseMatrix& A);

// --- small vector helpers -------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double nrm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);

} // namespace biot
