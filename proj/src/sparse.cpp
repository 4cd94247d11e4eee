#include "biot/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace biot {

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix I;
  I.rows = I.cols = n;
  I.ptr.resize(n + 1);
  I.idx.resize(n);
  I.val.assign(n, 1.0);
  for (int i = 0; i <= n; ++i) I.ptr[i] = i;
  for (int i = 0; i < n; ++i) I.idx[i] = i;
  return I;
}

double SparseMatrix::at(int i, int j) const {
  auto lo = idx.begin() + ptr[i], hi = idx.begin() + ptr[i + 1];
  auto it = std::lower_bound(lo, hi, j);
  if (it == hi || *it != j) return 0.0;
  return val[static_cast<std::size_t>(it - idx.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (int i = 0; i < rows; ++i) d[i] = at(i, i);
  return d;
}

std::vector<double> SparseMatrix::row_norms() const {
  std::vector<double> n(rows, 0.0);
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int p = ptr[i]; p < ptr[i + 1]; ++p) s += val[p] * val[p];
    n[i] = std::sqrt(s);
  }
  return n;
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : val) s += v * v;
  return std::sqrt(s);
}

bool SparseMatrix::pattern_sorted() const {
  for (int i = 0; i < rows; ++i)
    for (int p = ptr[i] + 1; p < ptr[i + 1]; ++p)
      if (idx[p - 1] >= idx[p]) return false;
  return true;
}

TripletBuffer::TripletBuffer(std::size_t reserve_hint) { reserve(reserve_hint); }

void TripletBuffer::reserve(std::size_t n) {
  r_.reserve(n);
  c_.reserve(n);
  v_.reserve(n);
}

void TripletBuffer::resize(std::size_t n) {
  r_.resize(n, 0);
  c_.resize(n, 0);
  v_.resize(n, 0.0);
}

void TripletBuffer::add(int i, int j, double v) {
  r_.push_back(i);
  c_.push_back(j);
  v_.push_back(v);
}

void TripletBuffer::set(std::size_t slot, int i, int j, double v) {
  r_[slot] = i;
  c_[slot] = j;
  v_[slot] = v;
}

SparseMatrix TripletBuffer::build(int rows, int cols) const {
  const std::size_t n = r_.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (r_[a] != r_[b]) return r_[a] < r_[b];
    if (c_[a] != c_[b]) return c_[a] < c_[b];
    return a < b; // total order: duplicate sums run in slot order
  });

  SparseMatrix A;
  A.rows = rows;
  A.cols = cols;
  A.ptr.assign(rows + 1, 0);
  A.idx.reserve(n);
  A.val.reserve(n);

  std::size_t k = 0;
  for (int i = 0; i < rows; ++i) {
    while (k < n && r_[order[k]] == i) {
      const int j = c_[order[k]];
      double s = v_[order[k]];
      ++k;
      while (k < n && r_[order[k]] == i && c_[order[k]] == j) {
        s += v_[order[k]];
        ++k;
      }
      A.idx.push_back(j);
      A.val.push_back(s);
    }
    A.ptr[i + 1] = static_cast<int>(A.idx.size());
  }
  if (k != n) throw std::invalid_argument("TripletBuffer::build: row index out of range");
  return A;
}

void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != A.cols || static_cast<int>(y.size()) != A.rows)
    throw std::invalid_argument("spmv: dimension mismatch");
#pragma omp parallel for schedule(static)
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) s += A.val[p] * x[A.idx[p]];
    y[i] = s;
  }
}

void spmv_serial(const SparseMatrix& A, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != A.cols || static_cast<int>(y.size()) != A.rows)
    throw std::invalid_argument("spmv_serial: dimension mismatch");
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) s += A.val[p] * x[A.idx[p]];
    y[i] = s;
  }
}

void spmv_add(const SparseMatrix& A, std::span<const double> x, std::span<double> y,
              double alpha) {
  if (static_cast<int>(x.size()) != A.cols || static_cast<int>(y.size()) != A.rows)
    throw std::invalid_argument("spmv_add: dimension mismatch");
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) s += A.val[p] * x[A.idx[p]];
    y[i] += alpha * s;
  }
}

SparseMatrix transpose(const SparseMatrix& A) {
  SparseMatrix T;
  T.rows = A.cols;
  T.cols = A.rows;
  T.ptr.assign(A.cols + 1, 0);
  T.idx.resize(A.idx.size());
  T.val.resize(A.val.size());
  for (int p = 0; p < A.nnz(); ++p) ++T.ptr[A.idx[p] + 1];
  for (int j = 0; j < A.cols; ++j) T.ptr[j + 1] += T.ptr[j];
  std::vector<int> next(T.ptr.begin(), T.ptr.end() - 1);
  for (int i = 0; i < A.rows; ++i)
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) {
      const int q = next[A.idx[p]]++;
      T.idx[q] = i;
      T.val[q] = A.val[p];
    }
  return T;
}

SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B, double alpha, double beta) {
  if (A.rows != B.rows || A.cols != B.cols)
    throw std::invalid_argument("add: dimension mismatch");
  SparseMatrix C;
  C.rows = A.rows;
  C.cols = A.cols;
  C.ptr.assign(A.rows + 1, 0);
  for (int i = 0; i < A.rows; ++i) {
    int pa = A.ptr[i], pb = B.ptr[i];
    while (pa < A.ptr[i + 1] || pb < B.ptr[i + 1]) {
      int ja = pa < A.ptr[i + 1] ? A.idx[pa] : C.cols;
      int jb = pb < B.ptr[i + 1] ? B.idx[pb] : C.cols;
      if (ja == jb) {
        C.idx.push_back(ja);
        C.val.push_back(alpha * A.val[pa++] + beta * B.val[pb++]);
      } else if (ja < jb) {
        C.idx.push_back(ja);
        C.val.push_back(alpha * A.val[pa++]);
      } else {
        C.idx.push_back(jb);
        C.val.push_back(beta * B.val[pb++]);
      }
    }
    C.ptr[i + 1] = static_cast<int>(C.idx.size());
  }
  return C;
}

SparseMatrix scale(const SparseMatrix& A, double alpha) {
  SparseMatrix C = A;
  for (double& v : C.val) v *= alpha;
  return C;
}

SparseMatrix restrict_matrix(const SparseMatrix& A, const std::vector<int>& keep_rows,
                             const std::vector<int>& keep_cols) {
  std::vector<int> cmap(A.cols, -1);
  for (std::size_t k = 0; k < keep_cols.size(); ++k) cmap[keep_cols[k]] = static_cast<int>(k);
  SparseMatrix R;
  R.rows = static_cast<int>(keep_rows.size());
  R.cols = static_cast<int>(keep_cols.size());
  R.ptr.assign(R.rows + 1, 0);
  for (int r = 0; r < R.rows; ++r) {
    const int i = keep_rows[r];
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) {
      const int jc = cmap[A.idx[p]];
      if (jc >= 0) {
        R.idx.push_back(jc);
        R.val.push_back(A.val[p]);
      }
    }
    R.ptr[r + 1] = static_cast<int>(R.idx.size());
  }
  return R;
}

double symmetry_error(const SparseMatrix& A) {
  const SparseMatrix T = transpose(A);
  double scale = 0.0, err = 0.0;
  for (double v : A.val) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < A.rows; ++i) {
    int pa = A.ptr[i], pt = T.ptr[i];
    while (pa < A.ptr[i + 1] || pt < T.ptr[i + 1]) {
      int ja = pa < A.ptr[i + 1] ? A.idx[pa] : A.cols;
      int jt = pt < T.ptr[i + 1] ? T.idx[pt] : A.cols;
      if (ja == jt)
        err = std::max(err, std::abs(A.val[pa++] - T.val[pt++]));
      else if (ja < jt)
        err = std::max(err, std::abs(A.val[pa++]));
      else
        err = std::max(err, std::abs(T.val[pt++]));
    }
  }
  return scale > 0.0 ? err / scale : err;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

} // namespace biot
