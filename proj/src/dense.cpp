#include "biot/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace biot {

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& A) {
  DenseMatrix D(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) D(i, A.idx[p]) = A.val[p];
  return D;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

namespace {

// In-place lower Cholesky; throws on non-positive pivot.
void dense_cholesky(DenseMatrix& B) {
  const int n = B.rows;
  for (int j = 0; j < n; ++j) {
    double d = B(j, j);
    for (int k = 0; k < j; ++k) d -= B(j, k) * B(j, k);
    if (d <= 0.0 || !std::isfinite(d)) throw std::invalid_argument("dense_sym_eig: B is not SPD");
    B(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = B(i, j);
      for (int k = 0; k < j; ++k) s -= B(i, k) * B(j, k);
      B(i, j) = s / B(j, j);
    }
    for (int i = 0; i < j; ++i) B(i, j) = 0.0;
  }
}

void solve_lower_inplace(const DenseMatrix& L, std::span<double> x) {
  const int n = L.rows;
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= L(i, k) * x[k];
    x[i] = s / L(i, i);
  }
}

void solve_lower_transpose_inplace(const DenseMatrix& L, std::span<double> x) {
  const int n = L.rows;
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= L(k, i) * x[k];
    x[i] = s / L(i, i);
  }
}

} // namespace

std::vector<double> jacobi_eigenvalues(DenseMatrix C, DenseMatrix* vectors) {
  const int n = C.rows;
  DenseMatrix V(n, n);
  for (int i = 0; i < n; ++i) V(i, i) = 1.0;

  auto offdiag = [&]() {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i) s += C(i, j) * C(i, j);
    return std::sqrt(2.0 * s);
  };

  const double fro = C.frobenius_norm();
  const double tol = (fro > 0.0 ? fro : 1.0) * 1e-14;
  for (int sweep = 0; sweep < 64 && offdiag() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = C(p, q);
        if (std::abs(apq) <= tol / (2.0 * n)) continue;
        const double app = C(p, p), aqq = C(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double ckp = C(k, p), ckq = C(k, q);
          C(k, p) = c * ckp - s * ckq;
          C(k, q) = s * ckp + c * ckq;
        }
        for (int k = 0; k < n; ++k) {
          const double cpk = C(p, k), cqk = C(q, k);
          C(p, k) = c * cpk - s * cqk;
          C(q, k) = s * cpk + c * cqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = C(i, i);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return w[a] < w[b]; });
  std::vector<double> ws(n);
  DenseMatrix Vs(n, n);
  for (int k = 0; k < n; ++k) {
    ws[k] = w[order[k]];
    for (int i = 0; i < n; ++i) Vs(i, k) = V(i, order[k]);
  }
  if (vectors) *vectors = std::move(Vs);
  return ws;
}

EigResult dense_sym_eig(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.rows != A.cols || B.rows != B.cols || A.rows != B.rows)
    throw std::invalid_argument("dense_sym_eig: dimension mismatch");
  if (A.rows > 2000) throw std::invalid_argument("dense_sym_eig: size cap (2000) exceeded");
  const int n = A.rows;

  DenseMatrix L = B;
  dense_cholesky(L);

  // C = L^{-1} A L^{-T}, built column by column
  DenseMatrix C = A;
  for (int j = 0; j < n; ++j) solve_lower_inplace(L, C.col(j));
  // transpose, then another forward solve per column
  DenseMatrix Ct(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Ct(j, i) = C(i, j);
  for (int j = 0; j < n; ++j) solve_lower_inplace(L, Ct.col(j));

  EigResult r;
  DenseMatrix Y;
  r.values = jacobi_eigenvalues(std::move(Ct), &Y);
  // map back: x = L^{-T} y
  r.vectors = DenseMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) r.vectors(i, j) = Y(i, j);
    solve_lower_transpose_inplace(L, r.vectors.col(j));
  }
  return r;
}

std::vector<double> least_squares_constrained(const DenseMatrix& F) {
  const int n = F.rows;
  const int m = F.cols;
  if (m < 1) throw std::invalid_argument("least_squares_constrained: no columns");
  if (m == 1) return {1.0};

  // rhs = -F * centroid; columns of M are F * (e_i - e_{i+1})
  std::vector<double> rhs(n, 0.0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) rhs[i] -= F(i, j) / m;
  DenseMatrix M(n, m - 1);
  for (int j = 0; j + 1 < m; ++j)
    for (int i = 0; i < n; ++i) M(i, j) = F(i, j) - F(i, j + 1);

  // Householder QR with column pivoting, rank-truncated
  const int mc = m - 1;
  std::vector<int> piv(mc);
  std::iota(piv.begin(), piv.end(), 0);
  std::vector<double> beta(mc, 0.0);
  int rank = 0;
  double r00 = 0.0;
  for (int k = 0; k < mc && k < n; ++k) {
    // pivot on the largest remaining column norm
    int best = k;
    double bestn = -1.0;
    for (int j = k; j < mc; ++j) {
      double s = 0.0;
      for (int i = k; i < n; ++i) s += M(i, j) * M(i, j);
      if (s > bestn) {
        bestn = s;
        best = j;
      }
    }
    if (best != k) {
      for (int i = 0; i < n; ++i) std::swap(M(i, k), M(i, best));
      std::swap(piv[k], piv[best]);
    }
    const double colnorm = std::sqrt(std::max(bestn, 0.0));
    if (k == 0) r00 = colnorm;
    if (colnorm <= 1e-13 * std::max(r00, 1e-300)) break; // rank deficient: truncate
    // Householder vector for column k
    double alpha = M(k, k) >= 0 ? -colnorm : colnorm;
    double v0 = M(k, k) - alpha;
    M(k, k) = alpha;
    double vnorm2 = v0 * v0;
    for (int i = k + 1; i < n; ++i) vnorm2 += M(i, k) * M(i, k);
    if (vnorm2 == 0.0) break;
    // apply to remaining columns and rhs: H = I - 2 v v^T / (v^T v)
    for (int j = k + 1; j < mc; ++j) {
      double s = v0 * M(k, j);
      for (int i = k + 1; i < n; ++i) s += M(i, k) * M(i, j);
      const double f = 2.0 * s / vnorm2;
      M(k, j) -= f * v0;
      for (int i = k + 1; i < n; ++i) M(i, j) -= f * M(i, k);
    }
    {
      double s = v0 * rhs[k];
      for (int i = k + 1; i < n; ++i) s += M(i, k) * rhs[i];
      const double f = 2.0 * s / vnorm2;
      rhs[k] -= f * v0;
      for (int i = k + 1; i < n; ++i) rhs[i] -= f * M(i, k);
    }
    beta[k] = vnorm2;
    ++rank;
  }

  // back substitution on the rank x rank leading block; free gammas are zero
  std::vector<double> gamma(mc, 0.0);
  for (int k = rank - 1; k >= 0; --k) {
    double s = rhs[k];
    for (int j = k + 1; j < rank; ++j) s -= M(k, j) * gamma[piv[j]];
    gamma[piv[k]] = s / M(k, k);
  }

  std::vector<double> alpha(m, 1.0 / m);
  for (int j = 0; j + 1 < m; ++j) {
    alpha[j] += gamma[j];
    alpha[j + 1] -= gamma[j];
  }
  return alpha;
}

double residual_norm(const DenseMatrix& F, const std::vector<double>& alpha) {
  std::vector<double> r(F.rows, 0.0);
  for (int j = 0; j < F.cols; ++j)
    for (int i = 0; i < F.rows; ++i) r[i] += F(i, j) * alpha[j];
  return nrm2(r);
}

} // namespace biot
