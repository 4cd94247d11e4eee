#include "biot/cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace biot {

namespace {

// P A P^T for a row map perm (new -> old), pattern re-sorted.
SparseMatrix permute_sym(const SparseMatrix& A, const std::vector<int>& perm) {
  const int n = A.rows;
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[perm[i]] = i;
  TripletBuffer t(A.idx.size());
  for (int i = 0; i < n; ++i)
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) t.add(inv[i], inv[A.idx[p]], A.val[p]);
  return t.build(n, n);
}

} // namespace

std::vector<int> rcm_ordering(const SparseMatrix& A) {
  const int n = A.rows;
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) degree[i] = A.ptr[i + 1] - A.ptr[i];

  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  std::vector<int> level, next;

  auto bfs = [&](int start, std::vector<int>* out) {
    int last = start;
    std::queue<int> q;
    q.push(start);
    visited[start] = 1;
    if (out) out->push_back(start);
    std::vector<int> nbrs;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      last = u;
      nbrs.clear();
      for (int p = A.ptr[u]; p < A.ptr[u + 1]; ++p) {
        const int v = A.idx[p];
        if (v != u && !visited[v]) nbrs.push_back(v);
      }
      std::sort(nbrs.begin(), nbrs.end(),
                [&](int a, int b) { return degree[a] != degree[b] ? degree[a] < degree[b] : a < b; });
      for (int v : nbrs) {
        visited[v] = 1;
        if (out) out->push_back(v);
        q.push(v);
      }
    }
    return last;
  };

  for (int s = 0; s < n; ++s) {
    if (visited[s]) continue;
    // pseudo-peripheral start: BFS once to find a far node, then order from it
    const int far = bfs(s, nullptr);
    std::fill(visited.begin(), visited.end(), 0);
    for (int v : order) visited[v] = 1;
    bfs(far, &order);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

CholeskyFactor cholesky_exact(const SparseMatrix& A) {
  if (A.rows != A.cols) throw std::invalid_argument("cholesky_exact: square matrix required");
  const int n = A.rows;
  CholeskyFactor F;
  F.n = n;
  F.exact = true;
  if (n == 0) {
    F.col_ptr.assign(1, 0);
    return F;
  }
  F.perm = rcm_ordering(A);
  const SparseMatrix Ap = permute_sym(A, F.perm);

  // elimination tree
  std::vector<int> parent(n, -1), ancestor(n, -1);
  for (int k = 0; k < n; ++k)
    for (int p = Ap.ptr[k]; p < Ap.ptr[k + 1]; ++p) {
      int i = Ap.idx[p];
      while (i != -1 && i < k) {
        const int inext = ancestor[i];
        ancestor[i] = k;
        if (inext == -1) parent[i] = k;
        i = inext;
      }
    }

  std::vector<std::vector<int>> crow(n);
  std::vector<std::vector<double>> cval(n);
  std::vector<double> x(n, 0.0);
  std::vector<int> stamp(n, -1), stack(n), path(n);

  for (int k = 0; k < n; ++k) {
    // scatter row k of the lower triangle and collect the etree reach
    double d = 0.0;
    stamp[k] = k;
    int top = n;
    for (int p = Ap.ptr[k]; p < Ap.ptr[k + 1]; ++p) {
      const int j = Ap.idx[p];
      if (j > k) continue;
      if (j == k) {
        d = Ap.val[p];
        continue;
      }
      x[j] = Ap.val[p];
      int len = 0, i = j;
      while (stamp[i] != k) {
        path[len++] = i;
        stamp[i] = k;
        i = parent[i];
      }
      while (len > 0) stack[--top] = path[--len];
    }
    // triangular solve along the pattern (topological order)
    for (int t = top; t < n; ++t) {
      const int j = stack[t];
      const double lkj = x[j] / cval[j][0];
      x[j] = 0.0;
      const auto& rj = crow[j];
      const auto& vj = cval[j];
      for (std::size_t p = 1; p < rj.size(); ++p) x[rj[p]] -= vj[p] * lkj;
      d -= lkj * lkj;
      crow[j].push_back(k);
      cval[j].push_back(lkj);
    }
    if (d <= 0.0 || !std::isfinite(d)) throw NotPositiveDefinite(k);
    crow[k].push_back(k);
    cval[k].push_back(std::sqrt(d));
  }

  F.col_ptr.assign(n + 1, 0);
  std::size_t total = 0;
  for (int j = 0; j < n; ++j) total += crow[j].size();
  F.row_idx.reserve(total);
  F.lval.reserve(total);
  for (int j = 0; j < n; ++j) {
    F.col_ptr[j + 1] = F.col_ptr[j] + static_cast<int>(crow[j].size());
    F.row_idx.insert(F.row_idx.end(), crow[j].begin(), crow[j].end());
    F.lval.insert(F.lval.end(), cval[j].begin(), cval[j].end());
  }
  return F;
}

CholeskyFactor cholesky_incomplete(const SparseMatrix& A, double droptol, double shift) {
  if (A.rows != A.cols)
    throw std::invalid_argument("cholesky_incomplete: square matrix required");
  const int n = A.rows;
  CholeskyFactor F;
  F.n = n;
  F.exact = false;
  F.droptol = droptol;
  F.shift = shift;
  if (n == 0) {
    F.col_ptr.assign(1, 0);
    return F;
  }

  const std::vector<double> dg = A.diagonal();
  std::vector<double> rn(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) {
      double v = A.val[p];
      if (A.idx[p] == i) v += shift * dg[i];
      s += v * v;
    }
    rn[i] = std::sqrt(s);
  }

  std::vector<std::vector<int>> crow(n);
  std::vector<std::vector<double>> cval(n);
  std::vector<double> diag(n, 0.0);
  std::vector<double> w(n, 0.0);
  std::vector<int> inpat(n, -1);
  std::priority_queue<int, std::vector<int>, std::greater<int>> heap;

  for (int i = 0; i < n; ++i) {
    double wd = 0.0;
    for (int p = A.ptr[i]; p < A.ptr[i + 1]; ++p) {
      const int j = A.idx[p];
      if (j > i) continue;
      if (j == i) {
        wd = A.val[p] + shift * dg[i];
      } else {
        w[j] = A.val[p];
        inpat[j] = i;
        heap.push(j);
      }
    }
    std::vector<int>& ri = crow[i]; // reused as scratch for kept column indices
    std::vector<double> vi;
    while (!heap.empty()) {
      const int k = heap.top();
      heap.pop();
      const double lik = w[k] / diag[k];
      w[k] = 0.0;
      if (std::abs(lik) < droptol * rn[i]) continue; // dropped; not propagated
      ri.push_back(k);
      vi.push_back(lik);
      wd -= lik * lik;
      const auto& rk = crow[k];
      const auto& vk = cval[k];
      for (std::size_t p = 0; p < rk.size(); ++p) {
        const int j = rk[p];
        if (j >= i) break; // columns are filled in increasing row order
        if (j <= k) continue;
        if (inpat[j] != i) {
          inpat[j] = i;
          w[j] = 0.0;
          heap.push(j);
        }
        w[j] -= lik * vk[p];
      }
    }
    if (wd <= 0.0 || !std::isfinite(wd)) throw NotPositiveDefinite(i);
    diag[i] = std::sqrt(wd);
    // scatter the kept row entries into their columns (ascending row order)
    for (std::size_t p = 0; p < ri.size(); ++p) {
      crow[ri[p]].push_back(i);
      cval[ri[p]].push_back(vi[p]);
    }
    ri.clear();
  }

  F.col_ptr.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) {
    F.col_ptr[j + 1] = F.col_ptr[j] + 1 + static_cast<int>(crow[j].size());
  }
  F.row_idx.resize(F.col_ptr[n]);
  F.lval.resize(F.col_ptr[n]);
  for (int j = 0; j < n; ++j) {
    int q = F.col_ptr[j];
    F.row_idx[q] = j;
    F.lval[q] = diag[j];
    ++q;
    for (std::size_t p = 0; p < crow[j].size(); ++p, ++q) {
      F.row_idx[q] = crow[j][p];
      F.lval[q] = cval[j][p];
    }
  }
  return F;
}

void CholeskyFactor::solve(std::span<const double> b, std::span<double> x) const {
  if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
    throw std::invalid_argument("cholesky solve: dimension mismatch");
  static thread_local std::vector<double> y;
  y.resize(n);
  if (perm.empty())
    std::copy(b.begin(), b.end(), y.begin());
  else
    for (int i = 0; i < n; ++i) y[i] = b[perm[i]];
  // forward: L z = y (column sweep, in place)
  for (int j = 0; j < n; ++j) {
    const double zj = y[j] / lval[col_ptr[j]];
    y[j] = zj;
    for (int p = col_ptr[j] + 1; p < col_ptr[j + 1]; ++p) y[row_idx[p]] -= lval[p] * zj;
  }
  // backward: L^T x = z
  for (int j = n - 1; j >= 0; --j) {
    double s = y[j];
    for (int p = col_ptr[j] + 1; p < col_ptr[j + 1]; ++p) s -= lval[p] * y[row_idx[p]];
    y[j] = s / lval[col_ptr[j]];
  }
  if (perm.empty())
    std::copy(y.begin(), y.end(), x.begin());
  else
    for (int i = 0; i < n; ++i) x[perm[i]] = y[i];
}

Vec CholeskyFactor::solve(const Vec& b) const {
  Vec x(n);
  solve(b, x);
  return x;
}

void CholeskyFactor::multiply(std::span<const double> x, std::span<double> y) const {
  static thread_local std::vector<double> t, z;
  t.resize(n);
  z.assign(n, 0.0);
  if (perm.empty())
    std::copy(x.begin(), x.end(), t.begin());
  else
    for (int i = 0; i < n; ++i) t[i] = x[perm[i]];
  // u = L^T t, then z = L u
  static thread_local std::vector<double> u;
  u.resize(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) s += lval[p] * t[row_idx[p]];
    u[j] = s;
  }
  for (int j = 0; j < n; ++j) {
    const double uj = u[j];
    for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) z[row_idx[p]] += lval[p] * uj;
  }
  if (perm.empty())
    std::copy(z.begin(), z.end(), y.begin());
  else
    for (int i = 0; i < n; ++i) y[perm[i]] = z[i];
}

} // namespace biot
