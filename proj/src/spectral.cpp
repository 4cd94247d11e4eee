#include "biot/spectral.hpp"

#include <ostream>
#include <stdexcept>

#include "biot/cholesky.hpp"
#include "biot/preconditioner.hpp"

namespace biot {

namespace {

// Dense B M^{-1} B^T for an SPD block M given by its exact factor; column
// solves are independent and run in parallel. Column j of B^T is row j of B.
DenseMatrix schur_product(const SparseMatrix& B, const CholeskyFactor& Minv) {
  const int np = B.rows;
  const int nu = B.cols;
  DenseMatrix S(np, np);
  DenseMatrix X(nu, np);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < np; ++j) {
    Vec col(nu, 0.0);
    for (int p = B.ptr[j]; p < B.ptr[j + 1]; ++p) col[B.idx[p]] = B.val[p];
    Minv.solve(col, X.col(j));
  }
  for (int j = 0; j < np; ++j) {
    Vec bx(np);
    spmv_serial(B, X.col(j), bx);
    for (int i = 0; i < np; ++i) S(i, j) = bx[i];
  }
  // symmetrize roundoff
  for (int j = 0; j < np; ++j)
    for (int i = j + 1; i < np; ++i) {
      const double v = 0.5 * (S(i, j) + S(j, i));
      S(i, j) = S(j, i) = v;
    }
  return S;
}

void check_cap(const BiotSystem& sys) {
  if (sys.n_p() > 2000)
    throw std::invalid_argument("spectral: pressure space exceeds the 2000-DOF cap");
}

} // namespace

SpectrumReport schur_spectrum(const BiotSystem& sys, SchurVariant variant,
                              std::vector<double>* eigenvalues) {
  check_cap(sys);
  SpectrumReport r;
  r.nx = sys.layout.nx;
  r.n_pressure = sys.n_p();
  r.n_displacement = sys.n_u();
  const CholeskyFactor Afac = cholesky_exact(sys.A);
  DenseMatrix S = schur_product(sys.B, sys.Bt, Afac);
  const DenseMatrix Dd = DenseMatrix::from_sparse(sys.D);
  for (int j = 0; j < r.n_pressure; ++j)
    for (int i = 0; i < r.n_pressure; ++i) S(i, j) += Dd(i, j);

  DenseMatrix PS;
  if (variant == SchurVariant::mass_plus_D) {
    PS = DenseMatrix::from_sparse(sys.Mp);
    const double c = 1.0 / (2.0 * sys.params.mu() + sys.params.lambda());
    for (int j = 0; j < r.n_pressure; ++j)
      for (int i = 0; i < r.n_pressure; ++i) PS(i, j) = c * PS(i, j) + Dd(i, j);
  } else {
    PS = Dd;
  }
  const EigResult e = dense_sym_eig(S, PS);
  r.has_schur = true;
  r.schur_min = e.values.front();
  r.schur_max = e.values.back();
  if (eigenvalues) *eigenvalues = e.values;
  return r;
}

SpectrumReport infsup_spectrum(const BiotSystem& sys, std::vector<double>* eigenvalues) {
  check_cap(sys);
  SpectrumReport r;
  r.nx = sys.layout.nx;
  r.n_pressure = sys.n_p();
  r.n_displacement = sys.n_u();
  const CholeskyFactor A0fac = cholesky_exact(sys.A0);
  const DenseMatrix S = schur_product(sys.B, sys.Bt, A0fac);
  const DenseMatrix Mp = DenseMatrix::from_sparse(sys.Mp);
  const EigResult e = dense_sym_eig(S, Mp);
  r.has_infsup = true;
  r.infsup_min = e.values.front();
  r.infsup_max = e.values.back();
  if (eigenvalues) *eigenvalues = e.values;
  return r;
}

SpectrumReport spectral_report(const BiotSystem& sys, const std::string& case_id) {
  SpectrumReport r = schur_spectrum(sys);
  const SpectrumReport i = infsup_spectrum(sys);
  r.case_id = case_id;
  r.has_infsup = true;
  r.infsup_min = i.infsup_min;
  r.infsup_max = i.infsup_max;
  return r;
}

void write_spectrum_csv_header(std::ostream& os) {
  os << "case,Nx,n_p,n_u,schur_min,schur_max,infsup_min,infsup_max\n";
}

void write_spectrum_csv_row(std::ostream& os, const SpectrumReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.12g,%.12g,%.12g,%.12g\n", r.case_id.c_str(),
                r.nx, r.n_pressure, r.n_displacement, r.schur_min, r.schur_max, r.infsup_min,
                r.infsup_max);
  os << buf;
}

} // namespace biot
