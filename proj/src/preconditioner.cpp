#include "biot/preconditioner.hpp"

#include <stdexcept>

namespace biot {

std::string InnerSolverSpec::describe() const {
  if (exact) return "exact";
  char buf[80];
  std::snprintf(buf, sizeof buf, "ichol(droptol=%g,shift=%g)", droptol, shift);
  return buf;
}

CholeskyFactor factorize(const SparseMatrix& M, const InnerSolverSpec& spec) {
  return spec.exact ? cholesky_exact(M) : cholesky_incomplete(M, spec.droptol, spec.shift);
}

SchurApprox build_schur_approx(const SparseMatrix& Mp, const SparseMatrix& D,
                               const PhysicalParams& params, const InnerSolverSpec& spec,
                               SchurVariant variant) {
  SchurApprox s;
  s.variant = variant;
  if (variant == SchurVariant::mass_plus_D) {
    const double c = 1.0 / (2.0 * params.mu() + params.lambda());
    s.PS = add(Mp, D, c, 1.0);
  } else {
    s.PS = D;
  }
  s.solver = factorize(s.PS, spec);
  return s;
}

void BlockPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const int nu = n_u(), np = n_p();
  if (static_cast<int>(r.size()) != nu + np || static_cast<int>(z.size()) != nu + np)
    throw std::invalid_argument("BlockPreconditioner::apply: dimension mismatch");
  auto ru = r.subspan(0, nu), rp = r.subspan(nu, np);
  auto zu = z.subspan(0, nu), zp = z.subspan(nu, np);
  static thread_local Vec tmp;
  switch (kind) {
    case PrecondKind::diag:
      PA.solve(ru, zu);
      schur.solve(rp, zp);
      scal(-1.0, zp);
      break;
    case PrecondKind::lower: {
      PA.solve(ru, zu);
      tmp.assign(rp.begin(), rp.end()); // tmp = r_p - B z_u, negated below
      spmv_add(*B, zu, tmp, -1.0);
      schur.solve(tmp, zp);
      scal(-1.0, zp);
      break;
    }
    case PrecondKind::upper: {
      schur.solve(rp, zp);
      scal(-1.0, zp);
      tmp.assign(ru.begin(), ru.end());
      spmv_add(*Bt, zp, tmp, -1.0); // r_u - B^T z_p
      PA.solve(tmp, zu);
      break;
    }
  }
}

BlockPreconditioner build_preconditioner(const BiotSystem& sys, PrecondKind kind,
                                         const InnerSolverSpec& a_spec,
                                         const InnerSolverSpec& s_spec, SchurVariant variant) {
  BlockPreconditioner P;
  P.kind = kind;
  P.B = &sys.B;
  P.Bt = &sys.Bt;
  P.PA = factorize(sys.A, a_spec);
  P.schur = build_schur_approx(sys.Mp, sys.D, sys.params, s_spec, variant);
  P.inner_desc = "A:" + a_spec.describe() + ",S:" + s_spec.describe();
  return P;
}

} // namespace biot
