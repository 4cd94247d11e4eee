#pragma once

#include <string>

#include "biot/assembly.hpp"
#include "biot/cholesky.hpp"
#include "biot/sparse.hpp"

namespace biot {

enum class PrecondKind { diag, lower, upper }; // P1, P2, P3
enum class SchurVariant { mass_plus_D, D_only };

// How an inner elliptic solve is realized: exact sparse Cholesky, or a
// threshold incomplete factorization of the (optionally shifted) block.
struct InnerSolverSpec {
  bool exact = true;
  double droptol = 1e-3;
  double shift = 0.0;

  static InnerSolverSpec exact_solver() { return {true, 0.0, 0.0}; }
  static InnerSolverSpec incomplete(double droptol, double shift) {
    return {false, droptol, shift};
  }
  std::string describe() const;
};

CholeskyFactor factorize(const SparseMatrix& M, const InnerSolverSpec& spec);

// Schur-complement approximation P_S = (1/(2 mu + lambda)) Mp + D, or the
// spectrally equivalent P_S = D, together with its factorization.
struct SchurApprox {
  SchurVariant variant = SchurVariant::mass_plus_D;
  SparseMatrix PS;
  CholeskyFactor solver;

  void solve(std::span<const double> r, std::span<double> z) const { solver.solve(r, z); }
};

SchurApprox build_schur_approx(const SparseMatrix& Mp, const SparseMatrix& D,
                               const PhysicalParams& params, const InnerSolverSpec& spec,
                               SchurVariant variant = SchurVariant::mass_plus_D);

// Block preconditioners for the saddle matrix [[A, B^T], [B, -D]]:
//   P1 = [[P_A, 0], [0, -P_S]]        (diag)
//   P2 = [[P_A, 0], [B, -P_S]]        (lower)
//   P3 = [[P_A, B^T], [0, -P_S]]      (upper)
// Application is linear and side-effect free; the factors are built once.
struct BlockPreconditioner {
  PrecondKind kind = PrecondKind::upper;
  const SparseMatrix* B = nullptr;
  const SparseMatrix* Bt = nullptr;
  CholeskyFactor PA;
  SchurApprox schur;
  std::string inner_desc;

  int n_u() const { return PA.n; }
  int n_p() const { return schur.solver.n; }

  // z = P^{-1} r on stacked (r_u, r_p). The (2,2) block carries the minus
  // sign: diag gives z_p = -P_S^{-1} r_p.
  void apply(std::span<const double> r, std::span<double> z) const;
};

BlockPreconditioner build_preconditioner(const BiotSystem& sys, PrecondKind kind,
                                         const InnerSolverSpec& a_spec,
                                         const InnerSolverSpec& s_spec,
                                         SchurVariant variant = SchurVariant::mass_plus_D);

} // namespace biot
