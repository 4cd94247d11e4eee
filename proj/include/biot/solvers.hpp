#pragma once

#include <functional>
#include <string>
#include <vector>

#include "biot/assembly.hpp"
#include "biot/preconditioner.hpp"

namespace biot {

enum class PrecondSide { left, right };
enum class DampingMode { one, hu_formula };

// Outcome of one linear solve. The residual history holds the relative
// residual at iteration 0..iterations (length iterations + 1); the error
// history is filled only when a reference solution is supplied. All solvers
// start from the zero vector and are deterministic, so re-running a
// configuration reproduces the history bit for bit.
struct SolveReport {
  std::string solver;
  std::string inner;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  int warnings = 0;
  double wall_ms = 0.0;
  std::vector<double> residual_history;
  std::vector<double> error_history;

  double final_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
  std::string to_json_line() const;
};

using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;
using PrecondOp = std::function<void(std::span<const double>, std::span<double>)>;

// Full (non-restarted) GMRES with modified Gram-Schmidt and one
// reorthogonalization pass. Stops when the native residual estimate --
// the true residual for right preconditioning or none, the preconditioned
// residual for left -- drops below tol relative to its initial value.
SolveReport gmres(const LinearOp& apply, int n, const Vec& b, const PrecondOp* precond,
                  PrecondSide side, double tol, int maxit, Vec& x,
                  const Vec* reference = nullptr);

// Hooks for property tests; both are optional.
struct SolverObserver {
  std::function<void(int k, double omega_k, const Vec& u_k, const Vec& c_k)> on_u_step;
  std::function<void(int k, const std::vector<double>& alpha)> on_anderson_weights;
};

// Classical preconditioned Uzawa: exact or inexact displacement solve
// followed by a relaxed Schur correction,
//   u_{k+1} = u_k + P_A^{-1} (f - A u_k - B^T p_k)
//   p_{k+1} = p_k + omega P_S^{-1} (B u_{k+1} - D p_k - g),
// a preconditioned Richardson iteration on the Schur system. Aborts with
// the diverged flag when the residual exceeds 1e6 times its initial value.
SolveReport uzawa(const BiotSystem& sys, const CholeskyFactor& PA, const SchurApprox& PS,
                  double omega, double tol, int maxit, Vec& u, Vec& p,
                  const Vec* reference = nullptr);

// Uzawa with per-step relaxation: omega_k = (f_k, c_k) / (A c_k, c_k) for
// the displacement line search and tau_k the matching Rayleigh quotient for
// the pressure step (both equal 1 when the inner solves are exact). The
// damping theta_k is 1 by default; hu_formula uses (1 - sqrt(1 - omega_k))/2
// with omega_k clamped at 1 (clamps are counted as warnings).
// tau_schur_denominator switches the tau denominator from (P_S d, d) to
// (S d, d) with S applied through the P_A solve.
SolveReport variable_uzawa(const BiotSystem& sys, const CholeskyFactor& PA,
                           const SchurApprox& PS, DampingMode damping, double tol, int maxit,
                           Vec& u, Vec& p, const Vec* reference = nullptr,
                           const SolverObserver* observer = nullptr,
                           bool tau_schur_denominator = false);

// Anderson acceleration of the omega = 1 Uzawa sweep viewed as a fixed
// point map. Keeps a window of the last m+1 residuals, solves the
// constrained least-squares problem for the mixing weights (they sum to 1),
// and combines the stored map images.
SolveReport anderson_uzawa(const BiotSystem& sys, const CholeskyFactor& PA,
                           const SchurApprox& PS, int m, double tol, int maxit, Vec& u, Vec& p,
                           const Vec* reference = nullptr,
                           const SolverObserver* observer = nullptr);

// One Uzawa sweep (omega = 1); pure function of x = (u, p).
void uzawa_fixed_point_map(const BiotSystem& sys, const CholeskyFactor& PA,
                           const SchurApprox& PS, std::span<const double> x,
                           std::span<double> gx);

// Saddle operator of the system as a LinearOp.
LinearOp saddle_operator(const BiotSystem& sys);
// Stacked right-hand side [f; g].
Vec stacked_rhs(const BiotSystem& sys);

} // namespace biot
