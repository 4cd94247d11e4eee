#include "biot/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <json.hpp>

#include "biot/dense.hpp"

namespace biot {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double rel_error(std::span<const double> x, const Vec& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = x[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Shared bookkeeping for the Uzawa family: true residual of the full system
// relative to ||(f,g)||, comparable across all solvers.
struct Monitor {
  const BiotSystem& sys;
  const Vec* ref;
  SolveReport& rep;
  double rhs_norm;
  Vec x;

  Monitor(const BiotSystem& s, const Vec* r, SolveReport& rp)
      : sys(s), ref(r), rep(rp), rhs_norm(s.rhs_norm()), x(s.n()) {}

  double record(const Vec& u, const Vec& p) {
    std::copy(u.begin(), u.end(), x.begin());
    std::copy(p.begin(), p.end(), x.begin() + sys.n_u());
    const Vec r = sys.residual(x);
    const double rel = rhs_norm > 0.0 ? nrm2(r) / rhs_norm : nrm2(r);
    rep.residual_history.push_back(rel);
    if (ref) rep.error_history.push_back(rel_error(x, *ref));
    return rel;
  }
};

} // namespace

std::string SolveReport::to_json_line() const {
  nlohmann::json j;
  j["solver"] = solver;
  j["inner"] = inner;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["diverged"] = diverged;
  j["warnings"] = warnings;
  j["wall_ms"] = wall_ms;
  j["final_residual"] = final_residual();
  j["residual_history"] = residual_history;
  if (!error_history.empty()) j["error_history"] = error_history;
  return j.dump();
}

LinearOp saddle_operator(const BiotSystem& sys) {
  return [&sys](std::span<const double> x, std::span<double> y) { sys.apply(x, y); };
}

Vec stacked_rhs(const BiotSystem& sys) {
  Vec b(sys.n());
  std::copy(sys.f.begin(), sys.f.end(), b.begin());
  std::copy(sys.g.begin(), sys.g.end(), b.begin() + sys.n_u());
  return b;
}

SolveReport gmres(const LinearOp& apply, int n, const Vec& b, const PrecondOp* precond,
                  PrecondSide side, double tol, int maxit, Vec& x, const Vec* reference) {
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("gmres: rhs size mismatch");
  if (tol <= 0.0) throw std::invalid_argument("gmres: tol must be positive");
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.solver = "gmres";
  x.assign(n, 0.0);

  Vec r0 = b;
  if (precond && side == PrecondSide::left) {
    Vec tmp(n);
    (*precond)(b, tmp);
    r0 = tmp;
  }
  const double beta = nrm2(r0);
  if (beta == 0.0) {
    rep.converged = true;
    rep.residual_history = {0.0};
    if (reference) rep.error_history = {rel_error(x, *reference)};
    rep.wall_ms = elapsed_ms(t0);
    return rep;
  }
  rep.residual_history.push_back(1.0);
  if (reference) rep.error_history.push_back(rel_error(x, *reference));

  std::vector<Vec> V;
  V.emplace_back(r0);
  scal(1.0 / beta, V[0]);
  std::vector<std::vector<double>> H; // column j holds j+2 entries
  std::vector<double> cs, sn, gvec = {beta};

  Vec w(n), z(n);
  auto form_solution = [&](int m, Vec& out) {
    // back substitution on the rotated Hessenberg
    std::vector<double> y(m);
    for (int i = m - 1; i >= 0; --i) {
      double s = gvec[i];
      for (int j = i + 1; j < m; ++j) s -= H[j][i] * y[j];
      y[i] = s / H[i][i];
    }
    Vec comb(n, 0.0);
    for (int i = 0; i < m; ++i) axpy(y[i], V[i], comb);
    if (precond && side == PrecondSide::right) {
      out.resize(n);
      (*precond)(comb, out);
    } else {
      out = std::move(comb);
    }
  };

  int j = 0;
  for (; j < maxit; ++j) {
    if (precond && side == PrecondSide::right) {
      (*precond)(V[j], z);
      apply(z, w);
    } else if (precond && side == PrecondSide::left) {
      apply(V[j], z);
      (*precond)(z, w);
    } else {
      apply(V[j], w);
    }
    // modified Gram-Schmidt with one reorthogonalization pass
    std::vector<double> h(j + 2, 0.0);
    for (int i = 0; i <= j; ++i) {
      const double hij = dot(w, V[i]);
      h[i] = hij;
      axpy(-hij, V[i], w);
    }
    for (int i = 0; i <= j; ++i) {
      const double corr = dot(w, V[i]);
      h[i] += corr;
      axpy(-corr, V[i], w);
    }
    const double hnorm = nrm2(w);
    h[j + 1] = hnorm;

    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double d = std::hypot(h[j], h[j + 1]);
    cs.push_back(h[j] / d);
    sn.push_back(h[j + 1] / d);
    h[j] = d;
    h[j + 1] = 0.0;
    gvec.push_back(-sn[j] * gvec[j]);
    gvec[j] *= cs[j];
    H.push_back(std::move(h));

    const double res = std::abs(gvec[j + 1]) / beta;
    rep.residual_history.push_back(res);
    if (reference) {
      Vec xi;
      form_solution(j + 1, xi);
      rep.error_history.push_back(rel_error(xi, *reference));
    }
    if (res <= tol || hnorm == 0.0) {
      rep.converged = res <= tol;
      ++j;
      break;
    }
    Vec v = w;
    scal(1.0 / hnorm, v);
    V.push_back(std::move(v));
  }
  rep.iterations = j;
  if (j > 0) form_solution(j, x);
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

SolveReport uzawa(const BiotSystem& sys, const CholeskyFactor& PA, const SchurApprox& PS,
                  double omega, double tol, int maxit, Vec& u, Vec& p, const Vec* reference) {
  if (omega < 0.0) throw std::invalid_argument("uzawa: omega must be nonnegative");
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.solver = "uzawa";
  const int nu = sys.n_u(), np = sys.n_p();
  u.assign(nu, 0.0);
  p.assign(np, 0.0);
  Monitor mon(sys, reference, rep);
  const double res0 = mon.record(u, p);
  if (res0 <= tol) {
    rep.converged = true;
    rep.wall_ms = elapsed_ms(t0);
    return rep;
  }

  Vec ru(nu), cu(nu), rp(np), cp(np);
  for (int k = 1; k <= maxit; ++k) {
    // displacement correction
    spmv(sys.A, u, ru);
    spmv_add(sys.Bt, p, ru);
    for (int i = 0; i < nu; ++i) ru[i] = sys.f[i] - ru[i];
    PA.solve(ru, cu);
    axpy(1.0, cu, u);
    // relaxed Schur correction
    spmv(sys.B, u, rp);
    spmv_add(sys.D, p, rp, -1.0);
    for (int i = 0; i < np; ++i) rp[i] -= sys.g[i];
    PS.solve(rp, cp);
    axpy(omega, cp, p);

    const double res = mon.record(u, p);
    rep.iterations = k;
    if (res <= tol) {
      rep.converged = true;
      break;
    }
    if (res > 1e6 * res0 || !std::isfinite(res)) {
      rep.diverged = true;
      break;
    }
  }
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

SolveReport variable_uzawa(const BiotSystem& sys, const CholeskyFactor& PA,
                           const SchurApprox& PS, DampingMode damping, double tol, int maxit,
                           Vec& u, Vec& p, const Vec* reference,
                           const SolverObserver* observer, bool tau_schur_denominator) {
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.solver = "variable_uzawa";
  const int nu = sys.n_u(), np = sys.n_p();
  u.assign(nu, 0.0);
  p.assign(np, 0.0);
  Monitor mon(sys, reference, rep);
  const double res0 = mon.record(u, p);
  if (res0 <= tol) {
    rep.converged = true;
    rep.wall_ms = elapsed_ms(t0);
    return rep;
  }

  Vec fk(nu), ck(nu), t1(nu), gk(np), dk(np), t2(np);
  for (int k = 1; k <= maxit; ++k) {
    // step 1: relaxed displacement update, omega_k from the A-norm line search
    spmv(sys.A, u, fk);
    spmv_add(sys.Bt, p, fk);
    for (int i = 0; i < nu; ++i) fk[i] = sys.f[i] - fk[i];
    PA.solve(fk, ck);
    double omega_k = 1.0;
    if (nrm2(fk) != 0.0) {
      spmv(sys.A, ck, t1);
      const double den = dot(t1, ck);
      if (den <= 0.0 || !std::isfinite(den))
        throw std::runtime_error("variable_uzawa: (A c_k, c_k) not positive; "
                                 "P_A^{-1} A composition is not SPD");
      omega_k = dot(fk, ck) / den;
    }
    if (observer && observer->on_u_step) observer->on_u_step(k - 1, omega_k, u, ck);
    axpy(omega_k, ck, u);

    // step 2: relaxed pressure update
    spmv(sys.B, u, t2);
    spmv_add(sys.D, p, t2, -1.0);
    for (int i = 0; i < np; ++i) gk[i] = sys.g[i] - t2[i];
    PS.solve(gk, dk);
    scal(-1.0, dk);
    double tau_k = 1.0;
    if (nrm2(gk) != 0.0) {
      double den;
      if (tau_schur_denominator) {
        // (S d_k, d_k) with S = B A^{-1} B^T + D applied through P_A
        spmv(sys.Bt, dk, t1);
        Vec aid(nu);
        PA.solve(t1, aid);
        Vec bd(np);
        spmv(sys.B, aid, bd);
        spmv_add(sys.D, dk, bd);
        den = dot(bd, dk);
      } else {
        spmv(PS.PS, dk, t2);
        den = dot(t2, dk);
      }
      if (den <= 0.0 || !std::isfinite(den))
        throw std::runtime_error("variable_uzawa: Schur denominator not positive");
      tau_k = -dot(gk, dk) / den;
    }
    double theta_k = 1.0;
    if (damping == DampingMode::hu_formula) {
      double w = omega_k;
      if (w > 1.0) {
        w = 1.0;
        ++rep.warnings;
      }
      theta_k = (1.0 - std::sqrt(1.0 - w)) / 2.0;
    }
    axpy(theta_k * tau_k, dk, p);

    const double res = mon.record(u, p);
    rep.iterations = k;
    if (res <= tol) {
      rep.converged = true;
      break;
    }
    if (res > 1e6 * res0 || !std::isfinite(res)) {
      rep.diverged = true;
      break;
    }
  }
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

void uzawa_fixed_point_map(const BiotSystem& sys, const CholeskyFactor& PA,
                           const SchurApprox& PS, std::span<const double> x,
                           std::span<double> gx) {
  const int nu = sys.n_u(), np = sys.n_p();
  if (static_cast<int>(x.size()) != nu + np || static_cast<int>(gx.size()) != nu + np)
    throw std::invalid_argument("uzawa_fixed_point_map: dimension mismatch");
  static thread_local Vec ru, cu, rp, cp;
  ru.resize(nu);
  cu.resize(nu);
  rp.resize(np);
  cp.resize(np);
  auto xu = x.subspan(0, nu), xp = x.subspan(nu, np);
  spmv(sys.A, xu, ru);
  spmv_add(sys.Bt, xp, ru);
  for (int i = 0; i < nu; ++i) ru[i] = sys.f[i] - ru[i];
  PA.solve(ru, cu);
  for (int i = 0; i < nu; ++i) gx[i] = xu[i] + cu[i];
  spmv(sys.B, gx.subspan(0, nu), rp);
  spmv_add(sys.D, xp, rp, -1.0);
  for (int i = 0; i < np; ++i) rp[i] -= sys.g[i];
  PS.solve(rp, cp);
  for (int i = 0; i < np; ++i) gx[nu + i] = xp[i] + cp[i];
}

SolveReport anderson_uzawa(const BiotSystem& sys, const CholeskyFactor& PA,
                           const SchurApprox& PS, int m, double tol, int maxit, Vec& u, Vec& p,
                           const Vec* reference, const SolverObserver* observer) {
  if (m < 1) throw std::invalid_argument("anderson_uzawa: depth m must be >= 1");
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.solver = "anderson_uzawa";
  const int nu = sys.n_u(), np = sys.n_p();
  const int n = nu + np;
  u.assign(nu, 0.0);
  p.assign(np, 0.0);

  const double rhsn = sys.rhs_norm();
  auto record = [&](const Vec& x) {
    const Vec r = sys.residual(x);
    const double rel = rhsn > 0.0 ? nrm2(r) / rhsn : nrm2(r);
    rep.residual_history.push_back(rel);
    if (reference) rep.error_history.push_back(rel_error(x, *reference));
    return rel;
  };

  Vec x(n, 0.0);
  if (record(x) <= tol) {
    rep.converged = true;
    rep.wall_ms = elapsed_ms(t0);
    return rep;
  }

  // window of (g(x_i), f_i = g(x_i) - x_i), most recent last, at most m+1 wide
  std::deque<Vec> gs, fs;
  auto push_eval = [&](const Vec& xi) {
    Vec gx(n);
    uzawa_fixed_point_map(sys, PA, PS, xi, gx);
    Vec fi(n);
    for (int i = 0; i < n; ++i) fi[i] = gx[i] - xi[i];
    gs.push_back(std::move(gx));
    fs.push_back(std::move(fi));
    while (static_cast<int>(gs.size()) > m + 1) {
      gs.pop_front();
      fs.pop_front();
    }
  };

  push_eval(x);
  x = gs.back(); // x_1 = g(x_0)
  rep.iterations = 1;
  double res = record(x);
  if (res <= tol) {
    rep.converged = true;
    rep.wall_ms = elapsed_ms(t0);
    return rep;
  }

  for (int k = 1; k < maxit; ++k) {
    push_eval(x);
    const int mk = static_cast<int>(fs.size()) - 1; // min(m, k)
    DenseMatrix F(n, mk + 1);
    for (int j = 0; j <= mk; ++j)
      std::copy(fs[j].begin(), fs[j].end(), F.col(j).begin());
    const std::vector<double> alpha = least_squares_constrained(F);
    if (observer && observer->on_anderson_weights) observer->on_anderson_weights(k, alpha);
    std::fill(x.begin(), x.end(), 0.0);
    for (int j = 0; j <= mk; ++j) axpy(alpha[j], gs[j], x);

    rep.iterations = k + 1;
    res = record(x);
    if (res <= tol) {
      rep.converged = true;
      break;
    }
    if (!std::isfinite(res) || res > 1e6) {
      rep.diverged = true;
      break;
    }
  }
  // split back into fields
  u.assign(x.begin(), x.begin() + nu);
  p.assign(x.begin() + nu, x.end());
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

} // namespace biot
