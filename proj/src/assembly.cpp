#include "biot/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace biot {

void PhysicalParams::validate() const {
  if (E <= 0.0) throw std::invalid_argument("PhysicalParams: E must be positive");
  if (nu < 0.0 || nu >= 0.5) throw std::invalid_argument("PhysicalParams: need 0 <= nu < 0.5");
  if (kappa < 0.0) throw std::invalid_argument("PhysicalParams: kappa must be nonnegative");
  if (s < 0.0) throw std::invalid_argument("PhysicalParams: s must be nonnegative");
  if (dt <= 0.0) throw std::invalid_argument("PhysicalParams: dt must be positive");
  if (eps_stab < 0.0) throw std::invalid_argument("PhysicalParams: eps_stab must be nonnegative");
}

namespace element {

TriGeom tri_geometry(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                     const std::array<double, 2>& p2) {
  const double d1x = p1[0] - p0[0], d1y = p1[1] - p0[1];
  const double d2x = p2[0] - p0[0], d2y = p2[1] - p0[1];
  const double det = d1x * d2y - d2x * d1y; // 2*area, positive for ccw
  TriGeom g;
  g.area = 0.5 * det;
  g.grad[1] = {d2y / det, -d2x / det};
  g.grad[2] = {-d1y / det, d1x / det};
  g.grad[0] = {-g.grad[1][0] - g.grad[2][0], -g.grad[1][1] - g.grad[2][1]};
  return g;
}

std::span<const QPoint> degree4_rule() {
  static const std::vector<QPoint> rule = [] {
    // two three-point orbits (a,a,1-2a); parameters and weights in closed form
    const double s10 = std::sqrt(10.0);
    const double r = std::sqrt(38.0 - 44.0 * std::sqrt(2.0 / 5.0));
    const double a1 = (8.0 - s10 + r) / 18.0;
    const double a2 = (8.0 - s10 - r) / 18.0;
    const double wr = std::sqrt(213125.0 - 53320.0 * s10);
    const double w1 = (620.0 + wr) / 3720.0;
    const double w2 = (620.0 - wr) / 3720.0;
    std::vector<QPoint> q;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      const double b = 1.0 - 2.0 * a;
      q.push_back({{b, a, a}, w});
      q.push_back({{a, b, a}, w});
      q.push_back({{a, a, b}, w});
    }
    return q;
  }();
  return rule;
}

} // namespace element

namespace {

using element::degree4_rule;
using element::tri_geometry;
using element::TriGeom;

int scalar_count(const TriMesh& mesh, FeKind fe) {
  return mesh.node_count() + (fe == FeKind::mini ? mesh.tri_count() : 0);
}

// Scalar basis on one element: P1 hats, optionally followed by the bubble.
struct BasisEval {
  int nb;
  std::array<double, 4> value;
  std::array<std::array<double, 2>, 4> grad;
};

BasisEval eval_basis(const TriGeom& g, const std::array<double, 3>& l, FeKind fe) {
  BasisEval b;
  b.nb = fe == FeKind::mini ? 4 : 3;
  for (int i = 0; i < 3; ++i) {
    b.value[i] = l[i];
    b.grad[i] = g.grad[i];
  }
  if (fe == FeKind::mini) {
    b.value[3] = 27.0 * l[0] * l[1] * l[2];
    for (int c = 0; c < 2; ++c)
      b.grad[3][c] = 27.0 * (l[1] * l[2] * g.grad[0][c] + l[0] * l[2] * g.grad[1][c] +
                             l[0] * l[1] * g.grad[2][c]);
  }
  return b;
}

std::vector<int> scalar_dofs(const TriMesh& mesh, FeKind fe, int t) {
  const auto& tr = mesh.triangles[t];
  std::vector<int> dofs = {tr[0], tr[1], tr[2]};
  if (fe == FeKind::mini) dofs.push_back(mesh.node_count() + t);
  return dofs;
}

SparseMatrix finish(const TripletBuffer& buf, int rows, int cols, bool eliminate,
                    const std::vector<int>* keep_rows, const std::vector<int>* keep_cols) {
  SparseMatrix M = buf.build(rows, cols);
  if (!eliminate) return M;
  return restrict_matrix(M, *keep_rows, *keep_cols);
}

} // namespace

DofLayout make_dof_layout(const TriMesh& mesh, FeKind fe) {
  DofLayout L;
  L.fe = fe;
  L.nx = mesh.nx;
  L.n_nodes = mesh.node_count();
  L.n_tris = mesh.tri_count();
  L.n_scalar = scalar_count(mesh, fe);
  L.n_u = 2 * L.n_scalar;
  L.n_p = L.n_nodes;
  L.u_to_free.assign(L.n_u, -1);
  L.p_to_free.assign(L.n_p, -1);
  for (int c = 0; c < 2; ++c)
    for (int sdof = 0; sdof < L.n_scalar; ++sdof) {
      const bool constrained = sdof < L.n_nodes && mesh.is_boundary_node(sdof);
      if (!constrained) {
        L.u_to_free[c * L.n_scalar + sdof] = static_cast<int>(L.u_free.size());
        L.u_free.push_back(c * L.n_scalar + sdof);
      }
    }
  for (int v = 0; v < L.n_p; ++v)
    if (!mesh.is_boundary_node(v)) {
      L.p_to_free[v] = static_cast<int>(L.p_free.size());
      L.p_free.push_back(v);
    }
  return L;
}

long long dof_count(int nx, FeKind fe) {
  const long long nodes = static_cast<long long>(nx + 1) * (nx + 1);
  const long long tris = 2LL * nx * nx;
  const long long scalars = nodes + (fe == FeKind::mini ? tris : 0);
  return 2 * scalars + nodes;
}

SparseMatrix assemble_elasticity_lame(const TriMesh& mesh, double mu, double lambda, FeKind fe,
                                      bool eliminate) {
  const DofLayout L = make_dof_layout(mesh, fe);
  const int nb = fe == FeKind::mini ? 4 : 3;
  const int per_elem = 4 * nb * nb;
  TripletBuffer buf;
  buf.resize(static_cast<std::size_t>(per_elem) * mesh.tri_count());
  const auto rule = degree4_rule();

#pragma omp parallel for schedule(static)
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const TriGeom geo = tri_geometry(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]);
    double exx[4][4] = {}, eyy[4][4] = {}, exy[4][4] = {};
    for (const auto& q : rule) {
      const BasisEval b = eval_basis(geo, q.bary, fe);
      const double w = q.weight * geo.area;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
          exx[i][j] += w * b.grad[i][0] * b.grad[j][0];
          eyy[i][j] += w * b.grad[i][1] * b.grad[j][1];
          exy[i][j] += w * b.grad[i][0] * b.grad[j][1]; // int dx(phi_i) dy(phi_j)
        }
    }
    const auto dofs = scalar_dofs(mesh, fe, t);
    std::size_t slot = static_cast<std::size_t>(per_elem) * t;
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) {
        const double axx = 2.0 * mu * (exx[i][j] + 0.5 * eyy[i][j]) + lambda * exx[i][j];
        const double ayy = 2.0 * mu * (eyy[i][j] + 0.5 * exx[i][j]) + lambda * eyy[i][j];
        const double axy = mu * exy[j][i] + lambda * exy[i][j]; // exy[j][i] = int dy(phi_i) dx(phi_j)
        const double ayx = mu * exy[i][j] + lambda * exy[j][i];
        buf.set(slot++, dofs[i], dofs[j], axx);
        buf.set(slot++, L.n_scalar + dofs[i], L.n_scalar + dofs[j], ayy);
        buf.set(slot++, dofs[i], L.n_scalar + dofs[j], axy);
        buf.set(slot++, L.n_scalar + dofs[i], dofs[j], ayx);
      }
  }
  return finish(buf, L.n_u, L.n_u, eliminate, &L.u_free, &L.u_free);
}

SparseMatrix assemble_elasticity(const TriMesh& mesh, const PhysicalParams& params, FeKind fe,
                                 bool eliminate) {
  params.validate();
  return assemble_elasticity_lame(mesh, params.mu(), params.lambda(), fe, eliminate);
}

SparseMatrix assemble_vector_laplacian(const TriMesh& mesh, FeKind fe, bool eliminate) {
  const DofLayout L = make_dof_layout(mesh, fe);
  const int nb = fe == FeKind::mini ? 4 : 3;
  const int per_elem = 2 * nb * nb;
  TripletBuffer buf;
  buf.resize(static_cast<std::size_t>(per_elem) * mesh.tri_count());
  const auto rule = degree4_rule();

#pragma omp parallel for schedule(static)
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const TriGeom geo = tri_geometry(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]);
    double k[4][4] = {};
    for (const auto& q : rule) {
      const BasisEval b = eval_basis(geo, q.bary, fe);
      const double w = q.weight * geo.area;
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
          k[i][j] += w * (b.grad[i][0] * b.grad[j][0] + b.grad[i][1] * b.grad[j][1]);
    }
    const auto dofs = scalar_dofs(mesh, fe, t);
    std::size_t slot = static_cast<std::size_t>(per_elem) * t;
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) {
        buf.set(slot++, dofs[i], dofs[j], k[i][j]);
        buf.set(slot++, L.n_scalar + dofs[i], L.n_scalar + dofs[j], k[i][j]);
      }
  }
  return finish(buf, L.n_u, L.n_u, eliminate, &L.u_free, &L.u_free);
}

SparseMatrix assemble_divergence(const TriMesh& mesh, const DofLayout& layout, bool eliminate) {
  const FeKind fe = layout.fe;
  const int nb = fe == FeKind::mini ? 4 : 3;
  const int per_elem = 3 * 2 * nb;
  TripletBuffer buf;
  buf.resize(static_cast<std::size_t>(per_elem) * mesh.tri_count());
  const auto rule = degree4_rule();

#pragma omp parallel for schedule(static)
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const TriGeom geo = tri_geometry(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]);
    // b(v, q) = -int div(v) q; rows are pressure P1 hats
    double bx[3][4] = {}, by[3][4] = {};
    for (const auto& q : rule) {
      const BasisEval b = eval_basis(geo, q.bary, fe);
      const double w = q.weight * geo.area;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < nb; ++j) {
          bx[i][j] -= w * b.grad[j][0] * q.bary[i];
          by[i][j] -= w * b.grad[j][1] * q.bary[i];
        }
    }
    const auto dofs = scalar_dofs(mesh, fe, t);
    std::size_t slot = static_cast<std::size_t>(per_elem) * t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < nb; ++j) {
        buf.set(slot++, tr[i], dofs[j], bx[i][j]);
        buf.set(slot++, tr[i], layout.n_scalar + dofs[j], by[i][j]);
      }
  }
  return finish(buf, layout.n_p, layout.n_u, eliminate, &layout.p_free, &layout.u_free);
}

SparseMatrix assemble_pressure_stiffness(const TriMesh& mesh, bool eliminate) {
  const DofLayout L = make_dof_layout(mesh, FeKind::p1p1);
  TripletBuffer buf;
  buf.resize(static_cast<std::size_t>(9) * mesh.tri_count());
  const auto rule = degree4_rule();
#pragma omp parallel for schedule(static)
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const TriGeom geo = tri_geometry(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]);
    double k[3][3] = {};
    for (const auto& q : rule) {
      const double w = q.weight * geo.area;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          k[i][j] += w * (geo.grad[i][0] * geo.grad[j][0] + geo.grad[i][1] * geo.grad[j][1]);
    }
    std::size_t slot = static_cast<std::size_t>(9) * t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) buf.set(slot++, tr[i], tr[j], k[i][j]);
  }
  return finish(buf, mesh.node_count(), mesh.node_count(), eliminate, &L.p_free, &L.p_free);
}

std::pair<SparseMatrix, SparseMatrix> assemble_pressure_blocks(const TriMesh& mesh,
                                                               const PhysicalParams& params,
                                                               bool eliminate) {
  params.validate();
  const DofLayout L = make_dof_layout(mesh, FeKind::p1p1);
  TripletBuffer mbuf;
  mbuf.resize(static_cast<std::size_t>(9) * mesh.tri_count());
  const auto rule = degree4_rule();
#pragma omp parallel for schedule(static)
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const TriGeom geo = tri_geometry(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]);
    double m[3][3] = {};
    for (const auto& q : rule) {
      const double w = q.weight * geo.area;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] += w * q.bary[i] * q.bary[j];
    }
    std::size_t slot = static_cast<std::size_t>(9) * t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mbuf.set(slot++, tr[i], tr[j], m[i][j]);
  }
  SparseMatrix Mp = finish(mbuf, mesh.node_count(), mesh.node_count(), eliminate, &L.p_free,
                           &L.p_free);
  SparseMatrix Kp = assemble_pressure_stiffness(mesh, eliminate);
  const double diffusion = params.theta() + params.stab_coefficient(mesh.h);
  SparseMatrix D = add(Mp, Kp, params.s, diffusion);
  return {std::move(D), std::move(Mp)};
}

std::pair<Vec, Vec> assemble_rhs(const TriMesh& mesh, const PhysicalParams& params, FeKind fe,
                                 const BodyForce& f_body, const ScalarField& g_source,
                                 const Vec& p_prev, bool eliminate) {
  params.validate();
  const DofLayout L = make_dof_layout(mesh, fe);
  Vec f(L.n_u, 0.0), g(L.n_p, 0.0);
  const auto rule = degree4_rule();
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const auto& tr = mesh.triangles[t];
    const TriGeom geo = tri_geometry(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]);
    const auto dofs = scalar_dofs(mesh, fe, t);
    const int nb = static_cast<int>(dofs.size());
    for (const auto& q : rule) {
      double x = 0.0, y = 0.0;
      for (int i = 0; i < 3; ++i) {
        x += q.bary[i] * mesh.nodes[tr[i]][0];
        y += q.bary[i] * mesh.nodes[tr[i]][1];
      }
      const auto fb = f_body(x, y);
      const double gs = g_source(x, y);
      const BasisEval b = eval_basis(geo, q.bary, fe);
      const double w = q.weight * geo.area;
      for (int i = 0; i < nb; ++i) {
        f[dofs[i]] += w * fb[0] * b.value[i];
        f[L.n_scalar + dofs[i]] += w * fb[1] * b.value[i];
      }
      for (int i = 0; i < 3; ++i) g[tr[i]] += w * gs * q.bary[i];
    }
  }
  if (!p_prev.empty() && params.eps_stab > 0.0) {
    if (static_cast<int>(p_prev.size()) != L.n_p)
      throw std::invalid_argument("assemble_rhs: p_prev must live on the full pressure space");
    const SparseMatrix Kp = assemble_pressure_stiffness(mesh, false);
    Vec kp(L.n_p);
    spmv(Kp, p_prev, kp);
    axpy(params.stab_coefficient(mesh.h), kp, g);
  }
  if (!eliminate) return {std::move(f), std::move(g)};
  Vec ff(L.n_u_free()), gf(L.n_p_free());
  for (int k = 0; k < L.n_u_free(); ++k) ff[k] = f[L.u_free[k]];
  for (int k = 0; k < L.n_p_free(); ++k) gf[k] = g[L.p_free[k]];
  return {std::move(ff), std::move(gf)};
}

BiotSystem assemble_biot_system(const TriMesh& mesh, const PhysicalParams& params, FeKind fe,
                                const BodyForce& f_body, const ScalarField& g_source) {
  params.validate();
  BiotSystem sys;
  sys.params = params;
  sys.layout = make_dof_layout(mesh, fe);
  sys.A = assemble_elasticity(mesh, params, fe);
  sys.A0 = assemble_vector_laplacian(mesh, fe);
  sys.B = assemble_divergence(mesh, sys.layout);
  sys.Bt = transpose(sys.B);
  auto [D, Mp] = assemble_pressure_blocks(mesh, params);
  sys.D = std::move(D);
  sys.Mp = std::move(Mp);
  auto [f, g] = assemble_rhs(mesh, params, fe, f_body, g_source);
  sys.f = std::move(f);
  sys.g = std::move(g);
  return sys;
}

BiotSystem assemble_biot_system(const TriMesh& mesh, const PhysicalParams& params, FeKind fe) {
  return assemble_biot_system(
      mesh, params, fe, [](double, double) { return std::array<double, 2>{1.0, 1.0}; },
      [](double, double) { return 1.0; });
}

void BiotSystem::apply(std::span<const double> x, std::span<double> y) const {
  const int nu = n_u(), np = n_p();
  if (static_cast<int>(x.size()) != nu + np || static_cast<int>(y.size()) != nu + np)
    throw std::invalid_argument("BiotSystem::apply: dimension mismatch");
  auto xu = x.subspan(0, nu), xp = x.subspan(nu, np);
  auto yu = y.subspan(0, nu), yp = y.subspan(nu, np);
  spmv(A, xu, yu);
  spmv_add(Bt, xp, yu);
  spmv(B, xu, yp);
  spmv_add(D, xp, yp, -1.0);
}

Vec BiotSystem::residual(std::span<const double> x) const {
  Vec r(n());
  apply(x, r);
  for (int i = 0; i < n_u(); ++i) r[i] = f[i] - r[i];
  for (int i = 0; i < n_p(); ++i) r[n_u() + i] = g[i] - r[n_u() + i];
  return r;
}

double BiotSystem::rhs_norm() const {
  return std::sqrt(dot(f, f) + dot(g, g));
}

} // namespace biot
