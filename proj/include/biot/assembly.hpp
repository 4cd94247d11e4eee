#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "biot/mesh.hpp"
#include "biot/sparse.hpp"

namespace biot {

// Displacement discretization: Mini (P1 plus one cubic bubble per triangle,
// per component) or equal-order stabilized P1-P1. Pressure is P1 nodal in
// both cases.
enum class FeKind { mini, p1p1 };

// Scalar coefficients of the one-step Biot problem. Lame constants derive
// from (E, nu); theta = kappa*dt is the diffusion weight after backward
// Euler.
struct PhysicalParams {
  double E = 1.0;
  double nu = 0.3;
  double kappa = 1.0;
  double s = 1.0;
  double alpha_biot = 1.0; // fixed at 1, kept for completeness
  double dt = 1.0;
  double eps_stab = 1.0 / 6.0;

  double mu() const { return E / (2.0 * (1.0 + nu)); }
  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double theta() const { return kappa * dt; }
  // Stabilization weight eps * h^2 / (dt * (2 mu + lambda)).
  double stab_coefficient(double h) const {
    return eps_stab * h * h / (dt * (2.0 * mu() + lambda()));
  }
  void validate() const;
};

// Degree-of-freedom bookkeeping. Displacement scalars are ordered nodes
// first, then bubbles, and the two components are stacked x-block then
// y-block; pressure reuses the node numbering. Homogeneous Dirichlet rows
// and columns (boundary nodes of either field) are removed by restriction
// to the free index sets; bubbles are interior by construction and always
// free.
struct DofLayout {
  FeKind fe = FeKind::mini;
  int nx = 0;
  int n_nodes = 0;
  int n_tris = 0;
  int n_scalar = 0; // per-component displacement scalar count
  int n_u = 0;      // 2 * n_scalar
  int n_p = 0;      // n_nodes
  std::vector<int> u_free, p_free;       // kept full indices, ascending
  std::vector<int> u_to_free, p_to_free; // -1 where constrained

  int n_u_free() const { return static_cast<int>(u_free.size()); }
  int n_p_free() const { return static_cast<int>(p_free.size()); }
  int total_dofs() const { return n_u + n_p; }
  int free_dofs() const { return n_u_free() + n_p_free(); }
};

DofLayout make_dof_layout(const TriMesh& mesh, FeKind fe);

// Total DOF count before elimination for a given mesh size (the "DOFs"
// column of the benchmark tables).
long long dof_count(int nx, FeKind fe);

using BodyForce = std::function<std::array<double, 2>(double, double)>;
using ScalarField = std::function<double(double, double)>;

// One assembled single-step Biot system on the free DOFs:
//   [ A  B^T ] [u]   [f]
//   [ B  -D  ] [p] = [g]
// with A the elasticity form, B the negative-divergence coupling, D the
// stabilized reaction-diffusion block, Mp the pressure mass matrix, and A0
// the vector Laplacian on the displacement space (spectral analysis only).
struct BiotSystem {
  PhysicalParams params;
  DofLayout layout;
  SparseMatrix A, A0, B, Bt, D, Mp;
  Vec f, g;

  int n_u() const { return layout.n_u_free(); }
  int n_p() const { return layout.n_p_free(); }
  int n() const { return n_u() + n_p(); }

  // y = [[A, B^T], [B, -D]] x on stacked free vectors.
  void apply(std::span<const double> x, std::span<double> y) const;
  Vec residual(std::span<const double> x) const; // [f;g] - M x
  double rhs_norm() const;
};

// Individual block assemblers. With eliminate = false the full
// (pre-elimination) operator is returned; tests use that to check
// quantities the boundary conditions would otherwise hide.
SparseMatrix assemble_elasticity(const TriMesh& mesh, const PhysicalParams& params,
                                 FeKind fe, bool eliminate = true);
SparseMatrix assemble_elasticity_lame(const TriMesh& mesh, double mu, double lambda,
                                      FeKind fe, bool eliminate = true);
SparseMatrix assemble_vector_laplacian(const TriMesh& mesh, FeKind fe, bool eliminate = true);
SparseMatrix assemble_divergence(const TriMesh& mesh, const DofLayout& layout,
                                 bool eliminate = true);
// Returns (D, Mp).
std::pair<SparseMatrix, SparseMatrix> assemble_pressure_blocks(const TriMesh& mesh,
                                                               const PhysicalParams& params,
                                                               bool eliminate = true);
// P1 pressure stiffness, used by the stabilized right-hand side.
SparseMatrix assemble_pressure_stiffness(const TriMesh& mesh, bool eliminate = true);

// Load vectors (f, g). p_prev is the previous pressure iterate on the full
// nodal numbering; when nonempty and eps_stab > 0 the stabilization
// correction is added to g. Fields are sampled at quadrature points.
std::pair<Vec, Vec> assemble_rhs(const TriMesh& mesh, const PhysicalParams& params, FeKind fe,
                                 const BodyForce& f_body, const ScalarField& g_source,
                                 const Vec& p_prev = {}, bool eliminate = true);

BiotSystem assemble_biot_system(const TriMesh& mesh, const PhysicalParams& params, FeKind fe,
                                const BodyForce& f_body, const ScalarField& g_source);
// Benchmark data: f = (1,1), g = 1, zero previous state.
BiotSystem assemble_biot_system(const TriMesh& mesh, const PhysicalParams& params,
                                FeKind fe = FeKind::mini);

namespace element {

// Barycentric gradients and area of a triangle.
struct TriGeom {
  double area;
  std::array<std::array<double, 2>, 3> grad;
};
TriGeom tri_geometry(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                     const std::array<double, 2>& p2);

struct QPoint {
  std::array<double, 3> bary;
  double weight; // weights sum to 1, scale by the element area
};
// Six-point rule, exact through polynomial degree 4.
std::span<const QPoint> degree4_rule();

} // namespace element

} // namespace biot
