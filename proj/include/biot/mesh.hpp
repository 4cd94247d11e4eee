#pragma once

#include <array>
#include <iosfwd>
#include <vector>

namespace biot {

// Structured triangulation of the unit square. Every cell is split along the
// same lower-left to upper-right diagonal, node numbering is lexicographic
// by (row, column), and triangle vertices are counterclockwise. Immutable
// after construction; safe to share across threads.
struct TriMesh {
  int nx = 0;                                  // subdivisions per axis
  double h = 0.0;                              // 1/nx
  std::vector<std::array<double, 2>> nodes;    // (nx+1)^2 points
  std::vector<std::array<int, 3>> triangles;   // 2*nx^2 cells, ccw
  std::vector<int> boundary_nodes;             // sorted, 4*nx entries

  int node_count() const { return static_cast<int>(nodes.size()); }
  int tri_count() const { return static_cast<int>(triangles.size()); }
  int node_id(int i, int j) const { return j * (nx + 1) + i; }
  bool is_boundary_node(int v) const;

  double signed_area(int t) const;
  std::array<double, 2> centroid(int t) const;
};

// Builds the mesh; nx must be at least 1.
TriMesh build_structured_mesh(int nx);

// Plain-text node and triangle tables, for debugging.
void dump_mesh(const TriMesh& mesh, std::ostream& os);

} // namespace biot
