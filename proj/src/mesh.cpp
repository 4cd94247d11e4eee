#include "biot/mesh.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace biot {

bool TriMesh::is_boundary_node(int v) const {
  return std::binary_search(boundary_nodes.begin(), boundary_nodes.end(), v);
}

double TriMesh::signed_area(int t) const {
  const auto& tr = triangles[t];
  const auto& a = nodes[tr[0]];
  const auto& b = nodes[tr[1]];
  const auto& c = nodes[tr[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

std::array<double, 2> TriMesh::centroid(int t) const {
  const auto& tr = triangles[t];
  return {(nodes[tr[0]][0] + nodes[tr[1]][0] + nodes[tr[2]][0]) / 3.0,
          (nodes[tr[0]][1] + nodes[tr[1]][1] + nodes[tr[2]][1]) / 3.0};
}

TriMesh build_structured_mesh(int nx) {
  if (nx < 1) throw std::invalid_argument("build_structured_mesh: nx must be >= 1");
  TriMesh m;
  m.nx = nx;
  m.h = 1.0 / nx;
  m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (nx + 1));
  for (int j = 0; j <= nx; ++j)
    for (int i = 0; i <= nx; ++i) m.nodes.push_back({i * m.h, j * m.h});

  m.triangles.reserve(static_cast<std::size_t>(2) * nx * nx);
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = m.node_id(i, j);
      const int b = m.node_id(i + 1, j);
      const int c = m.node_id(i + 1, j + 1);
      const int d = m.node_id(i, j + 1);
      m.triangles.push_back({a, b, c}); // below the diagonal a-c
      m.triangles.push_back({a, c, d}); // above it
    }

  for (int j = 0; j <= nx; ++j)
    for (int i = 0; i <= nx; ++i)
      if (i == 0 || j == 0 || i == nx || j == nx) m.boundary_nodes.push_back(m.node_id(i, j));
  return m;
}

void dump_mesh(const TriMesh& mesh, std::ostream& os) {
  os << "# nodes " << mesh.node_count() << "\n";
  for (int v = 0; v < mesh.node_count(); ++v)
    os << v << ' ' << mesh.nodes[v][0] << ' ' << mesh.nodes[v][1]
       << (mesh.is_boundary_node(v) ? " b\n" : "\n");
  os << "# triangles " << mesh.tri_count() << "\n";
  for (int t = 0; t < mesh.tri_count(); ++t)
    os << t << ' ' << mesh.triangles[t][0] << ' ' << mesh.triangles[t][1] << ' '
       << mesh.triangles[t][2] << '\n';
}

} // namespace biot
