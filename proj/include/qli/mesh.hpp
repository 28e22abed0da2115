#pragma once

#include <array>
#include <vector>

#include "qli/geometry.hpp"

namespace qli {

// Halfedge h = 3*f + i runs from corner i to corner (i+1)%3 of face f.
struct TriMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> faces;
  std::vector<int> twin;             // -1 on the boundary
  std::vector<int> edge;             // halfedge -> edge id
  std::vector<int> edge_halfedge;    // edge -> lower-index halfedge
  std::vector<int> vertex_halfedge;  // an outgoing halfedge; the boundary one for boundary vertices
  std::vector<char> vertex_boundary;
  std::vector<std::vector<int>> boundary_loops;  // halfedge cycles, surface on the left

  int num_vertices() const { return static_cast<int>(positions.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_halfedges() const { return 3 * num_faces(); }
  int num_edges() const { return static_cast<int>(edge_halfedge.size()); }

  static int face_of(int h) { return h / 3; }
  static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  int origin(int h) const { return faces[h / 3][h % 3]; }
  int dest(int h) const { return faces[h / 3][(h % 3 + 1) % 3]; }
  bool is_boundary_halfedge(int h) const { return twin[h] < 0; }
  bool is_boundary_edge(int e) const { return twin[edge_halfedge[e]] < 0; }
  bool is_boundary_vertex(int v) const { return vertex_boundary[v] != 0; }

  // Outgoing halfedges of v in counterclockwise order; starts at the boundary halfedge if any.
  std::vector<int> outgoing(int v) const;
  int find_edge(int a, int b) const;  // edge id, -1 if absent
  double bbox_diagonal() const;
};

struct BuildOptions {
  double degeneracy = 1e-12;  // relative to squared bounding-box diagonal
  bool check_area = true;
  const std::vector<char>* forbid_twin = nullptr;  // per halfedge; never paired when set
};

TriMesh build_halfedge(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces,
                       const BuildOptions& opts = {});

struct TopologyInfo {
  int genus = 0;
  int boundary_count = 0;
  int euler = 0;
};

TopologyInfo topology_info(const TriMesh& mesh);
int connected_components(const TriMesh& mesh);
double angle_defect(const TriMesh& mesh, int vertex);

struct SurfacePoint {
  int face = 0;
  std::array<double, 3> bary{1.0 / 3, 1.0 / 3, 1.0 / 3};
};

}  // namespace qli
