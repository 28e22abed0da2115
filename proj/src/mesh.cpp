#include "qli/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "dsu.hpp"

namespace qli {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonManifoldEdge: return "NonManifoldEdge";
    case Errc::NonManifoldVertex: return "NonManifoldVertex";
    case Errc::InconsistentOrientation: return "InconsistentOrientation";
    case Errc::DegenerateFace: return "DegenerateFace";
    case Errc::OddGenusResidue: return "OddGenusResidue";
    case Errc::DisconnectedMesh: return "DisconnectedMesh";
    case Errc::SingularityOnBoundary: return "SingularityOnBoundary";
    case Errc::ZeroAreaFace: return "ZeroAreaFace";
    case Errc::NonQuantizedCone: return "NonQuantizedCone";
    case Errc::NoRigidQuarterTurnFit: return "NoRigidQuarterTurnFit";
    case Errc::InconsistentAlongArc: return "InconsistentAlongArc";
    case Errc::StartOnSingularity: return "StartOnSingularity";
    case Errc::PropertyViolation: return "PropertyViolation";
    case Errc::NonQuadPatch: return "NonQuadPatch";
    case Errc::ArrangementDegeneracy: return "ArrangementDegeneracy";
    case Errc::NotGridAligned: return "NotGridAligned";
    case Errc::InvalidComplex: return "InvalidComplex";
    case Errc::ParseError: return "ParseError";
    case Errc::SeamTwinMismatch: return "SeamTwinMismatch";
    case Errc::VersionUnsupported: return "VersionUnsupported";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

std::vector<int> TriMesh::outgoing(int v) const {
  std::vector<int> out;
  int start = vertex_halfedge[v];
  if (start < 0) return out;
  int h = start;
  do {
    out.push_back(h);
    int t = twin[prev(h)];
    if (t < 0) break;
    h = t;
  } while (h != start);
  return out;
}

int TriMesh::find_edge(int a, int b) const {
  for (int h : outgoing(a)) {
    if (dest(h) == b) return edge[h];
    int p = prev(h);
    if (origin(p) == b) return edge[p];
  }
  return -1;
}

double TriMesh::bbox_diagonal() const {
  if (positions.empty()) return 0.0;
  Vec3 lo = positions[0], hi = positions[0];
  for (const auto& p : positions) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  return norm(hi - lo);
}

TriMesh build_halfedge(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces,
                       const BuildOptions& opts) {
  TriMesh m;
  m.positions = std::move(positions);
  m.faces = std::move(faces);
  const int nv = m.num_vertices();
  const int nf = m.num_faces();
  const int nh = 3 * nf;
  if (opts.forbid_twin && static_cast<int>(opts.forbid_twin->size()) != nh)
    throw Error(Errc::InvalidArgument, "forbid_twin size mismatch");

  for (int f = 0; f < nf; ++f) {
    const auto& t = m.faces[f];
    for (int i = 0; i < 3; ++i)
      if (t[i] < 0 || t[i] >= nv)
        throw Error(Errc::InvalidArgument, "face " + std::to_string(f) + " index out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw Error(Errc::InvalidArgument, "face " + std::to_string(f) + " repeats a vertex");
  }

  if (opts.check_area && nf > 0) {
    double d = m.bbox_diagonal();
    double thresh = opts.degeneracy * d * d;
    for (int f = 0; f < nf; ++f) {
      const auto& t = m.faces[f];
      Vec3 a = m.positions[t[0]], b = m.positions[t[1]], c = m.positions[t[2]];
      double area = 0.5 * norm(cross(b - a, c - a));
      if (!(area >= thresh)) throw Error(Errc::DegenerateFace, "face " + std::to_string(f));
    }
  }

  std::unordered_map<std::uint64_t, std::vector<int>> by_edge;
  by_edge.reserve(nh);
  for (int h = 0; h < nh; ++h) by_edge[edge_key(m.origin(h), m.dest(h))].push_back(h);

  m.twin.assign(nh, -1);
  m.edge.assign(nh, -1);
  for (int h = 0; h < nh; ++h) {
    if (m.edge[h] >= 0) continue;
    const auto& hs = by_edge[edge_key(m.origin(h), m.dest(h))];
    if (hs.size() > 2)
      throw Error(Errc::NonManifoldEdge,
                  "edge " + std::to_string(m.origin(h)) + "-" + std::to_string(m.dest(h)));
    if (hs.size() == 2) {
      int a = hs[0], b = hs[1];
      if (m.origin(a) == m.origin(b))
        throw Error(Errc::InconsistentOrientation,
                    "edge " + std::to_string(m.origin(a)) + "-" + std::to_string(m.dest(a)));
      bool forbid = opts.forbid_twin && ((*opts.forbid_twin)[a] || (*opts.forbid_twin)[b]);
      if (!forbid) {
        m.twin[a] = b;
        m.twin[b] = a;
        int e = m.num_edges();
        m.edge_halfedge.push_back(std::min(a, b));
        m.edge[a] = m.edge[b] = e;
        continue;
      }
    }
    for (int x : hs) {
      if (m.edge[x] >= 0) continue;
      m.edge[x] = m.num_edges();
      m.edge_halfedge.push_back(x);
    }
  }

  m.vertex_halfedge.assign(nv, -1);
  m.vertex_boundary.assign(nv, 0);
  std::vector<int> degree(nv, 0);
  for (int h = 0; h < nh; ++h) {
    int v = m.origin(h);
    ++degree[v];
    if (m.twin[h] < 0) {
      if (m.vertex_boundary[v])
        throw Error(Errc::NonManifoldVertex, "vertex " + std::to_string(v) + " has two boundary gaps");
      m.vertex_boundary[v] = 1;
      m.vertex_halfedge[v] = h;
    } else if (m.vertex_halfedge[v] < 0) {
      m.vertex_halfedge[v] = h;
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (degree[v] == 0) throw Error(Errc::NonManifoldVertex, "vertex " + std::to_string(v) + " is isolated");
    if (static_cast<int>(m.outgoing(v).size()) != degree[v])
      throw Error(Errc::NonManifoldVertex, "vertex " + std::to_string(v) + " has several fans");
  }

  std::vector<char> seen(nh, 0);
  for (int h = 0; h < nh; ++h) {
    if (m.twin[h] >= 0 || seen[h]) continue;
    std::vector<int> loop;
    int x = h;
    while (!seen[x]) {
      seen[x] = 1;
      loop.push_back(x);
      x = m.vertex_halfedge[m.dest(x)];
    }
    m.boundary_loops.push_back(std::move(loop));
  }
  return m;
}

int connected_components(const TriMesh& m) {
  detail::Dsu d(m.num_faces());
  for (int h = 0; h < m.num_halfedges(); ++h)
    if (m.twin[h] >= 0) d.unite(h / 3, m.twin[h] / 3);
  int c = 0;
  for (int f = 0; f < m.num_faces(); ++f) c += d.find(f) == f;
  return c;
}

TopologyInfo topology_info(const TriMesh& m) {
  TopologyInfo t;
  t.euler = m.num_vertices() - m.num_edges() + m.num_faces();
  t.boundary_count = static_cast<int>(m.boundary_loops.size());
  int r = 2 - t.euler - t.boundary_count;
  if (r % 2 != 0) throw Error(Errc::OddGenusResidue, "2 - chi - k = " + std::to_string(r));
  if (r < 0) throw Error(Errc::DisconnectedMesh, "negative genus residue " + std::to_string(r));
  t.genus = r / 2;
  return t;
}

double angle_defect(const TriMesh& m, int v) {
  double sum = 0;
  for (int h : m.outgoing(v)) {
    Vec3 p = m.positions[v];
    Vec3 a = m.positions[m.dest(h)];
    Vec3 b = m.positions[m.origin(TriMesh::prev(h))];
    sum += angle_between(a - p, b - p);
  }
  return (m.is_boundary_vertex(v) ? kPi : 2 * kPi) - sum;
}

}  // namespace qli
