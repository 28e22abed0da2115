#include "qli/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qli {

double SeamlessParam::uv_diagonal() const {
  if (uv.empty()) return 0;
  Vec2 lo = uv[0], hi = uv[0];
  for (Vec2 q : uv) {
    lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
    hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
  }
  return norm(hi - lo);
}

double Tolerances::uv(const SeamlessParam& p) const { return uv_rel * std::max(1.0, p.uv_diagonal()); }

namespace {

double corner_angle_raw(const SeamlessParam& p, int h) {
  Vec2 o = p.uv[h];
  Vec2 a = p.uv[TriMesh::next(h)] - o;
  Vec2 b = p.uv[TriMesh::prev(h)] - o;
  return angle_between(a, b);
}

double face_area_uv(const SeamlessParam& p, int f) {
  Vec2 a = p.uv[3 * f], b = p.uv[3 * f + 1], c = p.uv[3 * f + 2];
  return 0.5 * cross(b - a, c - a);
}

std::vector<int> non_regular_vertices(const TriMesh& mesh, const std::vector<Vec2>& uv,
                                      const CompletionMesh& comp) {
  std::vector<double> phi(mesh.num_vertices(), 0);
  for (int h = 0; h < mesh.num_halfedges(); ++h) {
    Vec2 o = uv[h];
    phi[comp.vertex_map[comp.mesh.origin(h)]] +=
        angle_between(uv[TriMesh::next(h)] - o, uv[TriMesh::prev(h)] - o);
  }
  std::vector<int> out;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double expect = mesh.is_boundary_vertex(v) ? kPi : 2 * kPi;
    if (std::fabs(phi[v] - expect) > 1e-6) out.push_back(v);
  }
  return out;
}

}  // namespace

SeamlessParam assemble_param(TriMesh mesh, std::vector<Vec2> uv, std::vector<SeamRecord> seams,
                             std::vector<ConeRecord> declared, bool has_declared) {
  SeamlessParam p;
  p.mesh = std::move(mesh);
  p.uv = std::move(uv);
  if (static_cast<int>(p.uv.size()) != p.mesh.num_halfedges())
    throw Error(Errc::InvalidArgument, "uv table needs 3 entries per face");
  std::sort(seams.begin(), seams.end(),
            [](const SeamRecord& a, const SeamRecord& b) { return a.halfedge < b.halfedge; });
  p.seams = std::move(seams);
  p.seam_of.assign(p.mesh.num_halfedges(), -1);
  for (int i = 0; i < static_cast<int>(p.seams.size()); ++i) {
    int h = p.seams[i].halfedge;
    if (h < 0 || h >= p.mesh.num_halfedges()) throw Error(Errc::InvalidArgument, "seam halfedge out of range");
    if (p.seam_of[h] >= 0) throw Error(Errc::SeamTwinMismatch, "duplicate seam record on halfedge " + std::to_string(h));
    p.seam_of[h] = i;
  }
  std::vector<int> edges;
  for (const auto& s : p.seams) {
    int t = p.mesh.twin[s.halfedge];
    if (t < 0 || p.seam_of[t] < 0)
      throw Error(Errc::SeamTwinMismatch, "seam on halfedge " + std::to_string(s.halfedge) + " has no twin record");
    if (s.halfedge < t) edges.push_back(p.mesh.edge[s.halfedge]);
  }
  CutGraph provisional;
  provisional.cut_edges = edges;
  CompletionMesh comp = cut_mesh(p.mesh, provisional);
  p.cut = make_cut_graph(p.mesh, edges, non_regular_vertices(p.mesh, p.uv, comp));
  p.completion = std::move(comp);
  for (int a = 0; a < static_cast<int>(p.cut.arcs.size()); ++a) {
    for (int e : p.cut.arcs[a].edges) {
      int h = p.mesh.edge_halfedge[e];
      for (int x : {h, p.mesh.twin[h]})
        if (p.seams[p.seam_of[x]].arc < 0) p.seams[p.seam_of[x]].arc = a;
    }
  }
  p.declared_cones = std::move(declared);
  p.has_declared_cones = has_declared;
  return p;
}

double corner_angle(const SeamlessParam& p, int h) {
  int f = h / 3;
  double scale = std::max(1.0, p.uv_diagonal());
  if (!(std::fabs(face_area_uv(p, f)) > 1e-14 * scale * scale))
    throw Error(Errc::ZeroAreaFace, "face " + std::to_string(f));
  return corner_angle_raw(p, h);
}

double parametric_angle(const SeamlessParam& p, int cv) {
  double sum = 0;
  for (int h : p.completion.mesh.outgoing(cv)) sum += corner_angle(p, h);
  return sum;
}

std::vector<VertexAngle> measure_vertex_angles(const SeamlessParam& p, double tol) {
  std::vector<VertexAngle> out(p.mesh.num_vertices());
  for (int h = 0; h < p.mesh.num_halfedges(); ++h) out[p.mesh.origin(h)].phi += corner_angle_raw(p, h);
  for (int v = 0; v < p.mesh.num_vertices(); ++v) {
    auto& a = out[v];
    a.boundary = p.mesh.is_boundary_vertex(v);
    a.m = static_cast<int>(std::lround(a.phi / kHalfPi));
    a.quantized = std::fabs(a.phi - a.m * kHalfPi) <= tol && a.m >= 1;
    a.regular = a.quantized && a.m == (a.boundary ? 2 : 4);
  }
  return out;
}

std::vector<ConeRecord> detect_cones(const SeamlessParam& p, double tol) {
  for (int cv = 0; cv < p.completion.mesh.num_vertices(); ++cv) parametric_angle(p, cv);
  std::vector<ConeRecord> cones;
  auto angles = measure_vertex_angles(p, tol);
  for (int v = 0; v < p.mesh.num_vertices(); ++v) {
    const auto& a = angles[v];
    if (a.regular) continue;
    if (!a.quantized)
      throw Error(Errc::NonQuantizedCone, "vertex " + std::to_string(v) + " angle " + std::to_string(a.phi));
    double full = a.boundary ? kPi : 2 * kPi;
    cones.push_back({v, a.boundary, a.m, a.phi, full - a.m * kHalfPi});
  }
  return cones;
}

double check_gauss_bonnet(const std::vector<ConeRecord>& cones, const TopologyInfo& topo) {
  double sum = 0;
  for (const auto& c : cones) sum += c.defect;
  return sum - 2 * kPi * topo.euler;
}

namespace {

struct EdgeSides {
  Vec2 a0, a1, b0, b1;  // arc-oriented side (a) and its twin (b), at the arc's start and end vertex
};

EdgeSides sides_of(const SeamlessParam& p, int h) {
  int g = p.mesh.twin[h];
  return {p.uv[h], p.uv[TriMesh::next(h)], p.uv[TriMesh::next(g)], p.uv[g]};
}

double fit_residual(const SeamTransition& T, const EdgeSides& s) {
  return std::max(norm(T.apply(s.b0) - s.a0), norm(T.apply(s.b1) - s.a1));
}

}  // namespace

ArcFit seam_transition_fit_unchecked(const SeamlessParam& p, const GraphArc& arc, double tol) {
  ArcFit fit;
  for (size_t k = 0; k < arc.edges.size(); ++k) {
    int h = p.mesh.edge_halfedge[arc.edges[k]];
    if (p.mesh.origin(h) != arc.vertices[k]) h = p.mesh.twin[h];
    fit.halfedges.push_back(h);
  }
  if (fit.halfedges.empty()) throw Error(Errc::InvalidArgument, "arc has no edges");
  EdgeSides s0 = sides_of(p, fit.halfedges[0]);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 4; ++j) {
    SeamTransition T{j, s0.a0 - rot90(s0.b0, j)};
    double r = fit_residual(T, s0);
    if (r < best) {
      best = r;
      fit.T = T;
    }
  }
  if (!(best <= tol))
    throw Error(Errc::NoRigidQuarterTurnFit, "arc starting at vertex " + std::to_string(arc.vertices[0]) +
                                                 " residual " + std::to_string(best));
  for (int h : fit.halfedges) {
    double d = fit_residual(fit.T, sides_of(p, h));
    fit.deviation.push_back(d);
    fit.max_deviation = std::max(fit.max_deviation, d);
  }
  return fit;
}

ArcFit seam_transition_fit(const SeamlessParam& p, const GraphArc& arc, double tol) {
  ArcFit fit = seam_transition_fit_unchecked(p, arc, tol);
  if (fit.max_deviation > tol)
    throw Error(Errc::InconsistentAlongArc, "arc starting at vertex " + std::to_string(arc.vertices[0]) +
                                                " deviates by " + std::to_string(fit.max_deviation));
  return fit;
}

int vertex_holonomy(const SeamlessParam& p, int v) {
  int sum = 0;
  for (int h : p.mesh.outgoing(v)) {
    int in = TriMesh::prev(h);
    int t = p.mesh.twin[in];
    if (t < 0) continue;
    if (p.is_cut(in)) sum += p.transition(t).j;
  }
  return ((sum % 4) + 4) % 4;
}

std::vector<std::string> ValidationReport::failed() const {
  std::vector<std::string> out;
  const std::pair<const char*, const PropertyOutcome*> all[] = {
      {"Q1", &q1}, {"Q2", &q2}, {"Q3", &q3}, {"Q4", &q4}, {"gauss_bonnet", &gauss_bonnet}, {"holonomy", &holonomy}};
  for (auto [name, o] : all)
    if (!o->pass) out.push_back(name);
  return out;
}

namespace {

void singular_values(const SeamlessParam& p, int f, double& smin, double& smax) {
  const auto& t = p.mesh.faces[f];
  Vec3 e1 = p.mesh.positions[t[1]] - p.mesh.positions[t[0]];
  Vec3 e2 = p.mesh.positions[t[2]] - p.mesh.positions[t[0]];
  double l1 = norm(e1);
  Vec3 x = (1.0 / l1) * e1;
  Vec3 n = cross(e1, e2);
  Vec3 y = cross(n, x);
  y = (1.0 / norm(y)) * y;
  // Local 2D coordinates of the 3D edges, columns of E.
  double E00 = l1, E10 = 0, E01 = dot(e2, x), E11 = dot(e2, y);
  Vec2 u1 = p.uv[3 * f + 1] - p.uv[3 * f], u2 = p.uv[3 * f + 2] - p.uv[3 * f];
  double det = E00 * E11 - E01 * E10;
  // J = U E^{-1}
  double i00 = E11 / det, i01 = -E01 / det, i10 = -E10 / det, i11 = E00 / det;
  double a = u1.x * i00 + u2.x * i10, b = u1.x * i01 + u2.x * i11;
  double c = u1.y * i00 + u2.y * i10, d = u1.y * i01 + u2.y * i11;
  double S = a * a + b * b + c * c + d * d;
  double D = a * d - b * c;
  double disc = std::sqrt(std::max(0.0, S * S - 4 * D * D));
  smax = std::sqrt((S + disc) / 2);
  smin = std::sqrt(std::max(0.0, (S - disc) / 2));
}

}  // namespace

ValidationReport validate_immersion(const SeamlessParam& p, const Tolerances& tol) {
  ValidationReport r;
  const TriMesh& m = p.mesh;
  const double tuv = tol.uv(p);
  auto angles = measure_vertex_angles(p, tol.angle);
  r.topology = topology_info(m);

  // Q1: orientation and Jacobian bounds per face.
  r.sigma_min = std::numeric_limits<double>::infinity();
  r.sigma_max = 0;
  double scale = std::max(1.0, p.uv_diagonal());
  for (int f = 0; f < m.num_faces(); ++f) {
    double area = face_area_uv(p, f);
    if (!(area > 1e-14 * scale * scale)) r.q1.fail({"face", f, area, 0, "UV orientation not positive"});
    double smin, smax;
    singular_values(p, f, smin, smax);
    r.sigma_min = std::min(r.sigma_min, smin);
    r.sigma_max = std::max(r.sigma_max, smax);
  }
  // Chart continuity across uncut edges; a tear at a cone belongs to its cone neighborhood.
  for (int h = 0; h < m.num_halfedges(); ++h) {
    int t = m.twin[h];
    if (t < 0 || t < h || p.is_cut(h)) continue;
    const std::pair<int, double> ends[] = {{m.origin(h), norm(p.uv[h] - p.uv[TriMesh::next(t)])},
                                           {m.dest(h), norm(p.uv[TriMesh::next(h)] - p.uv[t])}};
    for (auto [v, gap] : ends) {
      if (gap <= tuv) continue;
      Violation viol{"vertex", v, gap, 0, "chart mismatch across edge " + std::to_string(m.edge[h])};
      if (angles[v].regular)
        r.q1.fail(viol);
      else
        r.q2.fail(viol);
    }
  }

  // Q2: quantized cone angles, cross-checked against declarations.
  for (int v = 0; v < m.num_vertices(); ++v) {
    const auto& a = angles[v];
    if (!a.quantized) {
      r.q2.fail({"vertex", v, a.phi, a.m * kHalfPi, "cone angle not a multiple of pi/2"});
      continue;
    }
    if (a.regular) continue;
    double full = a.boundary ? kPi : 2 * kPi;
    r.cones.push_back({v, a.boundary, a.m, a.phi, full - a.m * kHalfPi});
  }
  if (p.has_declared_cones) {
    std::map<int, ConeRecord> detected, declared;
    for (const auto& c : r.cones) detected[c.vertex] = c;
    for (const auto& c : p.declared_cones) declared[c.vertex] = c;
    for (const auto& [v, c] : declared) {
      auto it = detected.find(v);
      if (it == detected.end() || it->second.m != c.m || it->second.boundary != c.boundary)
        r.q2.fail({"declared_cone", v, it == detected.end() ? 4.0 : it->second.m, double(c.m), "declared cone not detected"});
    }
    for (const auto& [v, c] : detected)
      if (!declared.count(v)) r.q2.fail({"vertex", v, double(c.m), 0, "detected cone not declared"});
  }

  // Q3: one rigid quarter-turn per arc, matching the stored transitions.
  for (int a = 0; a < static_cast<int>(p.cut.arcs.size()); ++a) {
    const auto& arc = p.cut.arcs[a];
    ArcFit fit;
    try {
      fit = seam_transition_fit_unchecked(p, arc, tuv);
    } catch (const Error& e) {
      r.q3.fail({"arc", a, 0, 0, e.what()});
      continue;
    }
    for (size_t k = 0; k < fit.halfedges.size(); ++k) {
      int h = fit.halfedges[k];
      if (fit.deviation[k] > tuv)
        r.q3.fail({"edge", m.edge[h], fit.deviation[k], 0, "transition varies along arc " + std::to_string(a)});
      const SeamTransition& sh = p.transition(h);
      const SeamTransition& st = p.transition(m.twin[h]);
      SeamTransition inv = fit.T.inverse();
      if (sh.j != fit.T.j || norm(sh.t - fit.T.t) > tuv)
        r.q3.fail({"halfedge", h, double(sh.j), double(fit.T.j), "stored transition disagrees with the charts"});
      if (st.j != inv.j || norm(st.t - inv.t) > tuv)
        r.q3.fail({"halfedge", m.twin[h], double(st.j), double(inv.j), "stored transition disagrees with the charts"});
    }
  }

  // Q4: boundary segments between cones and graph vertices are axis lines.
  std::vector<int> val = cut_valence(m, p.cut.cut_edges);
  auto is_break = [&](int v) { return !angles[v].regular || val[v] > 0; };
  for (const auto& loop : m.boundary_loops) {
    const int n = static_cast<int>(loop.size());
    int start = -1;
    for (int i = 0; i < n; ++i)
      if (is_break(m.origin(loop[i]))) {
        start = i;
        break;
      }
    if (start < 0) start = 0;
    int i = 0;
    while (i < n) {
      std::vector<int> seg;
      do {
        seg.push_back(loop[(start + i) % n]);
        ++i;
      } while (i < n && !is_break(m.origin(loop[(start + i) % n])));
      double ulo = 1e300, uhi = -1e300, vlo = 1e300, vhi = -1e300;
      for (int h : seg)
        for (Vec2 q : {p.uv[h], p.uv[TriMesh::next(h)]}) {
          ulo = std::min(ulo, q.x), uhi = std::max(uhi, q.x);
          vlo = std::min(vlo, q.y), vhi = std::max(vhi, q.y);
        }
      double spread = std::min(uhi - ulo, vhi - vlo);
      if (spread > tuv)
        r.q4.fail({"boundary_segment", seg.front(), spread, 0,
                   "segment of " + std::to_string(seg.size()) + " edges is not an axis line"});
    }
  }

  // Gauss-Bonnet over the quantized cone angles.
  {
    double sum = 0;
    for (int v = 0; v < m.num_vertices(); ++v) {
      const auto& a = angles[v];
      sum += (a.boundary ? kPi : 2 * kPi) - a.m * kHalfPi;
    }
    r.gauss_bonnet_residual = sum - 2 * kPi * r.topology.euler;
    if (!(std::fabs(r.gauss_bonnet_residual) < tol.gauss_bonnet))
      r.gauss_bonnet.fail({"surface", -1, r.gauss_bonnet_residual, 0, "sum of defects differs from 2 pi chi"});
  }

  // Holonomy around interior vertices and along each graph arc.
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (m.is_boundary_vertex(v)) continue;
    int hol = vertex_holonomy(p, v);
    int expect = ((4 - angles[v].m % 4) % 4 + 4) % 4;
    if (hol != expect) r.holonomy.fail({"vertex", v, double(hol), double(expect), "rotation sum around vertex"});
  }
  for (int a = 0; a < static_cast<int>(p.cut.arcs.size()); ++a) {
    const auto& arc = p.cut.arcs[a];
    int j0 = -1;
    for (size_t k = 0; k < arc.edges.size(); ++k) {
      int h = m.edge_halfedge[arc.edges[k]];
      if (m.origin(h) != arc.vertices[k]) h = m.twin[h];
      int j = p.transition(h).j, jt = p.transition(m.twin[h]).j;
      if ((j + jt) % 4 != 0)
        r.holonomy.fail({"edge", arc.edges[k], double(j + jt), 0, "seam pair rotations do not cancel"});
      if (j0 < 0) j0 = j;
      if (j != j0)
        r.holonomy.fail({"arc", a, double(j), double(j0), "rotation index changes along the arc"});
    }
  }
  return r;
}

}  // namespace qli
