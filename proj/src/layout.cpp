#include "qli/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "dsu.hpp"

namespace qli {

const char* curve_role_name(CurveRole r) {
  switch (r) {
    case CurveRole::Separatrix: return "separatrix";
    case CurveRole::Boundary: return "boundary";
    case CurveRole::Periodic: return "periodic";
  }
  return "?";
}

const char* node_role_name(NodeRole r) {
  switch (r) {
    case NodeRole::Cone: return "cone";
    case NodeRole::BoundaryCone: return "boundary_cone";
    case NodeRole::BoundaryHit: return "boundary_hit";
    case NodeRole::Crossing: return "crossing";
    case NodeRole::Anchor: return "anchor";
  }
  return "?";
}

SurfaceKey surface_key(const SeamlessParam& p, int f, Vec2 x, double tol) {
  const TriMesh& m = p.mesh;
  SurfaceKey k;
  for (int i = 0; i < 3; ++i)
    if (norm(x - p.uv[3 * f + i]) <= tol) {
      k.kind = SurfaceKey::Vertex;
      k.id = m.faces[f][i];
      return k;
    }
  for (int i = 0; i < 3; ++i) {
    Vec2 A = p.uv[3 * f + i], B = p.uv[3 * f + (i + 1) % 3];
    double L = norm(B - A);
    double along = dot(x - A, B - A) / L;
    double dist = std::fabs(cross(B - A, x - A)) / L;
    if (dist <= tol && along > tol && L - along > tol) {
      int he = 3 * f + i;
      int e = m.edge[he];
      k.kind = SurfaceKey::Edge;
      k.id = e;
      k.a = m.edge_halfedge[e] == he ? along : L - along;
      return k;
    }
  }
  k.kind = SurfaceKey::Face;
  k.id = f;
  k.a = x.x;
  k.b = x.y;
  return k;
}

bool same_key(const SurfaceKey& x, const SurfaceKey& y, double tol) {
  return x.kind == y.kind && x.id == y.id && std::fabs(x.a - y.a) <= tol && std::fabs(x.b - y.b) <= tol;
}

namespace {

using detail::Dsu;

// Welded set of surface keys.
class KeyStore {
 public:
  explicit KeyStore(double tol) : tol_(tol) {}
  int find(const SurfaceKey& k) const {
    auto it = buckets_.find({k.kind, k.id});
    if (it == buckets_.end()) return -1;
    for (int i : it->second)
      if (same_key(keys_[i], k, tol_)) return i;
    return -1;
  }
  int insert(const SurfaceKey& k) {
    int i = find(k);
    if (i >= 0) return i;
    keys_.push_back(k);
    buckets_[{k.kind, k.id}].push_back(static_cast<int>(keys_.size()) - 1);
    return static_cast<int>(keys_.size()) - 1;
  }
  const SurfaceKey& operator[](int i) const { return keys_[i]; }
  int size() const { return static_cast<int>(keys_.size()); }

 private:
  double tol_;
  std::vector<SurfaceKey> keys_;
  std::map<std::pair<int, int>, std::vector<int>> buckets_;
};

double weld_tol(const SeamlessParam& p) { return 1e-7 * std::max(1.0, p.uv_diagonal()); }

SurfacePoint key_point(const SeamlessParam& p, const SurfaceKey& k) {
  const TriMesh& m = p.mesh;
  SurfacePoint s;
  if (k.kind == SurfaceKey::Vertex) {
    int h = m.vertex_halfedge[k.id];
    s.face = TriMesh::face_of(h);
    s.bary = {0, 0, 0};
    s.bary[h % 3] = 1;
  } else if (k.kind == SurfaceKey::Edge) {
    int h = m.edge_halfedge[k.id];
    double L = norm(p.uv[TriMesh::next(h)] - p.uv[h]);
    double t = k.a / L;
    s.face = TriMesh::face_of(h);
    s.bary = {0, 0, 0};
    s.bary[h % 3] = 1 - t;
    s.bary[(h % 3 + 1) % 3] = t;
  } else {
    s = surface_point_at(p, k.id, Vec2{k.a, k.b});
  }
  return s;
}

std::string key_signature(const SurfaceKey& k) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d:%d:%.6f:%.6f", int(k.kind), k.id, k.a, k.b);
  return buf;
}

// Order-independent fingerprint of a traced curve.
std::string curve_signature(const SeamlessParam& p, const QuotientCurve& c, double tol) {
  std::vector<std::string> parts;
  for (const auto& piece : c.pieces)
    for (const auto& s : piece.segments) {
      std::string a = key_signature(surface_key(p, s.face, s.a, tol));
      std::string b = key_signature(surface_key(p, s.face, s.b, tol));
      if (b < a) std::swap(a, b);
      parts.push_back(a + "|" + b);
    }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& s : parts) out += s + ";";
  return out;
}

LayoutCurve boundary_curve(const SeamlessParam& p, const std::vector<int>& loop) {
  LayoutCurve lc;
  lc.role = CurveRole::Boundary;
  lc.closed = true;
  CoordinateLine line;
  for (int h : loop) {
    TraceSegment s;
    s.face = TriMesh::face_of(h);
    s.a = p.uv[h];
    s.b = p.uv[TriMesh::next(h)];
    s.pa = surface_point_at(p, s.face, s.a);
    s.pb = surface_point_at(p, s.face, s.b);
    s.along_boundary = true;
    line.segments.push_back(s);
  }
  if (!loop.empty()) {
    Vec2 d = p.uv[TriMesh::next(loop[0])] - p.uv[loop[0]];
    line.axis = std::fabs(d.x) <= std::fabs(d.y) ? Axis::U : Axis::V;
    line.value = p.uv[loop[0]][line.axis == Axis::U ? 0 : 1];
  }
  lc.curve.pieces.push_back(std::move(line));
  lc.curve.status = CurveStatus::ClosedLoop;
  return lc;
}

}  // namespace

SeparatrixSet emit_separatrices(const SeamlessParam& p, int budget) {
  SeparatrixSet out;
  const double tol = weld_tol(p);
  auto angles = measure_vertex_angles(p);
  std::set<std::string> seen;
  bool any_cone = false;
  for (int v = 0; v < p.mesh.num_vertices(); ++v) {
    if (angles[v].regular) continue;
    any_cone = true;
    for (const auto& s : separatrix_starts(p, v)) {
      QuotientCurve c = trace_separatrix(p, s, budget);
      ++out.emitted;
      if (c.status != CurveStatus::Finite)
        throw Error(Errc::PropertyViolation, "separatrix from vertex " + std::to_string(v) + " is " +
                                                 curve_status_name(c.status));
      if (!seen.insert(curve_signature(p, c, tol)).second) {
        ++out.merged;
        continue;
      }
      out.curves.push_back({CurveRole::Separatrix, std::move(c), false});
    }
  }
  if (!any_cone && topology_info(p.mesh).euler == 0) {
    auto starts = base_point_starts(p);
    for (Axis a : {Axis::U, Axis::V}) {
      QuotientCurve c = starts.empty() ? trace_quotient_curve(p, SurfacePoint{}, a, 1, budget)
                                       : trace_separatrix(p, starts[a == Axis::U ? 0 : 1], budget);
      if (c.status == CurveStatus::Periodic) {
        // Keep exactly one period.
        std::vector<CoordinateLine> period(c.pieces.begin() + c.period_start + 1,
                                           c.pieces.begin() + c.period_start + 1 + c.period_length);
        c.pieces = std::move(period);
      } else if (c.status != CurveStatus::ClosedLoop) {
        throw Error(Errc::PropertyViolation, std::string("transverse ") + axis_name(a) + " curve is " +
                                                 curve_status_name(c.status));
      }
      out.curves.push_back({CurveRole::Periodic, std::move(c), true});
    }
  }
  for (const auto& loop : p.mesh.boundary_loops) out.curves.push_back(boundary_curve(p, loop));
  return out;
}

namespace {

struct Piece {
  int curve = -1;
  int face = -1;
  Vec2 a, b;
  int ka = -1, kb = -1;
  int axis = 0;  // index of the constant coordinate
  double value = 0;
  int along_edge = -1;  // mesh edge the piece lies on, or -1
};

struct RawSeg {
  int curve, face;
  Vec2 a, b;
  int axis;
  double value;
  int along_edge;
  std::vector<double> cuts;  // parameters in (0, 1)
};

class Arrangement {
 public:
  Arrangement(const SeamlessParam& p, std::vector<LayoutCurve> curves)
      : p_(p), m_(p.mesh), tol_(weld_tol(p)), keys_(tol_), curves_(std::move(curves)) {}

  QuadLayout build() {
    collect_segments();
    insert_crossings();
    make_pieces();
    find_nodes();
    make_arcs();
    make_patches();
    QuadLayout L;
    L.nodes = nodes_;
    L.arcs = arcs_;
    L.patches = patches_;
    L.curves = curves_;
    L.euler = static_cast<int>(nodes_.size()) - static_cast<int>(arcs_.size()) + static_cast<int>(patches_.size());
    L.surface_euler = topology_info(m_).euler;
    for (const auto& c : curves_) L.node_crossings += c.curve.node_crossings;
    return L;
  }

 private:
  // ---- segments and crossings
  void collect_segments() {
    for (int ci = 0; ci < static_cast<int>(curves_.size()); ++ci)
      for (const auto& line : curves_[ci].curve.pieces)
        for (const auto& s : line.segments) {
          if (norm(s.b - s.a) <= tol_) continue;
          RawSeg r{ci, s.face, s.a, s.b, 0, 0, -1, {}};
          if (std::fabs(s.b.x - s.a.x) <= tol_) {
            r.axis = 0;
            r.value = 0.5 * (s.a.x + s.b.x);
          } else if (std::fabs(s.b.y - s.a.y) <= tol_) {
            r.axis = 1;
            r.value = 0.5 * (s.a.y + s.b.y);
          } else {
            throw Error(Errc::PropertyViolation, "curve segment in face " + std::to_string(s.face) +
                                                     " is not axis-parallel");
          }
          for (int i = 0; i < 3; ++i) {
            Vec2 A = p_.uv[3 * s.face + i], B = p_.uv[3 * s.face + (i + 1) % 3];
            double L = norm(B - A);
            if (std::fabs(cross(B - A, s.a - A)) / L <= tol_ && std::fabs(cross(B - A, s.b - A)) / L <= tol_)
              r.along_edge = m_.edge[3 * s.face + i];
          }
          segs_.push_back(std::move(r));
        }
  }

  double param_on(const RawSeg& s, Vec2 x) const {
    Vec2 d = s.b - s.a;
    return dot(x - s.a, d) / dot(d, d);
  }

  void insert_crossings() {
    std::map<int, std::vector<int>> by_face;
    for (int i = 0; i < static_cast<int>(segs_.size()); ++i) by_face[segs_[i].face].push_back(i);
    for (auto& [f, ids] : by_face)
      for (size_t x = 0; x < ids.size(); ++x)
        for (size_t y = x + 1; y < ids.size(); ++y) {
          RawSeg& s = segs_[ids[x]];
          RawSeg& t = segs_[ids[y]];
          if (s.axis == t.axis) {
            if (std::fabs(s.value - t.value) > tol_) continue;
            int k = 1 - s.axis;
            double lo = std::max(std::min(s.a[k], s.b[k]), std::min(t.a[k], t.b[k]));
            double hi = std::min(std::max(s.a[k], s.b[k]), std::max(t.a[k], t.b[k]));
            if (hi - lo > tol_)
              throw Error(Errc::ArrangementDegeneracy, "curves " + std::to_string(s.curve) + " and " +
                                                           std::to_string(t.curve) + " overlap in face " +
                                                           std::to_string(f));
            continue;
          }
          const RawSeg& su = s.axis == 0 ? s : t;
          const RawSeg& sv = s.axis == 0 ? t : s;
          Vec2 X{su.value, sv.value};
          auto within = [&](const RawSeg& r, int k) {
            return X[k] >= std::min(r.a[k], r.b[k]) - tol_ && X[k] <= std::max(r.a[k], r.b[k]) + tol_;
          };
          if (!within(su, 1) || !within(sv, 0)) continue;
          for (RawSeg* r : {&s, &t}) {
            double len = norm(r->b - r->a);
            double u = param_on(*r, X);
            if (u * len > tol_ && (1 - u) * len > tol_) r->cuts.push_back(u);
          }
        }
    // Along-edge overlaps between different faces.
    std::map<int, std::vector<std::pair<double, double>>> on_edge;
    for (const auto& s : segs_) {
      if (s.along_edge < 0) continue;
      SurfaceKey ka = surface_key(p_, s.face, s.a, tol_), kb = surface_key(p_, s.face, s.b, tol_);
      auto coord = [&](const SurfaceKey& k) {
        if (k.kind == SurfaceKey::Edge) return k.a;
        int h = m_.edge_halfedge[s.along_edge];
        return k.id == m_.origin(h) ? 0.0 : norm(p_.uv[TriMesh::next(h)] - p_.uv[h]);
      };
      double a = coord(ka), b = coord(kb);
      if (a > b) std::swap(a, b);
      for (auto [c, d] : on_edge[s.along_edge])
        if (std::min(b, d) - std::max(a, c) > tol_)
          throw Error(Errc::ArrangementDegeneracy, "two curves run along edge " + std::to_string(s.along_edge));
      on_edge[s.along_edge].push_back({a, b});
    }
  }

  void make_pieces() {
    pieces_.assign(curves_.size(), {});
    for (auto& s : segs_) {
      std::sort(s.cuts.begin(), s.cuts.end());
      std::vector<Vec2> pts{s.a};
      for (double u : s.cuts) pts.push_back(s.a + u * (s.b - s.a));
      pts.push_back(s.b);
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Piece pc;
        pc.curve = s.curve;
        pc.face = s.face;
        pc.a = pts[i];
        pc.b = pts[i + 1];
        pc.a[s.axis] = pc.b[s.axis] = s.value;
        pc.ka = keys_.insert(surface_key(p_, s.face, pc.a, tol_));
        pc.kb = keys_.insert(surface_key(p_, s.face, pc.b, tol_));
        if (pc.ka == pc.kb) continue;
        pc.axis = s.axis;
        pc.value = s.value;
        pc.along_edge = s.along_edge;
        pieces_[s.curve].push_back(pc);
      }
    }
    for (int c = 0; c < static_cast<int>(pieces_.size()); ++c) {
      const auto& ps = pieces_[c];
      for (size_t i = 0; i + 1 < ps.size(); ++i)
        if (ps[i].kb != ps[i + 1].ka)
          throw Error(Errc::PropertyViolation, "curve " + std::to_string(c) + " is discontinuous in face " +
                                                   std::to_string(ps[i + 1].face));
      if (curves_[c].closed && !ps.empty() && ps.back().kb != ps.front().ka)
        throw Error(Errc::PropertyViolation, "closed curve " + std::to_string(c) + " does not close up");
    }
  }

  // ---- nodes and arcs
  void find_nodes() {
    std::vector<int> visits(keys_.size(), 0);
    for (int c = 0; c < static_cast<int>(pieces_.size()); ++c) {
      const auto& ps = pieces_[c];
      if (ps.empty()) continue;
      for (size_t i = 0; i + 1 < ps.size(); ++i) ++visits[ps[i].kb];
      if (curves_[c].closed) {
        ++visits[ps.back().kb];
      } else {
        ++visits[ps.front().ka];
        ++visits[ps.back().kb];
      }
    }
    node_of_key_.assign(keys_.size(), -1);
    auto angles = measure_vertex_angles(p_);
    auto add_node = [&](int key, NodeRole role, int mm) {
      if (node_of_key_[key] >= 0) return;
      node_of_key_[key] = static_cast<int>(nodes_.size());
      LayoutNode n;
      n.key = keys_[key];
      n.point = key_point(p_, n.key);
      n.role = role;
      n.m = mm;
      nodes_.push_back(n);
    };
    // Cones first, by vertex id.
    for (int v = 0; v < m_.num_vertices(); ++v) {
      if (angles[v].regular) continue;
      SurfaceKey k;
      k.kind = SurfaceKey::Vertex;
      k.id = v;
      int key = keys_.insert(k);
      if (key >= static_cast<int>(node_of_key_.size())) {
        node_of_key_.resize(key + 1, -1);
        visits.resize(key + 1, 0);
      }
      add_node(key, m_.is_boundary_vertex(v) ? NodeRole::BoundaryCone : NodeRole::Cone, angles[v].m);
    }
    for (int c = 0; c < static_cast<int>(pieces_.size()); ++c) {
      const auto& ps = pieces_[c];
      if (ps.empty() || curves_[c].closed) continue;
      add_node(ps.front().ka, NodeRole::BoundaryHit, 0);
      add_node(ps.back().kb, NodeRole::BoundaryHit, 0);
    }
    for (int k = 0; k < keys_.size(); ++k)
      if (visits[k] >= 2) add_node(k, NodeRole::Crossing, 0);
    for (int c = 0; c < static_cast<int>(pieces_.size()); ++c) {
      const auto& ps = pieces_[c];
      if (ps.empty() || !curves_[c].closed) continue;
      bool has = false;
      for (const auto& pc : ps) has = has || node_of_key_[pc.ka] >= 0;
      if (!has) add_node(ps.front().ka, NodeRole::Anchor, 0);
    }
  }

  void make_arcs() {
    for (int c = 0; c < static_cast<int>(pieces_.size()); ++c) {
      auto ps = pieces_[c];
      if (ps.empty()) continue;
      if (curves_[c].closed) {
        size_t r = 0;
        while (node_of_key_[ps[r].ka] < 0) ++r;
        std::rotate(ps.begin(), ps.begin() + r, ps.end());
      }
      LayoutArc arc;
      arc.curve = c;
      arc.role = curves_[c].role;
      arc.from = node_of_key_[ps.front().ka];
      for (const auto& pc : ps) {
        arc.pieces.push_back({pc.face, pc.a, pc.b});
        arc.length += norm(pc.b - pc.a);
        int n = node_of_key_[pc.kb];
        if (n >= 0) {
          arc.to = n;
          arcs_.push_back(arc);
          arc = LayoutArc{};
          arc.curve = c;
          arc.role = curves_[c].role;
          arc.from = n;
        }
      }
    }
  }

  // ---- cells and patches
  // Lines inside face f that split it.
  const std::vector<std::pair<int, double>>& chords(int f) {
    auto it = chords_.find(f);
    if (it != chords_.end()) return it->second;
    std::vector<std::pair<int, double>> out;
    for (const auto& s : segs_) {
      if (s.face != f || s.along_edge >= 0) continue;
      bool dup = false;
      for (auto [ax, v] : out) dup = dup || (ax == s.axis && std::fabs(v - s.value) <= tol_);
      if (!dup) out.push_back({s.axis, s.value});
    }
    return chords_[f] = out;
  }

  int cell_of(int f, Vec2 x) {
    std::string sig;
    for (auto [ax, v] : chords(f)) {
      double d = x[ax] - v;
      sig.push_back(d > 0 ? '+' : d < 0 ? '-' : '0');
    }
    auto key = std::make_pair(f, sig);
    auto it = cells_.find(key);
    if (it != cells_.end()) return it->second;
    int id = dsu_.add();
    cells_[key] = id;
    cell_face_.push_back(f);
    return id;
  }

  // Distance from x to the nearest chord line or triangle edge not through x.
  double clearance(int f, Vec2 x) {
    double best = 1e300;
    for (auto [ax, v] : chords(f)) {
      double d = std::fabs(x[ax] - v);
      if (d > tol_) best = std::min(best, d);
    }
    for (int i = 0; i < 3; ++i) {
      Vec2 A = p_.uv[3 * f + i], B = p_.uv[3 * f + (i + 1) % 3];
      double L = norm(B - A);
      best = std::min(best, 0.5 * L);
      double d = std::fabs(cross(B - A, x - A)) / L;
      if (d > tol_) best = std::min(best, d);
      double da = norm(x - A);
      if (da > tol_) best = std::min(best, da);
    }
    return 0.25 * best;
  }

  bool inside(int f, Vec2 x) const {
    SurfacePoint s = surface_point_at(p_, f, x);
    return s.bary[0] > 0 && s.bary[1] > 0 && s.bary[2] > 0;
  }

  // Cell just off x in direction n, crossing into the neighbouring face when x is on an edge of f.
  int cell_near(int f, Vec2 x, Vec2 n) {
    double delta = clearance(f, x);
    Vec2 q = x + delta * n;
    if (inside(f, q)) return cell_of(f, q);
    for (int i = 0; i < 3; ++i) {
      int he = 3 * f + i;
      Vec2 A = p_.uv[he], B = p_.uv[TriMesh::next(he)];
      double L = norm(B - A);
      if (std::fabs(cross(B - A, x - A)) / L > tol_) continue;
      if (cross(B - A, n) > 0) continue;  // n points into f across this edge
      int t = m_.twin[he];
      if (t < 0) return -1;
      double lam = dot(x - A, B - A) / (L * L);
      Vec2 xg = p_.uv[TriMesh::next(t)] + lam * (p_.uv[t] - p_.uv[TriMesh::next(t)]);
      Vec2 ng = p_.is_cut(t) ? p_.transition(t).apply_dir(n) : n;
      int g = TriMesh::face_of(t);
      Vec2 qg = xg + clearance(g, xg) * ng;
      if (inside(g, qg)) return cell_of(g, qg);
    }
    return -1;
  }

  struct Incidence {
    int face;
    Vec2 x;
    Vec2 start;   // first ray
    double span;  // angular extent of the face at x
  };

  std::vector<Incidence> incidences(const SurfaceKey& k) {
    std::vector<Incidence> out;
    if (k.kind == SurfaceKey::Vertex) {
      for (int h : m_.outgoing(k.id)) {
        Vec2 x = p_.uv[h];
        Vec2 a = p_.uv[TriMesh::next(h)] - x, b = p_.uv[TriMesh::prev(h)] - x;
        out.push_back({TriMesh::face_of(h), x, a, std::atan2(cross(a, b), dot(a, b))});
      }
    } else if (k.kind == SurfaceKey::Edge) {
      int h0 = m_.edge_halfedge[k.id];
      double L = norm(p_.uv[TriMesh::next(h0)] - p_.uv[h0]);
      double lam = k.a / L;
      for (int h : {h0, m_.twin[h0]}) {
        if (h < 0) continue;
        double l = h == h0 ? lam : 1 - lam;
        Vec2 A = p_.uv[h], B = p_.uv[TriMesh::next(h)];
        out.push_back({TriMesh::face_of(h), A + l * (B - A), B - A, kPi});
      }
    } else {
      out.push_back({k.id, Vec2{k.a, k.b}, Vec2{}, 2 * kPi});
    }
    return out;
  }

  void make_patches() {
    // Glue cells across edge intervals not blocked by a curve.
    std::map<int, std::vector<std::pair<double, double>>> barrier;
    std::map<int, std::vector<double>> breaks;
    for (const auto& s : segs_)
      if (s.along_edge >= 0) {
        int h = m_.edge_halfedge[s.along_edge];
        double L = norm(p_.uv[TriMesh::next(h)] - p_.uv[h]);
        auto coord = [&](Vec2 x) {
          SurfaceKey k = surface_key(p_, s.face, x, tol_);
          if (k.kind == SurfaceKey::Edge) return k.a;
          return k.id == m_.origin(h) ? 0.0 : L;
        };
        double a = coord(s.a), b = coord(s.b);
        barrier[s.along_edge].push_back({std::min(a, b), std::max(a, b)});
      }
    for (int i = 0; i < keys_.size(); ++i)
      if (keys_[i].kind == SurfaceKey::Edge) breaks[keys_[i].id].push_back(keys_[i].a);
    for (int e = 0; e < m_.num_edges(); ++e) {
      int h0 = m_.edge_halfedge[e], t = m_.twin[h0];
      Vec2 A = p_.uv[h0], B = p_.uv[TriMesh::next(h0)];
      double L = norm(B - A);
      std::vector<double> bs = breaks[e];
      bs.push_back(0);
      bs.push_back(L);
      for (auto [a, b] : barrier[e]) {
        bs.push_back(a);
        bs.push_back(b);
      }
      std::sort(bs.begin(), bs.end());
      for (size_t i = 0; i + 1 < bs.size(); ++i) {
        if (bs[i + 1] - bs[i] <= tol_) continue;
        double mid = 0.5 * (bs[i] + bs[i + 1]);
        bool blocked = false;
        for (auto [a, b] : barrier[e]) blocked = blocked || (mid > a && mid < b);
        double lam = mid / L;
        int c0 = cell_of(TriMesh::face_of(h0), A + lam * (B - A));
        if (t < 0 || blocked) continue;
        Vec2 At = p_.uv[t], Bt = p_.uv[TriMesh::next(t)];
        int c1 = cell_of(TriMesh::face_of(t), At + (1 - lam) * (Bt - At));
        dsu_.unite(c0, c1);
      }
    }

    // Corner angles of every patch at every node.
    std::vector<std::tuple<int, int, double>> sectors;  // cell, node, angle
    for (int n = 0; n < static_cast<int>(nodes_.size()); ++n) {
      for (const Incidence& inc : incidences(nodes_[n].key)) {
        std::vector<Vec2> rays;
        for (const auto& s : segs_) {
          if (s.face != inc.face || s.along_edge >= 0) continue;
          if (std::fabs(inc.x[s.axis] - s.value) > tol_) continue;
          int k = 1 - s.axis;
          double lo = std::min(s.a[k], s.b[k]), hi = std::max(s.a[k], s.b[k]);
          if (inc.x[k] < lo - tol_ || inc.x[k] > hi + tol_) continue;
          Vec2 up{0, 0};
          up[k] = 1;
          if (hi - inc.x[k] > tol_) rays.push_back(up);
          if (inc.x[k] - lo > tol_) rays.push_back(-up);
        }
        Vec2 start = inc.start;
        if (inc.span > 1.5 * kPi) {
          if (rays.empty()) continue;
          start = rays.front();
        }
        std::vector<double> th{0, inc.span};
        for (Vec2 r : rays) {
          double a = std::atan2(cross(start, r), dot(start, r));
          if (inc.span > 1.5 * kPi && a < 0) a += 2 * kPi;
          if (a > 1e-9 && a < inc.span - 1e-9) th.push_back(a);
        }
        std::sort(th.begin(), th.end());
        th.erase(std::unique(th.begin(), th.end(), [](double x, double y) { return std::fabs(x - y) <= 1e-9; }),
                 th.end());
        double delta = clearance(inc.face, inc.x);
        double s0 = std::atan2(start.y, start.x);
        for (size_t i = 0; i + 1 < th.size(); ++i) {
          double mid = s0 + 0.5 * (th[i] + th[i + 1]);
          Vec2 q = inc.x + delta * Vec2{std::cos(mid), std::sin(mid)};
          sectors.emplace_back(cell_of(inc.face, q), n, th[i + 1] - th[i]);
        }
      }
    }

    // Sides of every arc.
    std::vector<std::pair<int, int>> sides(arcs_.size(), {-1, -1});
    for (size_t a = 0; a < arcs_.size(); ++a) {
      const auto& pcs = arcs_[a].pieces;
      const ArcPiece& pc = pcs[pcs.size() / 2];
      Vec2 d = pc.b - pc.a;
      d = (1.0 / norm(d)) * d;
      Vec2 mid = 0.5 * (pc.a + pc.b);
      sides[a] = {cell_near(pc.face, mid, rot90(d, 1)), cell_near(pc.face, mid, rot90(d, 3))};
    }

    // Number patches by their smallest cell.
    std::map<int, int> patch_of_root;
    for (int c = 0; c < static_cast<int>(cell_face_.size()); ++c) {
      int r = dsu_.find(c);
      if (!patch_of_root.count(r)) {
        int id = static_cast<int>(patch_of_root.size());
        patch_of_root[r] = id;
      }
    }
    patches_.assign(patch_of_root.size(), {});
    auto patch = [&](int cell) { return cell < 0 ? -1 : patch_of_root.at(dsu_.find(cell)); };
    std::vector<std::set<int>> faces(patches_.size());
    for (int c = 0; c < static_cast<int>(cell_face_.size()); ++c) faces[patch(c)].insert(cell_face_[c]);
    for (size_t i = 0; i < patches_.size(); ++i) patches_[i].faces.assign(faces[i].begin(), faces[i].end());

    std::map<std::pair<int, int>, double> angle;
    for (auto [cell, n, a] : sectors) angle[{patch(cell), n}] += a;
    for (auto [pn, a] : angle) {
      double q = a / kHalfPi;
      long k = std::lround(q);
      if (std::fabs(q - k) > 1e-6)
        throw Error(Errc::NonQuadPatch, "patch " + std::to_string(pn.first) + " has a corner of angle " +
                                            std::to_string(a) + " at node " + std::to_string(pn.second));
      for (long i = 0; i < k; ++i) patches_[pn.first].corners.push_back(pn.second);
      patches_[pn.first].corner_count += static_cast<int>(k);
    }
    for (size_t a = 0; a < arcs_.size(); ++a) {
      arcs_[a].left = patch(sides[a].first);
      arcs_[a].right = patch(sides[a].second);
    }
    for (size_t i = 0; i < patches_.size(); ++i) {
      patches_[i].arcs = chain_arcs(static_cast<int>(i));
      if (patches_[i].corner_count != 4)
        throw Error(Errc::NonQuadPatch, "patch " + std::to_string(i) + " has " +
                                            std::to_string(patches_[i].corner_count) + " corners");
    }
  }

  // Boundary arcs of a patch, chained end to end where possible.
  std::vector<int> chain_arcs(int pi) const {
    std::vector<std::pair<int, int>> sides;  // arc, +1 if the patch is on its left
    for (int a = 0; a < static_cast<int>(arcs_.size()); ++a) {
      if (arcs_[a].left == pi) sides.push_back({a, 1});
      if (arcs_[a].right == pi) sides.push_back({a, -1});
    }
    std::vector<int> out;
    std::vector<char> used(sides.size(), 0);
    for (size_t s = 0; s < sides.size(); ++s) {
      if (used[s]) continue;
      size_t cur = s;
      while (true) {
        used[cur] = 1;
        auto [a, o] = sides[cur];
        out.push_back(a);
        int end = o > 0 ? arcs_[a].to : arcs_[a].from;
        size_t nxt = sides.size();
        for (size_t t = 0; t < sides.size() && nxt == sides.size(); ++t) {
          if (used[t]) continue;
          auto [b, ob] = sides[t];
          int start = ob > 0 ? arcs_[b].from : arcs_[b].to;
          if (start == end) nxt = t;
        }
        if (nxt == sides.size()) break;
        cur = nxt;
      }
    }
    return out;
  }

  const SeamlessParam& p_;
  const TriMesh& m_;
  double tol_;
  KeyStore keys_;
  std::vector<LayoutCurve> curves_;
  std::vector<RawSeg> segs_;
  std::vector<std::vector<Piece>> pieces_;
  std::vector<int> node_of_key_;
  std::vector<LayoutNode> nodes_;
  std::vector<LayoutArc> arcs_;
  std::vector<LayoutPatch> patches_;
  std::map<int, std::vector<std::pair<int, double>>> chords_;
  std::map<std::pair<int, std::string>, int> cells_;
  std::vector<int> cell_face_;
  Dsu dsu_;
};

}  // namespace

QuadLayout extract_layout(const SeamlessParam& p, int budget) {
  SeparatrixSet s = emit_separatrices(p, budget);
  Arrangement arr(p, s.curves);
  QuadLayout L = arr.build();
  L.emitted = s.emitted;
  return L;
}

namespace {

bool on_grid(double x, double step) { return std::fabs(x / step - std::round(x / step)) <= 1e-9; }

bool in_closed_face(const SeamlessParam& p, int f, Vec2 x) {
  SurfacePoint s = surface_point_at(p, f, x);
  return s.bary[0] >= -1e-9 && s.bary[1] >= -1e-9 && s.bary[2] >= -1e-9;
}

}  // namespace

OracleResult layout_oracle_bruteforce(const SeamlessParam& p, double step) {
  if (!(step > 0)) throw Error(Errc::InvalidArgument, "oracle step must be positive");
  for (size_t h = 0; h < p.uv.size(); ++h)
    if (!on_grid(p.uv[h].x, step) || !on_grid(p.uv[h].y, step))
      throw Error(Errc::NotGridAligned, "corner " + std::to_string(h) + " is off the grid");
  for (const auto& s : p.seams)
    if (!on_grid(s.T.t.x, step) || !on_grid(s.T.t.y, step))
      throw Error(Errc::NotGridAligned, "seam translation on halfedge " + std::to_string(s.halfedge) + " is off the grid");
  const double tol = weld_tol(p);
  KeyStore V(tol), E(tol), F(tol);
  std::set<std::pair<int, int>> incident;  // (vertex, edge)
  for (int f = 0; f < p.mesh.num_faces(); ++f) {
    Vec2 lo = p.uv[3 * f], hi = p.uv[3 * f];
    for (int i = 1; i < 3; ++i) {
      Vec2 q = p.uv[3 * f + i];
      lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
      hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
    }
    long i0 = std::lround(lo.x / step), i1 = std::lround(hi.x / step);
    long j0 = std::lround(lo.y / step), j1 = std::lround(hi.y / step);
    for (long i = i0; i <= i1; ++i)
      for (long j = j0; j <= j1; ++j) {
        Vec2 P{i * step, j * step};
        if (in_closed_face(p, f, P)) V.insert(surface_key(p, f, P, tol));
        for (Vec2 half : {Vec2{0.5 * step, 0}, Vec2{0, 0.5 * step}}) {
          Vec2 M = P + half;
          if (!in_closed_face(p, f, M)) continue;
          int e = E.insert(surface_key(p, f, M, tol));
          for (Vec2 end : {M - half, M + half}) {
            if (!in_closed_face(p, f, end)) continue;
            int v = V.insert(surface_key(p, f, end, tol));
            incident.insert({v, e});
          }
        }
        Vec2 C = P + Vec2{0.5 * step, 0.5 * step};
        if (in_closed_face(p, f, C)) F.insert(surface_key(p, f, C, tol));
      }
  }
  OracleResult r;
  r.V = V.size();
  r.E = E.size();
  r.F = F.size();
  std::vector<int> val(r.V, 0);
  for (auto [v, e] : incident) ++val[v];
  for (int v = 0; v < r.V; ++v) {
    ++r.valence[val[v]];
    r.vertices.push_back(V[v]);
  }
  return r;
}

CoarseningCheck verify_coarsening(const SeamlessParam& p, const QuadLayout& L, const OracleResult& o, double step) {
  CoarseningCheck c;
  const double tol = weld_tol(p);
  for (size_t n = 0; n < L.nodes.size(); ++n) {
    bool found = false;
    for (const auto& k : o.vertices) found = found || same_key(k, L.nodes[n].key, tol);
    if (!found) {
      c.ok = false;
      c.reason = "layout node " + std::to_string(n) + " is not an oracle vertex";
      return c;
    }
  }
  for (size_t a = 0; a < L.arcs.size(); ++a) {
    const auto& arc = L.arcs[a];
    for (const auto& pc : arc.pieces) {
      int axis = std::fabs(pc.b.x - pc.a.x) <= tol ? 0 : 1;
      if (!on_grid(pc.a[axis], step)) {
        c.ok = false;
        c.reason = "arc " + std::to_string(a) + " runs off the grid lines";
        return c;
      }
    }
    if (!on_grid(arc.length, step)) {
      c.ok = false;
      c.reason = "arc " + std::to_string(a) + " has non-integer length";
      return c;
    }
  }
  return c;
}

}  // namespace qli
