#include "qli/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>

namespace qli {

const char* axis_name(Axis a) { return a == Axis::U ? "u" : "v"; }

const char* end_kind_name(EndKind k) {
  switch (k) {
    case EndKind::None: return "None";
    case EndKind::HitSingularity: return "HitSingularity";
    case EndKind::HitBoundaryTransverse: return "HitBoundaryTransverse";
    case EndKind::HitSeam: return "HitSeam";
    case EndKind::RunsAlongBoundary: return "RunsAlongBoundary";
  }
  return "?";
}

const char* curve_status_name(CurveStatus s) {
  switch (s) {
    case CurveStatus::Finite: return "Finite";
    case CurveStatus::Periodic: return "Periodic";
    case CurveStatus::ClosedLoop: return "ClosedLoop";
    case CurveStatus::BudgetExceeded: return "BudgetExceeded";
  }
  return "?";
}

namespace {

constexpr double kAngEps = 1e-9;
constexpr double kValueQuantum = 1e-9;

Vec2 axis_dir(Axis a, int dir) { return a == Axis::U ? Vec2{0, double(dir)} : Vec2{double(dir), 0}; }

void dir_to_axis(Vec2 d, Axis& a, int& dir) {
  if (std::fabs(d.x) < 0.5) {
    a = Axis::U;
    dir = d.y > 0 ? 1 : -1;
  } else {
    a = Axis::V;
    dir = d.x > 0 ? 1 : -1;
  }
}

int const_index(Axis a) { return a == Axis::U ? 0 : 1; }

}  // namespace

ContinuationResult continue_across_seam(const SeamTransition& T, Axis axis, double value, int direction, Vec2 point) {
  (void)value;
  Vec2 d = T.apply_dir(axis_dir(axis, direction));
  ContinuationResult r{};
  dir_to_axis(d, r.axis, r.direction);
  r.point = T.apply(point);
  r.value = r.point[const_index(r.axis)];
  return r;
}

int default_budget(const SeamlessParam& p) { return 64 * p.mesh.num_faces(); }

Vec2 surface_uv(const SeamlessParam& p, const SurfacePoint& s) {
  int f = s.face;
  return s.bary[0] * p.uv[3 * f] + s.bary[1] * p.uv[3 * f + 1] + s.bary[2] * p.uv[3 * f + 2];
}

SurfacePoint surface_point_at(const SeamlessParam& p, int face, Vec2 q) {
  Vec2 a = p.uv[3 * face], b = p.uv[3 * face + 1], c = p.uv[3 * face + 2];
  double area = cross(b - a, c - a);
  SurfacePoint s;
  s.face = face;
  if (area == 0) return s;
  s.bary[1] = cross(q - a, c - a) / area;
  s.bary[2] = cross(b - a, q - a) / area;
  s.bary[0] = 1 - s.bary[1] - s.bary[2];
  return s;
}

namespace {

struct Exit {
  bool vertex = false;
  int local = -1;     // corner index, or edge index (halfedge 3f+local)
  double lambda = 0;  // along the edge from its origin
  Vec2 point;
};

struct FanPick {
  bool found = false;
  int corner = -1;
  SeamTransition X;  // chart of the arrival face -> chart of the picked face
  int first_cut = -1;
  bool along_boundary = false;
};

class Walker {
 public:
  Walker(const SeamlessParam& p, int budget) : p_(p), m_(p.mesh), budget_(budget < 0 ? default_budget(p) : budget) {
    angles_ = measure_vertex_angles(p);
    node_.assign(m_.num_vertices(), 0);
    for (int v : p.cut.nodes) node_[v] = 1;
    eps_ = 1e-11 * std::max(1.0, p.uv_diagonal());
  }

  bool regular(int v) const { return angles_[v].regular; }

  // Traces from (face, point, dir). closed_start enables the seam-free return check.
  QuotientCurve run(int f, Vec2 pt, Vec2 d, bool first_piece_only, bool check_closed) {
    QuotientCurve c;
    c.budget = budget_;
    pending_along_ = false;
    const int f0 = f;
    const Vec2 p0 = pt;
    Axis axis;
    int dir;
    dir_to_axis(d, axis, dir);
    Axis axis0 = axis;
    int dir0 = dir;
    double value = pt[const_index(axis)];
    new_piece(c, axis, value, dir);
    bool first = true;
    std::map<std::tuple<int, int, long long>, std::vector<int>> seen;

    auto finish_piece = [&](EndKind kind, int he, int v, Vec2 at) {
      auto& e = c.pieces.back().end;
      e.kind = kind;
      e.halfedge = he;
      e.vertex = v;
      e.uv = at;
    };
    // Returns true when the state repeats.
    auto record_continuation = [&](int key_he, int he, const SeamTransition& T, Vec2 q, bool at_vertex) {
      dir_to_axis(d, axis, dir);
      value = q[const_index(axis)];
      c.continuations.push_back({he, T, axis, value, dir, q, at_vertex});
      int idx = static_cast<int>(c.continuations.size()) - 1;
      long long qv = std::llround(value / kValueQuantum);
      for (long long k = qv - 1; k <= qv + 1; ++k) {
        auto it = seen.find({key_he, static_cast<int>(axis), k});
        if (it == seen.end()) continue;
        for (int j : it->second)
          if (std::fabs(c.continuations[j].value - value) <= kValueQuantum) {
            c.status = CurveStatus::Periodic;
            c.period_start = j;
            c.period_length = idx - j;
            c.repeated_states = 1;
            return true;
          }
      }
      seen[{key_he, static_cast<int>(axis), qv}].push_back(idx);
      return false;
    };

    while (true) {
      if (c.segments_used >= budget_) {
        c.status = CurveStatus::BudgetExceeded;
        return c;
      }
      const int cidx = const_index(axis);
      std::optional<Exit> ex = find_exit(f, pt, cidx, value, dir);
      bool along = false;
      if (!ex) {
        if (!first) throw Error(Errc::PropertyViolation, "tracer stalled in face " + std::to_string(f));
        ex = locate(f, pt);
        if (!ex) throw Error(Errc::PropertyViolation, "start direction leaves face " + std::to_string(f));
      } else {
        along = pending_along_;
        pending_along_ = false;
        if (along && !c.pieces.back().segments.empty() && !c.pieces.back().segments.back().along_boundary) {
          finish_piece(EndKind::RunsAlongBoundary, -1, -1, pt);
          if (first_piece_only) return c;
          new_piece(c, axis, value, dir);
        }
        if (check_closed && !first && f == f0 && c.continuations.empty() && axis == axis0 && dir == dir0 &&
            std::fabs(p0[cidx] - value) <= eps_) {
          int k = 1 - cidx;
          if (dir * (p0[k] - pt[k]) > -eps_ && dir * (ex->point[k] - p0[k]) > -eps_) {
            add_segment(c, f, pt, p0, false);
            c.status = CurveStatus::ClosedLoop;
            return c;
          }
        }
        add_segment(c, f, pt, ex->point, along);
      }
      first = false;

      if (!ex->vertex) {
        int he = 3 * f + ex->local;
        int t = m_.twin[he];
        if (t < 0) {
          finish_piece(EndKind::HitBoundaryTransverse, he, -1, ex->point);
          c.end = c.pieces.back().end;
          return c;
        }
        int g = TriMesh::face_of(t);
        if (p_.is_cut(t)) {
          const SeamTransition& T = p_.transition(t);
          Vec2 q = T.apply(ex->point);
          finish_piece(EndKind::HitSeam, he, -1, ex->point);
          if (first_piece_only) return c;
          d = T.apply_dir(d);
          if (record_continuation(t, t, T, q, false)) return c;
          new_piece(c, axis, value, dir);
          pt = q;
        } else {
          Vec2 a = p_.uv[TriMesh::next(t)], b = p_.uv[t];
          Vec2 q = a + ex->lambda * (b - a);
          q[cidx] = value;
          pt = q;
        }
        f = g;
        continue;
      }

      int hv = 3 * f + ex->local;
      int v = m_.origin(hv);
      if (!regular(v)) {
        finish_piece(EndKind::HitSingularity, -1, v, ex->point);
        c.end = c.pieces.back().end;
        return c;
      }
      FanPick pick = pick_in_fan(v, f, d);
      if (!pick.found) {
        finish_piece(EndKind::HitBoundaryTransverse, -1, v, ex->point);
        c.end = c.pieces.back().end;
        return c;
      }
      if (node_[v]) ++c.node_crossings;
      pending_along_ = pick.along_boundary;
      f = TriMesh::face_of(pick.corner);
      pt = p_.uv[pick.corner];
      if (pick.first_cut >= 0) {
        finish_piece(EndKind::HitSeam, pick.first_cut, v, ex->point);
        if (first_piece_only) return c;
        d = pick.X.apply_dir(d);
        if (record_continuation(m_.num_halfedges() + pick.corner, pick.first_cut, pick.X, pt, true)) return c;
        new_piece(c, axis, value, dir);
      } else {
        // Same chart; snap to the exact corner.
        value = pt[cidx];
      }
    }
  }

  FanPick pick_in_fan(int v, int f, Vec2 d) const {
    FanPick out;
    std::vector<int> fan = m_.outgoing(v);
    const int n = static_cast<int>(fan.size());
    int k0 = -1;
    for (int k = 0; k < n; ++k)
      if (TriMesh::face_of(fan[k]) == f) k0 = k;
    if (k0 < 0) return out;
    const bool bnd = m_.is_boundary_vertex(v);
    std::vector<SeamTransition> X(n);
    std::vector<int> first_cut(n, -1);
    auto step = [&](int from, int to, int cut_he) {
      X[to] = X[from];
      first_cut[to] = first_cut[from];
      if (p_.is_cut(cut_he)) {
        X[to] = X[from].then(p_.transition(cut_he));
        if (first_cut[to] < 0) first_cut[to] = cut_he;
      }
    };
    std::vector<int> order;
    if (!bnd) {
      for (int s = 1; s < n; ++s) step((k0 + s - 1) % n, (k0 + s) % n, fan[(k0 + s) % n]);
      for (int s = 0; s < n; ++s) order.push_back((k0 + s) % n);
    } else {
      for (int k = k0 + 1; k < n; ++k) step(k - 1, k, fan[k]);
      for (int k = k0 - 1; k >= 0; --k) step(k + 1, k, TriMesh::prev(fan[k]));
      for (int k = 0; k < n; ++k) order.push_back(k);
    }
    for (int k : order) {
      int h = fan[k];
      Vec2 dk = X[k].apply_dir(d);
      Vec2 a = p_.uv[TriMesh::next(h)] - p_.uv[h];
      Vec2 b = p_.uv[TriMesh::prev(h)] - p_.uv[h];
      double ang = std::atan2(cross(a, dk), dot(a, dk));
      double w = std::atan2(cross(a, b), dot(a, b));
      if (std::fabs(ang) <= kAngEps) ang = 0;
      bool last_closed = bnd && k == n - 1 && std::fabs(ang - w) <= kAngEps;
      if (ang < 0 || !(ang < w - kAngEps || last_closed)) continue;
      out.found = true;
      out.corner = h;
      out.X = X[k];
      out.first_cut = first_cut[k];
      out.along_boundary = (ang == 0 && m_.is_boundary_halfedge(h)) ||
                           (last_closed && m_.is_boundary_halfedge(TriMesh::prev(h)));
      return out;
    }
    return out;
  }

  std::vector<SeparatrixStart> starts(int v) const {
    std::vector<SeparatrixStart> out;
    std::vector<int> fan = m_.outgoing(v);
    const bool bnd = m_.is_boundary_vertex(v);
    for (int k = 0; k < static_cast<int>(fan.size()); ++k) {
      int h = fan[k];
      Vec2 a = p_.uv[TriMesh::next(h)] - p_.uv[h];
      Vec2 b = p_.uv[TriMesh::prev(h)] - p_.uv[h];
      double w = std::atan2(cross(a, b), dot(a, b));
      std::vector<std::pair<double, Vec2>> hits;
      for (int r = 0; r < 4; ++r) {
        Vec2 e = rot90(Vec2{1, 0}, r);
        double ang = std::atan2(cross(a, e), dot(a, e));
        if (std::fabs(ang) <= kAngEps) ang = 0;
        if (ang < 0 || !(ang < w - kAngEps)) continue;
        if (bnd && k == 0 && ang == 0) continue;  // along the boundary
        hits.push_back({ang, e});
      }
      std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      for (const auto& [ang, e] : hits) {
        SeparatrixStart s;
        s.vertex = v;
        s.corner = h;
        dir_to_axis(e, s.axis, s.direction);
        out.push_back(s);
      }
    }
    return out;
  }

 private:
  void new_piece(QuotientCurve& c, Axis axis, double value, int dir) const {
    CoordinateLine line;
    line.axis = axis;
    line.value = value;
    line.direction = dir;
    c.pieces.push_back(std::move(line));
  }

  void add_segment(QuotientCurve& c, int f, Vec2 a, Vec2 b, bool along) const {
    TraceSegment s;
    s.face = f;
    s.a = a;
    s.b = b;
    s.pa = surface_point_at(p_, f, a);
    s.pb = surface_point_at(p_, f, b);
    s.along_boundary = along;
    c.pieces.back().segments.push_back(s);
    ++c.segments_used;
  }

  // Far end, in the direction of travel, of the line's intersection with the closed triangle.
  std::optional<Exit> find_exit(int f, Vec2 pt, int cidx, double value, int dir) const {
    const int k = 1 - cidx;
    Vec2 A[3] = {p_.uv[3 * f], p_.uv[3 * f + 1], p_.uv[3 * f + 2]};
    double s[3];
    for (int i = 0; i < 3; ++i) {
      s[i] = A[i][cidx] - value;
      if (std::fabs(s[i]) <= eps_) s[i] = 0;
    }
    std::optional<Exit> best;
    double best_free = 0;
    auto offer = [&](Exit e) {
      double fr = dir * e.point[k];
      if (!(fr - dir * pt[k] > eps_)) return;
      if (!best || fr > best_free) {
        best = e;
        best_free = fr;
      }
    };
    for (int i = 0; i < 3; ++i) {
      if (s[i] == 0) {
        Exit e;
        e.vertex = true;
        e.local = i;
        e.point = A[i];
        offer(e);
      }
      int j = (i + 1) % 3;
      if (s[i] * s[j] < 0) {
        Exit e;
        e.local = i;
        e.lambda = s[i] / (s[i] - s[j]);
        e.point = A[i] + e.lambda * (A[j] - A[i]);
        e.point[cidx] = value;
        offer(e);
      }
    }
    return best;
  }

  // Classifies a start point sitting on a vertex or an edge of face f.
  std::optional<Exit> locate(int f, Vec2 pt) const {
    SurfacePoint sp = surface_point_at(p_, f, pt);
    for (int i = 0; i < 3; ++i)
      if (std::fabs(1 - sp.bary[i]) <= 1e-12) {
        Exit e;
        e.vertex = true;
        e.local = i;
        e.point = p_.uv[3 * f + i];
        return e;
      }
    for (int j = 0; j < 3; ++j)
      if (std::fabs(sp.bary[j]) <= 1e-12) {
        int i = (j + 1) % 3;
        Exit e;
        e.local = i;
        double bi = sp.bary[i], bn = sp.bary[(i + 1) % 3];
        e.lambda = bn / (bi + bn);
        e.point = pt;
        return e;
      }
    return std::nullopt;
  }

  const SeamlessParam& p_;
  const TriMesh& m_;
  int budget_;
  std::vector<VertexAngle> angles_;
  std::vector<char> node_;
  double eps_ = 0;
  bool pending_along_ = false;
};

void check_start(const SeamlessParam& p, const Walker& w, const SurfacePoint& start) {
  if (start.face < 0 || start.face >= p.mesh.num_faces())
    throw Error(Errc::InvalidArgument, "start face out of range");
  double sum = start.bary[0] + start.bary[1] + start.bary[2];
  for (double b : start.bary)
    if (!(b >= -1e-12) || !(b <= 1 + 1e-12)) throw Error(Errc::InvalidArgument, "barycentric coordinates out of range");
  if (std::fabs(sum - 1) > 1e-9) throw Error(Errc::InvalidArgument, "barycentric coordinates must sum to 1");
  for (int i = 0; i < 3; ++i)
    if (std::fabs(1 - start.bary[i]) <= 1e-12 && !w.regular(p.mesh.faces[start.face][i]))
      throw Error(Errc::StartOnSingularity, "start is on cone vertex " + std::to_string(p.mesh.faces[start.face][i]));
}

}  // namespace

CoordinateLine trace_coordinate_line(const SeamlessParam& p, const SurfacePoint& start, Axis axis, int direction) {
  Walker w(p, -1);
  check_start(p, w, start);
  QuotientCurve c = w.run(start.face, surface_uv(p, start), axis_dir(axis, direction >= 0 ? 1 : -1), true, false);
  return c.pieces.front();
}

QuotientCurve trace_quotient_curve(const SeamlessParam& p, const SurfacePoint& start, Axis axis, int direction,
                                   int budget) {
  Walker w(p, budget);
  check_start(p, w, start);
  return w.run(start.face, surface_uv(p, start), axis_dir(axis, direction >= 0 ? 1 : -1), false, true);
}

std::vector<SeparatrixStart> separatrix_starts(const SeamlessParam& p, int vertex) {
  Walker w(p, -1);
  return w.starts(vertex);
}

QuotientCurve trace_separatrix(const SeamlessParam& p, const SeparatrixStart& s, int budget) {
  Walker w(p, budget);
  QuotientCurve c = w.run(TriMesh::face_of(s.corner), p.uv[s.corner], axis_dir(s.axis, s.direction), false, false);
  c.start_vertex = s.vertex;
  return c;
}

std::vector<SeparatrixStart> base_point_starts(const SeamlessParam& p) {
  std::vector<SeparatrixStart> out;
  int v0 = -1;
  for (int v = 0; v < p.mesh.num_vertices() && v0 < 0; ++v)
    if (!p.mesh.is_boundary_vertex(v)) v0 = v;
  if (v0 < 0) return out;
  auto starts = separatrix_starts(p, v0);
  for (Axis a : {Axis::U, Axis::V})
    for (const auto& s : starts)
      if (s.axis == a && s.direction == 1) {
        out.push_back(s);
        break;
      }
  if (out.size() != 2) out.clear();
  return out;
}

Q5Report validate_q5(const SeamlessParam& p, int budget) {
  Q5Report r;
  Walker w(p, budget);
  r.budget = budget < 0 ? default_budget(p) : budget;
  std::vector<int> cones;
  for (int v = 0; v < p.mesh.num_vertices(); ++v)
    if (!w.regular(v)) cones.push_back(v);
  auto judge = [&](Q5Trace t, bool allow_closed) {
    const auto& c = t.curve;
    bool ok = c.status == CurveStatus::Finite ||
              (allow_closed && (c.status == CurveStatus::Periodic || c.status == CurveStatus::ClosedLoop));
    if (c.status == CurveStatus::BudgetExceeded) r.terminated_prematurely = true;
    if (!ok) {
      std::string what = std::string(axis_name(t.start.axis)) + (t.start.direction > 0 ? "+" : "-") + " curve is " +
                         curve_status_name(c.status);
      if (c.status == CurveStatus::BudgetExceeded)
        what += " after " + std::to_string(c.segments_used) + " segments and " + std::to_string(c.crossings()) +
                " seam crossings without a repeated state";
      r.violations.push_back({t.start.vertex >= 0 ? "vertex" : "face", t.start.vertex >= 0 ? t.start.vertex : t.base.face,
                              double(c.segments_used), double(r.budget), what});
      r.pass = false;
    }
    r.traces.push_back(std::move(t));
  };
  if (!cones.empty()) {
    for (int v : cones)
      for (const auto& s : w.starts(v)) {
        Q5Trace t;
        t.start = s;
        t.curve = w.run(TriMesh::face_of(s.corner), p.uv[s.corner], axis_dir(s.axis, s.direction), false, false);
        t.curve.start_vertex = v;
        judge(std::move(t), false);
      }
    return r;
  }
  r.cone_mode = false;
  TopologyInfo topo = topology_info(p.mesh);
  if (topo.euler != 0) return r;
  auto starts = base_point_starts(p);
  if (!starts.empty()) {
    for (const auto& s : starts) {
      Q5Trace t;
      t.start = s;
      int h = s.corner;
      t.base.face = TriMesh::face_of(h);
      t.base.bary = {0, 0, 0};
      t.base.bary[h % 3] = 1;
      t.curve = w.run(t.base.face, p.uv[h], axis_dir(s.axis, s.direction), false, false);
      t.curve.start_vertex = s.vertex;
      judge(std::move(t), true);
    }
    return r;
  }
  SurfacePoint base;
  base.face = 0;
  for (Axis a : {Axis::U, Axis::V}) {
    Q5Trace t;
    t.base = base;
    t.start.axis = a;
    t.start.direction = 1;
    t.curve = w.run(0, surface_uv(p, base), axis_dir(a, 1), false, true);
    judge(std::move(t), true);
  }
  return r;
}

}  // namespace qli
