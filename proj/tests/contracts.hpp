#pragma once
// Checks shared by unit and acceptance tests. Each returns an empty string on success.

#include <algorithm>
#include <cmath>
#include <string>

#include "qli/cutgraph.hpp"
#include "qli/report.hpp"

namespace qtest {

// The completion must be a disk and the quotient map must recover the original connectivity.
inline std::string check_cut_contract(const qli::TriMesh& m, const qli::CutGraph& g, const qli::CompletionMesh& c) {
  using std::to_string;
  int chi = c.mesh.num_vertices() - c.mesh.num_edges() + c.mesh.num_faces();
  if (chi != 1) return "completion euler " + to_string(chi);
  if (c.mesh.boundary_loops.size() != 1) return "completion has " + to_string(c.mesh.boundary_loops.size()) + " loops";
  if (c.mesh.num_faces() != m.num_faces()) return "face count changed";
  std::vector<char> cut = qli::cut_halfedge_mask(m, g.cut_edges);
  for (int f = 0; f < m.num_faces(); ++f)
    for (int i = 0; i < 3; ++i)
      if (c.vertex_map[c.mesh.faces[f][i]] != m.faces[f][i]) return "face " + to_string(f) + " not reglued";
  for (int h = 0; h < m.num_halfedges(); ++h) {
    int expect = cut[h] ? -1 : m.twin[h];
    if (c.mesh.twin[h] != expect) return "twin of halfedge " + to_string(h) + " differs";
  }
  return {};
}

// Every segment keeps its coordinate, stays inside its face and chains to the next one.
inline double straightness_residual(const qli::SeamlessParam& p, const qli::QuotientCurve& c) {
  double worst = 0;
  size_t cont = 0;
  for (size_t k = 0; k < c.pieces.size(); ++k) {
    const auto& pc = c.pieces[k];
    int ci = pc.axis == qli::Axis::U ? 0 : 1;
    for (size_t s = 0; s < pc.segments.size(); ++s) {
      const auto& seg = pc.segments[s];
      worst = std::max({worst, std::fabs(seg.a[ci] - pc.value), std::fabs(seg.b[ci] - pc.value)});
      worst = std::max(worst, qli::norm(qli::surface_uv(p, seg.pa) - seg.a));
      worst = std::max(worst, qli::norm(qli::surface_uv(p, seg.pb) - seg.b));
      // Motion along the free coordinate never reverses.
      double step = (seg.b[1 - ci] - seg.a[1 - ci]) * pc.direction;
      worst = std::max(worst, -step);
      if (s + 1 < pc.segments.size()) worst = std::max(worst, qli::norm(pc.segments[s + 1].a - seg.b));
    }
    if (pc.end.kind != qli::EndKind::HitSeam) continue;
    size_t idx = cont++;
    if (k + 1 >= c.pieces.size() || idx >= c.continuations.size()) continue;
    const auto& next = c.pieces[k + 1];
    if (pc.segments.empty() || next.segments.empty()) continue;
    worst = std::max(worst, qli::norm(c.continuations[idx].T.apply(pc.segments.back().b) - next.segments.front().a));
  }
  return worst;
}

inline std::vector<int> face_sequence(const qli::QuotientCurve& c) {
  std::vector<int> out;
  for (const auto& pc : c.pieces)
    for (const auto& s : pc.segments) out.push_back(s.face);
  return out;
}

// Rotates every chart by k quarter turns; transitions are conjugated accordingly.
inline qli::SeamlessParam rotate_charts(const qli::SeamlessParam& p, int k) {
  std::vector<qli::Vec2> uv = p.uv;
  for (auto& x : uv) x = qli::rot90(x, k);
  std::vector<qli::SeamRecord> seams = p.seams;
  for (auto& s : seams) s.T.t = qli::rot90(s.T.t, k);
  return qli::assemble_param(p.mesh, uv, seams, p.declared_cones, p.has_declared_cones);
}

inline void rotate_direction(qli::Axis axis, int dir, int k, qli::Axis& out_axis, int& out_dir) {
  qli::Vec2 e = axis == qli::Axis::U ? qli::Vec2{0, double(dir)} : qli::Vec2{double(dir), 0};
  e = qli::rot90(e, k);
  if (e.x != 0) {
    out_axis = qli::Axis::V;
    out_dir = e.x > 0 ? 1 : -1;
  } else {
    out_axis = qli::Axis::U;
    out_dir = e.y > 0 ? 1 : -1;
  }
}

// Traces forward, restarts from a later point in the opposite direction, and checks that the
// backward curve retraces the forward faces and passes through the start. Returns the UV miss
// distance at the start, or a negative value when the face sequences disagree.
inline double reversal_residual(const qli::SeamlessParam& p, const qli::SurfacePoint& start, qli::Axis axis, int dir,
                                int budget) {
  auto fwd = qli::trace_quotient_curve(p, start, axis, dir, budget);
  std::vector<std::pair<int, int>> flat;  // (piece, segment)
  for (int i = 0; i < static_cast<int>(fwd.pieces.size()); ++i)
    for (int j = 0; j < static_cast<int>(fwd.pieces[i].segments.size()); ++j) flat.push_back({i, j});
  if (flat.empty()) return -1;
  int k = static_cast<int>(flat.size()) / 2;
  const auto& piece = fwd.pieces[flat[k].first];
  const auto& seg = piece.segments[flat[k].second];
  qli::Vec2 mid = 0.5 * (seg.a + seg.b);
  qli::SurfacePoint q = qli::surface_point_at(p, seg.face, mid);
  auto bwd = qli::trace_quotient_curve(p, q, piece.axis, -piece.direction, k + 1);
  auto faces = face_sequence(bwd);
  if (static_cast<int>(faces.size()) < k + 1) return -1;
  for (int i = 0; i <= k; ++i) {
    const auto& f = flat[k - i];
    if (faces[i] != fwd.pieces[f.first].segments[f.second].face) return -1;
  }
  // Locate the backward segment covering the start point.
  int n = 0;
  for (const auto& pc : bwd.pieces)
    for (const auto& s : pc.segments) {
      if (n++ != k) continue;
      qli::Vec2 P = fwd.pieces[0].segments[0].a;
      qli::Vec2 d = s.b - s.a;
      double len2 = qli::dot(d, d);
      double t = len2 > 0 ? std::clamp(qli::dot(P - s.a, d) / len2, 0.0, 1.0) : 0.0;
      return qli::norm(s.a + t * d - P);
    }
  return -1;
}

}  // namespace qtest
