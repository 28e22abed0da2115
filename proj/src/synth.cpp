#include "qli/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <set>

#include "dsu.hpp"
#include "fixture_data.hpp"
#include "qli/io.hpp"

namespace qli {

std::vector<int> ComplexInfo::irregular() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(valence.size()); ++v)
    if (valence[v] != (boundary[v] ? 2 : 4)) out.push_back(v);
  return out;
}

namespace {

std::uint64_t dkey(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Directed quad edge (a -> b) to (quad, position of a).
using EdgeMap = std::map<std::uint64_t, std::pair<int, int>>;

EdgeMap directed_edges(const AbstractQuadComplex& c) {
  EdgeMap em;
  for (int q = 0; q < static_cast<int>(c.quads.size()); ++q)
    for (int k = 0; k < 4; ++k) {
      int a = c.quads[q][k], b = c.quads[q][(k + 1) % 4];
      if (!em.emplace(dkey(a, b), std::make_pair(q, k)).second)
        throw Error(Errc::InvalidComplex, "directed edge repeated or orientation inconsistent at quad " + std::to_string(q));
    }
  return em;
}

}  // namespace

ComplexInfo check_complex(const AbstractQuadComplex& c) {
  ComplexInfo info;
  const int nv = c.num_vertices;
  if (nv <= 0 || c.quads.empty()) throw Error(Errc::InvalidComplex, "empty complex");
  for (int q = 0; q < static_cast<int>(c.quads.size()); ++q) {
    std::set<int> s(c.quads[q].begin(), c.quads[q].end());
    if (s.size() != 4) throw Error(Errc::InvalidComplex, "quad " + std::to_string(q) + " repeats a vertex");
    for (int v : c.quads[q])
      if (v < 0 || v >= nv) throw Error(Errc::InvalidComplex, "quad " + std::to_string(q) + " index out of range");
  }
  EdgeMap em = directed_edges(c);
  info.boundary.assign(nv, 0);
  info.valence.assign(nv, 0);
  std::set<std::pair<int, int>> undirected;
  std::map<std::pair<int, int>, int> shared;  // quad pair -> shared edge count
  for (const auto& [key, qk] : em) {
    int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    undirected.insert({std::min(a, b), std::max(a, b)});
    auto it = em.find(dkey(b, a));
    if (it == em.end()) {
      info.boundary[a] = info.boundary[b] = 1;
    } else if (qk.first < it->second.first) {
      if (++shared[{qk.first, it->second.first}] > 1)
        throw Error(Errc::InvalidComplex, "quads " + std::to_string(qk.first) + " and " +
                                              std::to_string(it->second.first) + " share two edges");
    } else if (qk.first == it->second.first) {
      throw Error(Errc::InvalidComplex, "quad " + std::to_string(qk.first) + " is glued to itself");
    }
  }
  for (const auto& q : c.quads)
    for (int v : q) ++info.valence[v];
  for (int v = 0; v < nv; ++v)
    if (info.valence[v] == 0) throw Error(Errc::InvalidComplex, "vertex " + std::to_string(v) + " is unused");
  // Each vertex star must be a single fan.
  for (int v = 0; v < nv; ++v) {
    std::map<int, int> next;  // outgoing neighbour -> next outgoing neighbour counterclockwise
    for (const auto& q : c.quads)
      for (int k = 0; k < 4; ++k)
        if (q[k] == v) next[q[(k + 1) % 4]] = q[(k + 3) % 4];
    int start = next.begin()->first;
    if (info.boundary[v]) {
      std::set<int> targets;
      for (auto [a, b] : next) targets.insert(b);
      int starts = 0;
      for (auto [a, b] : next)
        if (!targets.count(a)) start = a, ++starts;
      if (starts != 1) throw Error(Errc::InvalidComplex, "vertex " + std::to_string(v) + " is not a manifold vertex");
    }
    int count = 0, x = start;
    while (next.count(x) && count <= info.valence[v]) {
      ++count;
      x = next[x];
      if (x == start) break;
    }
    if (count != info.valence[v])
      throw Error(Errc::InvalidComplex, "vertex " + std::to_string(v) + " is not a manifold vertex");
  }
  info.num_edges = static_cast<int>(undirected.size());
  info.euler = nv - info.num_edges + static_cast<int>(c.quads.size());
  if (c.declared_euler && *c.declared_euler != info.euler)
    throw Error(Errc::InvalidComplex, "declared euler " + std::to_string(*c.declared_euler) + " but complex has " +
                                          std::to_string(info.euler));
  if (!c.declared_boundary.empty()) {
    if (static_cast<int>(c.declared_boundary.size()) != nv) throw Error(Errc::InvalidComplex, "boundary flag count");
    for (int v = 0; v < nv; ++v)
      if ((c.declared_boundary[v] != 0) != (info.boundary[v] != 0))
        throw Error(Errc::InvalidComplex, "vertex " + std::to_string(v) + " boundary flag disagrees");
  }
  if (!c.positions.empty() && static_cast<int>(c.positions.size()) != nv)
    throw Error(Errc::InvalidComplex, "position count");
  return info;
}

namespace {

// Triangle halfedge carrying quad edge k of quad q.
int quad_edge_halfedge(int q, int k) {
  static const int local[4] = {0, 1, 4, 5};
  return 6 * q + local[k];
}

}  // namespace

SeamlessParam realize(const AbstractQuadComplex& c, RealizeInfo* info_out) {
  ComplexInfo info = check_complex(c);
  EdgeMap em = directed_edges(c);
  const int nq = static_cast<int>(c.quads.size());
  const int nv = c.num_vertices;

  std::vector<std::vector<std::pair<int, int>>> nbr(nq);  // (neighbour, my edge index)
  for (int q = 0; q < nq; ++q)
    for (int k = 0; k < 4; ++k) {
      auto it = em.find(dkey(c.quads[q][(k + 1) % 4], c.quads[q][k]));
      if (it != em.end()) nbr[q].push_back({it->second.first, k});
    }
  for (auto& n : nbr) std::sort(n.begin(), n.end());

  // Breadth-first unit-square layout.
  std::vector<std::array<Vec2, 4>> pos(nq);
  std::vector<char> placed(nq, 0);
  std::set<std::pair<int, int>> tree;
  RealizeInfo info_local;
  pos[0] = {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
  placed[0] = 1;
  std::queue<int> bfs;
  bfs.push(0);
  while (!bfs.empty()) {
    int q = bfs.front();
    bfs.pop();
    for (auto [r, k] : nbr[q]) {
      if (placed[r]) continue;
      int a = c.quads[q][k], b = c.quads[q][(k + 1) % 4];
      int kr = em.at(dkey(b, a)).second;  // r has b at kr, a at kr+1
      Vec2 P = pos[q][(k + 1) % 4], d = pos[q][k] - P;
      pos[r][kr] = P;
      pos[r][(kr + 1) % 4] = P + d;
      pos[r][(kr + 2) % 4] = P + d + rot90(d, 1);
      pos[r][(kr + 3) % 4] = P + rot90(d, 1);
      placed[r] = 1;
      tree.insert({std::min(q, r), std::max(q, r)});
      info_local.tree.push_back({q, r});
      bfs.push(r);
    }
  }
  for (int q = 0; q < nq; ++q)
    if (!placed[q]) throw Error(Errc::InvalidComplex, "complex is disconnected");
  {
    std::set<std::pair<long, long>> cells;
    for (int q = 0; q < nq; ++q) {
      Vec2 ctr = 0.25 * (pos[q][0] + pos[q][1] + pos[q][2] + pos[q][3]);
      if (!cells.insert({std::lround(std::floor(ctr.x)), std::lround(std::floor(ctr.y))}).second)
        info_local.overlap_warning = true;
    }
  }

  std::vector<std::array<int, 3>> faces;
  std::vector<Vec2> uv;
  for (int q = 0; q < nq; ++q) {
    const auto& Q = c.quads[q];
    faces.push_back({Q[0], Q[1], Q[2]});
    faces.push_back({Q[0], Q[2], Q[3]});
    for (int i : {0, 1, 2, 0, 2, 3}) uv.push_back(pos[q][i]);
  }

  // Non-tree adjacencies are seams.
  std::map<int, SeamTransition> seam_T;
  for (int q = 0; q < nq; ++q)
    for (auto [r, k] : nbr[q]) {
      if (tree.count({std::min(q, r), std::max(q, r)})) continue;
      int a = c.quads[q][k], b = c.quads[q][(k + 1) % 4];
      int kr = em.at(dkey(b, a)).second;
      Vec2 qa = pos[q][k], qb = pos[q][(k + 1) % 4];
      Vec2 ra = pos[r][(kr + 1) % 4], rb = pos[r][kr];
      int j = 0;
      for (int t = 0; t < 4; ++t)
        if (norm(rot90(rb - ra, t) - (qb - qa)) < 1e-9) j = t;
      seam_T[quad_edge_halfedge(q, k)] = {j, qa - rot90(ra, j)};
    }

  std::vector<Vec3> xyz = c.positions;
  if (xyz.empty()) {
    xyz.assign(nv, Vec3{});
    std::vector<char> set(nv, 0);
    for (int h = 0; h < static_cast<int>(faces.size()) * 3; ++h) {
      int v = faces[h / 3][h % 3];
      if (set[v]) continue;
      set[v] = 1;
      double z = 0;
      if (!seam_T.empty()) {
        std::uint64_t x = 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(v + 1);
        x ^= x >> 31;
        z = static_cast<double>(x % 1000) / 1000.0;
      }
      xyz[v] = {uv[h].x, uv[h].y, z};
    }
  }
  TriMesh mesh = build_halfedge(xyz, faces);

  // Dangling seam chains ending at regular interior vertices carry the identity and are dropped.
  std::vector<char> cone(nv, 0);
  for (int v : info.irregular()) cone[v] = 1;
  std::vector<int> val(nv, 0);
  for (const auto& [h, T] : seam_T) ++val[mesh.origin(h)];
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = seam_T.begin(); it != seam_T.end();) {
      int h = it->first;
      int t = mesh.twin[h];
      auto tw = seam_T.find(t);
      bool is_identity = it->second.j == 0 && norm(it->second.t) < 1e-9;
      int leaf = -1;
      for (int v : {mesh.origin(h), mesh.dest(h)})
        if (val[v] == 1 && !cone[v] && !mesh.is_boundary_vertex(v)) leaf = v;
      if (leaf >= 0 && is_identity && tw != seam_T.end()) {
        --val[mesh.origin(h)];
        --val[mesh.dest(h)];
        seam_T.erase(tw);
        it = seam_T.find(h);
        it = seam_T.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }

  std::vector<SeamRecord> seams;
  for (const auto& [h, T] : seam_T) seams.push_back({h, T, -1});
  std::vector<ConeRecord> declared;
  for (int v : info.irregular()) {
    int m = info.valence[v];
    double full = info.boundary[v] ? kPi : 2 * kPi;
    declared.push_back({v, info.boundary[v] != 0, m, m * kHalfPi, full - m * kHalfPi});
  }
  if (info_out) *info_out = info_local;
  return assemble_param(std::move(mesh), std::move(uv), std::move(seams), std::move(declared), true);
}

AbstractQuadComplex flat_torus_complex(int w, int h) {
  if (w < 3 || h < 3) throw Error(Errc::InvalidArgument, "torus grid needs at least 3x3 quads");
  AbstractQuadComplex c;
  c.num_vertices = w * h;
  auto id = [&](int i, int j) { return ((j % h + h) % h) * w + (i % w + w) % w; };
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) c.quads.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  const double R = 2, r = 1;
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      double th = 2 * kPi * i / w, ph = 2 * kPi * j / h;
      c.positions.push_back({(R + r * std::cos(ph)) * std::cos(th), (R + r * std::cos(ph)) * std::sin(th), r * std::sin(ph)});
    }
  c.declared_euler = 0;
  c.note = "flat torus " + std::to_string(w) + "x" + std::to_string(h);
  return c;
}

AbstractQuadComplex grid_complex(int nx, int ny) {
  if (nx < 1 || ny < 1) throw Error(Errc::InvalidArgument, "grid needs at least one quad");
  AbstractQuadComplex c;
  c.num_vertices = (nx + 1) * (ny + 1);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) c.quads.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  c.declared_euler = 1;
  c.note = "grid " + std::to_string(nx) + "x" + std::to_string(ny);
  return c;
}

AbstractQuadComplex l_domain_complex() {
  // 4x4 grid without the upper-right 2x2 block.
  auto kept_vertex = [](int i, int j) { return !(i >= 3 && j >= 3); };
  auto kept_quad = [](int i, int j) { return !(i >= 2 && j >= 2); };
  std::map<std::pair<int, int>, int> id;
  AbstractQuadComplex c;
  for (int j = 0; j <= 4; ++j)
    for (int i = 0; i <= 4; ++i)
      if (kept_vertex(i, j)) id[{i, j}] = c.num_vertices++;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i)
      if (kept_quad(i, j))
        c.quads.push_back({id.at({i, j}), id.at({i + 1, j}), id.at({i + 1, j + 1}), id.at({i, j + 1})});
  c.declared_euler = 1;
  c.note = "L-shaped domain";
  return c;
}

AbstractQuadComplex annulus_35_complex() { return read_qlay(detail::kAnnulus35Qlay); }

SeamlessParam flat_torus(int w, int h) { return realize(flat_torus_complex(w, h)); }

SeamlessParam sheared_torus(int w, int h, double s) {
  SeamlessParam p = flat_torus(w, h);
  auto shear = [&](Vec2 x) { return Vec2{x.x + x.y * s / h, x.y}; };
  for (auto& q : p.uv) q = shear(q);
  for (auto& r : p.seams) r.T.t = shear(r.T.t);
  return reassemble(p);
}

SeamlessParam rectangle(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw Error(Errc::InvalidArgument, "rectangle sides must be positive");
  int nx = std::max(1, static_cast<int>(std::lround(a)));
  int ny = std::max(1, static_cast<int>(std::lround(b)));
  SeamlessParam p = realize(grid_complex(nx, ny));
  double sx = a / nx, sy = b / ny;
  for (auto& q : p.uv) q = {q.x * sx, q.y * sy};
  for (auto& x : p.mesh.positions) x = {x.x * sx, x.y * sy, x.z};
  return reassemble(p);
}

SeamlessParam l_domain() { return realize(l_domain_complex()); }

SeamlessParam annulus_35() { return realize(annulus_35_complex()); }

std::vector<std::string> fixture_names() {
  return {"flat_torus", "sheared_torus", "rectangle", "l_domain", "annulus_35"};
}

Fixture make_fixture(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const char* k, double def) {
    auto it = params.find(k);
    return it == params.end() ? def : it->second;
  };
  auto get_int = [&](const char* k, int def) {
    double v = get(k, def);
    if (v != std::floor(v)) throw Error(Errc::InvalidArgument, std::string(k) + " must be an integer");
    return static_cast<int>(v);
  };
  Fixture f;
  f.name = name;
  if (name == "flat_torus") {
    int w = get_int("w", 4), h = get_int("h", 3);
    f.complex = flat_torus_complex(w, h);
    f.param = flat_torus(w, h);
  } else if (name == "sheared_torus") {
    int w = get_int("w", 4), h = get_int("h", 3);
    f.complex = flat_torus_complex(w, h);
    f.param = sheared_torus(w, h, get("s", 1.4142135623730951));
  } else if (name == "rectangle") {
    double a = get("a", 1.4142135623730951), b = get("b", 1.7320508075688772);
    f.complex = grid_complex(std::max(1, static_cast<int>(std::lround(a))), std::max(1, static_cast<int>(std::lround(b))));
    f.param = rectangle(a, b);
  } else if (name == "l_domain") {
    f.complex = l_domain_complex();
    f.param = l_domain();
  } else if (name == "annulus_35") {
    f.complex = annulus_35_complex();
    f.param = annulus_35();
  } else {
    throw Error(Errc::InvalidArgument, "unknown fixture '" + name + "'");
  }
  return f;
}

const char* perturb_name(PerturbKind k) {
  switch (k) {
    case PerturbKind::FlipFace: return "flip_face";
    case PerturbKind::ScaleWedge: return "scale_wedge";
    case PerturbKind::BumpRotation: return "bump_rotation";
    case PerturbKind::NudgeBoundary: return "nudge_boundary";
  }
  return "?";
}

std::optional<PerturbKind> parse_perturb(const std::string& s) {
  for (auto k : {PerturbKind::FlipFace, PerturbKind::ScaleWedge, PerturbKind::BumpRotation, PerturbKind::NudgeBoundary})
    if (s == perturb_name(k)) return k;
  return std::nullopt;
}

SeamlessParam reassemble(const SeamlessParam& p) {
  std::vector<SeamRecord> seams = p.seams;
  for (auto& s : seams) s.arc = -1;
  return assemble_param(p.mesh, p.uv, std::move(seams), p.declared_cones, p.has_declared_cones);
}

namespace {

bool face_has_cut_or_boundary(const SeamlessParam& p, int f, bool boundary_too) {
  for (int h = 3 * f; h < 3 * f + 3; ++h)
    if (p.is_cut(h) || (boundary_too && p.mesh.is_boundary_halfedge(h))) return true;
  return false;
}

SeamlessParam flip_face(const SeamlessParam& p, const std::vector<VertexAngle>& angles) {
  for (int f = 0; f < p.mesh.num_faces(); ++f) {
    if (face_has_cut_or_boundary(p, f, true)) continue;
    bool all_regular = true;
    for (int v : p.mesh.faces[f]) all_regular = all_regular && angles[v].regular;
    if (!all_regular) continue;
    // Swap the two corners with equal angles so the corner angles survive and only orientation flips.
    double ang[3];
    for (int i = 0; i < 3; ++i) ang[i] = corner_angle(p, 3 * f + i);
    for (int i = 0; i < 3; ++i) {
      int a = 3 * f + i, b = 3 * f + (i + 1) % 3;
      if (std::fabs(ang[i] - ang[(i + 1) % 3]) < 1e-12) {
        SeamlessParam q = p;
        std::swap(q.uv[a], q.uv[b]);
        return reassemble(q);
      }
    }
  }
  throw Error(Errc::InvalidArgument, "no uncut interior face with two equal corner angles");
}

SeamlessParam scale_wedge(const SeamlessParam& p, const std::vector<VertexAngle>& angles, double scale) {
  if (!(scale > 0) || scale == 1) throw Error(Errc::InvalidArgument, "wedge scale must be positive and not 1");
  std::vector<int> order;
  for (int v = 0; v < p.mesh.num_vertices(); ++v)
    if (!angles[v].regular) order.push_back(v);
  if (order.empty())
    for (int v = 0; v < p.mesh.num_vertices(); ++v) order.push_back(v);
  for (int c : order) {
    for (int h : p.mesh.outgoing(c)) {
      int f = TriMesh::face_of(h);
      if (face_has_cut_or_boundary(p, f, false)) continue;
      int hp = TriMesh::prev(h);
      bool bn = p.mesh.is_boundary_halfedge(h), bp = p.mesh.is_boundary_halfedge(hp);
      if (bn && bp) continue;
      // Slide along a boundary edge so the boundary stays straight.
      Vec2 x = bp ? p.uv[hp] : p.uv[TriMesh::next(h)];
      Vec2 c0 = p.uv[h];
      double alpha = corner_angle(p, h), target = scale * alpha;
      if (!(target < kPi)) continue;
      SeamlessParam q = p;
      auto angle_at = [&](double s) {
        q.uv[h] = c0 + s * (x - c0);
        return corner_angle(q, h);
      };
      double lo = scale > 1 ? 0.0 : -1e3, hi = scale > 1 ? 1.0 - 1e-9 : 0.0;
      if ((angle_at(lo) - target) * (angle_at(hi) - target) > 0) continue;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (angle_at(mid) < target) lo = mid; else hi = mid;
      }
      angle_at(0.5 * (lo + hi));
      return reassemble(q);
    }
  }
  throw Error(Errc::InvalidArgument, "no vertex wedge can be scaled");
}

SeamlessParam bump_rotation(const SeamlessParam& p) {
  if (p.cut.arcs.empty()) throw Error(Errc::InvalidArgument, "parametrization has no seams");
  const GraphArc& arc = p.cut.arcs[0];
  int h = p.mesh.edge_halfedge[arc.edges[0]];
  if (p.mesh.origin(h) != arc.vertices[0]) h = p.mesh.twin[h];
  SeamlessParam q = p;
  SeamTransition T = q.seams[q.seam_of[h]].T;
  T.j = (T.j + 1) % 4;
  q.seams[q.seam_of[h]].T = T;
  q.seams[q.seam_of[p.mesh.twin[h]]].T = T.inverse();
  return reassemble(q);
}

SeamlessParam nudge_boundary(const SeamlessParam& p, const std::vector<VertexAngle>& angles, double amount,
                             double angle_tol) {
  auto val = cut_valence(p.mesh, p.cut.cut_edges);
  for (int v = 0; v < p.mesh.num_vertices(); ++v) {
    if (!p.mesh.is_boundary_vertex(v) || !angles[v].regular || val[v] != 0) continue;
    int hb = p.mesh.vertex_halfedge[v];
    Vec2 d = p.uv[TriMesh::next(hb)] - p.uv[hb];
    // Incoming boundary edge: the last outgoing halfedge's previous.
    auto out = p.mesh.outgoing(v);
    int hin = TriMesh::prev(out.back());
    double len = std::min(norm(d), norm(p.uv[TriMesh::next(hin)] - p.uv[hin]));
    double delta = amount >= 0 ? amount : 0.4 * angle_tol * len;
    Vec2 n = rot90((1.0 / norm(d)) * d, 1);
    SeamlessParam q = p;
    for (int h : out) q.uv[h] = q.uv[h] + delta * n;
    return reassemble(q);
  }
  throw Error(Errc::InvalidArgument, "no regular boundary vertex off the seams");
}

}  // namespace

SeamlessParam perturb(const SeamlessParam& p, PerturbKind kind, const PerturbOptions& opts) {
  const double angle_tol = Tolerances{}.angle;
  auto angles = measure_vertex_angles(p, angle_tol);
  switch (kind) {
    case PerturbKind::FlipFace: return flip_face(p, angles);
    case PerturbKind::ScaleWedge: return scale_wedge(p, angles, opts.wedge_scale);
    case PerturbKind::BumpRotation: return bump_rotation(p);
    case PerturbKind::NudgeBoundary: return nudge_boundary(p, angles, opts.nudge, angle_tol);
  }
  throw Error(Errc::InvalidArgument, "unknown perturbation");
}

}  // namespace qli
