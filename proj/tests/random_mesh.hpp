#pragma once
// Random closed or bordered triangle meshes of prescribed genus and boundary count.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "qli/mesh.hpp"

namespace qtest {

struct RawMesh {
  std::vector<qli::Vec3> pos;
  std::vector<std::array<int, 3>> faces;
};

inline RawMesh octahedron() {
  RawMesh m;
  m.pos = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return m;
}

inline RawMesh torus(int n, int k, double shift = 0) {
  RawMesh m;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) {
      double a = 2 * qli::kPi * i / n, b = 2 * qli::kPi * j / k;
      m.pos.push_back({(2 + std::cos(b)) * std::cos(a) + shift, (2 + std::cos(b)) * std::sin(a), std::sin(b)});
    }
  auto id = [&](int i, int j) { return ((j + k) % k) * n + (i + n) % n; };
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

// Connected sum: drop face fa of a and face fb of b, then glue the two triangular holes.
inline RawMesh connected_sum(const RawMesh& a, int fa, const RawMesh& b, int fb) {
  RawMesh m = a;
  m.faces.erase(m.faces.begin() + fa);
  auto ta = a.faces[fa], tb = b.faces[fb];
  // Hole boundaries run opposite ways; pair tb reversed with ta.
  std::vector<int> map(b.pos.size(), -1);
  map[tb[0]] = ta[0];
  map[tb[2]] = ta[1];
  map[tb[1]] = ta[2];
  for (size_t v = 0; v < b.pos.size(); ++v)
    if (map[v] < 0) {
      map[v] = static_cast<int>(m.pos.size());
      m.pos.push_back(b.pos[v]);
    }
  for (size_t f = 0; f < b.faces.size(); ++f)
    if (static_cast<int>(f) != fb) m.faces.push_back({map[b.faces[f][0]], map[b.faces[f][1]], map[b.faces[f][2]]});
  return m;
}

inline void split_face(RawMesh& m, int f) {
  auto t = m.faces[f];
  qli::Vec3 c = (1.0 / 3) * (m.pos[t[0]] + m.pos[t[1]] + m.pos[t[2]]);
  int v = static_cast<int>(m.pos.size());
  m.pos.push_back(c);
  m.faces[f] = {t[0], t[1], v};
  m.faces.push_back({t[1], t[2], v});
  m.faces.push_back({t[2], t[0], v});
}

struct RandomSurface {
  qli::TriMesh mesh;
  int genus = 0, boundaries = 0;
  std::vector<int> singularities;  // interior, pairwise non-adjacent
};

// Genus 0..2, boundaries 0..2, up to max_sing interior singularities.
inline RandomSurface random_surface(std::mt19937& rng, int genus, int boundaries, int singularities) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  RawMesh m;
  if (genus == 0) {
    m = octahedron();
  } else {
    m = torus(uni(4, 6), uni(3, 5));
    if (genus == 2) {
      RawMesh b = torus(uni(4, 6), uni(3, 5), 7.0);
      m = connected_sum(m, uni(0, static_cast<int>(m.faces.size()) - 1), b,
                        uni(0, static_cast<int>(b.faces.size()) - 1));
    }
  }
  int splits = uni(2, 12);
  for (int s = 0; s < splits; ++s) split_face(m, uni(0, static_cast<int>(m.faces.size()) - 1));

  // Holes: vertex-disjoint faces, so the boundary loops stay disjoint.
  std::set<int> used;
  std::vector<int> holes;
  while (static_cast<int>(holes.size()) < boundaries) {
    int f = uni(0, static_cast<int>(m.faces.size()) - 1);
    bool clash = false;
    for (int v : m.faces[f]) clash |= used.count(v) > 0;
    if (clash) continue;
    used.insert(m.faces[f].begin(), m.faces[f].end());
    holes.push_back(f);
  }
  std::sort(holes.rbegin(), holes.rend());
  for (int f : holes) m.faces.erase(m.faces.begin() + f);

  // Random relabeling of vertices and faces, and random corner rotation.
  int n = static_cast<int>(m.pos.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<qli::Vec3> pos(n);
  for (int v = 0; v < n; ++v) pos[perm[v]] = m.pos[v];
  std::vector<std::array<int, 3>> faces;
  for (auto t : m.faces) {
    int r = uni(0, 2);
    faces.push_back({perm[t[r]], perm[t[(r + 1) % 3]], perm[t[(r + 2) % 3]]});
  }
  std::shuffle(faces.begin(), faces.end(), rng);

  RandomSurface out;
  qli::BuildOptions opts;
  opts.check_area = false;
  out.mesh = qli::build_halfedge(std::move(pos), std::move(faces), opts);
  out.genus = genus;
  out.boundaries = static_cast<int>(holes.size());
  std::vector<int> interior;
  for (int v = 0; v < out.mesh.num_vertices(); ++v)
    if (!out.mesh.is_boundary_vertex(v)) interior.push_back(v);
  std::shuffle(interior.begin(), interior.end(), rng);
  // Pairwise non-adjacent, so every singular star is bordered by regular vertices.
  std::vector<char> near(out.mesh.num_vertices(), 0);
  for (int v : interior) {
    if (static_cast<int>(out.singularities.size()) == singularities) break;
    if (near[v]) continue;
    out.singularities.push_back(v);
    near[v] = 1;
    for (int h : out.mesh.outgoing(v)) near[out.mesh.dest(h)] = 1;
  }
  std::sort(out.singularities.begin(), out.singularities.end());
  return out;
}

}  // namespace qtest
