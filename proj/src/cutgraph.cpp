#include "qli/cutgraph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

#include "dsu.hpp"

namespace qli {

std::vector<char> cut_halfedge_mask(const TriMesh& m, const std::vector<int>& cut_edges) {
  std::vector<char> mask(m.num_halfedges(), 0);
  for (int e : cut_edges) {
    int h = m.edge_halfedge[e];
    mask[h] = 1;
    if (m.twin[h] >= 0) mask[m.twin[h]] = 1;
  }
  return mask;
}

std::vector<int> cut_valence(const TriMesh& m, const std::vector<int>& cut_edges) {
  std::vector<int> val(m.num_vertices(), 0);
  for (int e : cut_edges) {
    int h = m.edge_halfedge[e];
    ++val[m.origin(h)];
    ++val[m.dest(h)];
  }
  return val;
}

CutGraph make_cut_graph(const TriMesh& m, std::vector<int> cut_edges,
                        const std::vector<int>& singularities) {
  CutGraph g;
  std::sort(cut_edges.begin(), cut_edges.end());
  cut_edges.erase(std::unique(cut_edges.begin(), cut_edges.end()), cut_edges.end());
  g.cut_edges = cut_edges;
  const int nv = m.num_vertices();

  std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (edge, other vertex)
  for (int e : cut_edges) {
    int h = m.edge_halfedge[e];
    int a = m.origin(h), b = m.dest(h);
    adj[a].push_back({e, b});
    adj[b].push_back({e, a});
  }
  std::vector<char> singular(nv, 0);
  for (int s : singularities) singular[s] = 1;
  std::vector<char> is_node(nv, 0);
  for (int v = 0; v < nv; ++v) {
    int d = static_cast<int>(adj[v].size());
    if (d == 0) continue;
    if (d != 2 || singular[v] || m.is_boundary_vertex(v)) is_node[v] = 1;
  }

  std::vector<char> used(m.num_edges(), 0);
  auto walk = [&](int start, int e0, int v1) {
    GraphArc arc;
    arc.vertices = {start, v1};
    arc.edges = {e0};
    used[e0] = 1;
    int cur = v1, prev_e = e0;
    while (!is_node[cur]) {
      int ne = -1, nb = -1;
      for (auto [e, o] : adj[cur])
        if (e != prev_e) ne = e, nb = o;
      if (ne < 0 || used[ne]) break;
      used[ne] = 1;
      arc.edges.push_back(ne);
      arc.vertices.push_back(nb);
      prev_e = ne;
      cur = nb;
    }
    g.arcs.push_back(std::move(arc));
  };

  for (int v = 0; v < nv; ++v) {
    if (!is_node[v]) continue;
    for (auto [e, o] : adj[v])
      if (!used[e]) walk(v, e, o);
  }
  // Remaining edges form node-free cycles; the lowest vertex of each cycle becomes its node.
  for (int v = 0; v < nv; ++v) {
    for (auto [e, o] : adj[v]) {
      if (used[e]) continue;
      is_node[v] = 1;
      walk(v, e, o);
    }
  }
  for (int v = 0; v < nv; ++v)
    if (is_node[v]) g.nodes.push_back(v);
  g.simple = validate_cutting_graph(m, g, singularities).all();
  return g;
}

namespace {

std::vector<int> dijkstra_path(const TriMesh& m, const std::vector<int>& seeds, int target,
                               const std::vector<char>& blocked) {
  const int nv = m.num_vertices();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nv, inf);
  std::vector<int> pred(nv, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  std::vector<char> is_seed(nv, 0);
  for (int s : seeds) {
    dist[s] = 0;
    is_seed[s] = 1;
    pq.push({0.0, s});
  }
  std::vector<char> done(nv, 0);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    if (v == target) break;
    if (!is_seed[v] && blocked[v]) continue;
    for (int h : m.outgoing(v)) {
      for (int x : {h, TriMesh::prev(h)}) {
        int w = x == h ? m.dest(h) : m.origin(x);
        if (m.twin[x] < 0) continue;  // boundary edges never join the graph
        if (w != target && blocked[w]) continue;
        double nd = d + norm(m.positions[w] - m.positions[v]);
        if (nd < dist[w] || (nd == dist[w] && v < pred[w])) {
          dist[w] = nd;
          pred[w] = v;
          pq.push({nd, w});
        }
      }
    }
  }
  if (!done[target]) return {};
  std::vector<int> path{target};
  while (!is_seed[path.back()]) path.push_back(pred[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

CutGraph build_cutting_graph(const TriMesh& m, const std::vector<int>& interior_singularities) {
  std::vector<int> sing = interior_singularities;
  std::sort(sing.begin(), sing.end());
  sing.erase(std::unique(sing.begin(), sing.end()), sing.end());
  const int nv = m.num_vertices();
  std::vector<char> singular(nv, 0);
  for (int s : sing) {
    if (s < 0 || s >= nv) throw Error(Errc::InvalidArgument, "singularity index out of range");
    if (m.is_boundary_vertex(s)) throw Error(Errc::SingularityOnBoundary, "vertex " + std::to_string(s));
    singular[s] = 1;
  }
  if (connected_components(m) != 1) throw Error(Errc::DisconnectedMesh, "mesh has several components");

  // Dual spanning tree by Kruskal. The star of each singular vertex is glued up front so the
  // tree-cotree graph avoids singular vertices; they are attached by single paths below.
  detail::Dsu dsu(m.num_faces());
  std::vector<char> in_tree(m.num_edges(), 0);
  for (int s : sing)
    for (int h : m.outgoing(s)) {
      if (m.twin[h] < 0) continue;
      dsu.unite(h / 3, m.twin[h] / 3);
      in_tree[m.edge[h]] = 1;
    }
  auto offer = [&](int e) {
    int h = m.edge_halfedge[e];
    if (m.twin[h] < 0 || in_tree[e]) return;
    if (dsu.unite(h / 3, m.twin[h] / 3)) in_tree[e] = 1;
  };
  for (int e = 0; e < m.num_edges(); ++e) offer(e);

  std::vector<char> cut(m.num_edges(), 0);
  std::vector<int> val(nv, 0);
  std::vector<std::vector<int>> inc(nv);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(e) || in_tree[e]) continue;
    cut[e] = 1;
    int h = m.edge_halfedge[e];
    for (int v : {m.origin(h), m.dest(h)}) {
      ++val[v];
      inc[v].push_back(e);
    }
  }

  // Prune dangling chains at interior regular vertices.
  std::queue<int> q;
  for (int v = 0; v < nv; ++v)
    if (val[v] == 1 && !singular[v] && !m.is_boundary_vertex(v)) q.push(v);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (val[v] != 1) continue;
    for (int e : inc[v]) {
      if (!cut[e]) continue;
      cut[e] = 0;
      int h = m.edge_halfedge[e];
      int o = m.origin(h) == v ? m.dest(h) : m.origin(h);
      --val[v];
      --val[o];
      if (val[o] == 1 && !singular[o] && !m.is_boundary_vertex(o)) q.push(o);
      break;
    }
  }

  // Connect singularities that are not on the graph yet. Paths end on a regular graph vertex,
  // on the boundary, or at a regular root when a closed surface has no graph at all.
  std::vector<char> blocked(nv, 0);
  for (int v = 0; v < nv; ++v) blocked[v] = singular[v] || m.is_boundary_vertex(v);
  int root = -1;
  if (!sing.empty() && m.boundary_loops.empty() && std::all_of(val.begin(), val.end(), [](int x) { return x == 0; }))
    for (int v = 0; v < nv && root < 0; ++v)
      if (!singular[v]) root = v;
  for (int s : sing) {
    if (val[s] > 0) continue;
    std::vector<int> seeds;
    for (int v = 0; v < nv; ++v)
      if (!singular[v] && (val[v] > 0 || m.is_boundary_vertex(v) || v == root)) seeds.push_back(v);
    std::vector<int> path = dijkstra_path(m, seeds, s, blocked);
    if (path.size() < 2) {
      // Walled in by other singularities: attach to whatever the graph offers.
      seeds.clear();
      for (int v = 0; v < nv; ++v)
        if (val[v] > 0) seeds.push_back(v);
      path = dijkstra_path(m, seeds, s, blocked);
    }
    if (path.size() < 2) throw Error(Errc::DisconnectedMesh, "singularity " + std::to_string(s) + " unreachable");
    for (size_t i = 0; i + 1 < path.size(); ++i) {
      int e = m.find_edge(path[i], path[i + 1]);
      cut[e] = 1;
      ++val[path[i]];
      ++val[path[i + 1]];
    }
  }

  std::vector<int> edges;
  for (int e = 0; e < m.num_edges(); ++e)
    if (cut[e]) edges.push_back(e);
  // A closed sphere with at most one singularity still needs a slit to open into a disk.
  if (edges.empty() && m.boundary_loops.empty()) {
    int v = sing.empty() ? 0 : sing.front();
    edges.push_back(m.edge[m.vertex_halfedge[v]]);
  }
  CutGraph g = make_cut_graph(m, edges, sing);
  // Clusters of adjacent singularities can wrap a handle or fence each other in; the
  // construction has no edge-only answer then. Non-adjacent singularities always succeed.
  if (!g.simple)
    throw Error(Errc::InvalidArgument, "adjacent singularities admit no simple cutting graph on this mesh");
  return g;
}

CompletionMesh cut_mesh(const TriMesh& m, const CutGraph& g) {
  std::vector<char> is_cut = cut_halfedge_mask(m, g.cut_edges);
  const int nh = m.num_halfedges();
  detail::Dsu corners(nh);  // corner (f,i) shares the index of halfedge 3f+i
  for (int h = 0; h < nh; ++h) {
    int t = m.twin[h];
    if (t < 0 || is_cut[h] || t < h) continue;
    corners.unite(h, TriMesh::next(t));
    corners.unite(TriMesh::next(h), t);
  }
  const int nv = m.num_vertices();
  std::vector<int> first_corner(nv, -1);
  std::vector<int> class_vertex(nh, -1);
  CompletionMesh c;
  c.vertex_map.resize(nv);
  for (int v = 0; v < nv; ++v) c.vertex_map[v] = v;
  std::vector<Vec3> pos = m.positions;
  // The class holding the lowest corner of a vertex keeps the original id.
  for (int h = 0; h < nh; ++h) {
    int r = corners.find(h);
    if (class_vertex[r] >= 0) continue;
    int v = m.origin(h);
    if (first_corner[v] < 0) {
      first_corner[v] = h;
      class_vertex[r] = v;
    } else {
      class_vertex[r] = static_cast<int>(pos.size());
      pos.push_back(m.positions[v]);
      c.vertex_map.push_back(v);
    }
  }
  std::vector<std::array<int, 3>> faces(m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f)
    for (int i = 0; i < 3; ++i) faces[f][i] = class_vertex[corners.find(3 * f + i)];
  BuildOptions opts;
  opts.check_area = false;
  opts.forbid_twin = &is_cut;
  c.mesh = build_halfedge(std::move(pos), std::move(faces), opts);
  return c;
}

CutGraphReport validate_cutting_graph(const TriMesh& m, const CutGraph& g,
                                      const std::vector<int>& singularities) {
  CutGraphReport r;
  std::vector<int> val = cut_valence(m, g.cut_edges);
  r.boundary_contact_discrete = true;
  for (int e : g.cut_edges)
    if (m.is_boundary_edge(e)) r.boundary_contact_discrete = false;
  r.singularities_are_endpoints = true;
  r.boundary_singularities_excluded = true;
  for (int s : singularities) {
    if (m.is_boundary_vertex(s)) {
      if (val[s] > 0) r.boundary_singularities_excluded = false;
    } else if (val[s] != 1) {
      r.singularities_are_endpoints = false;
    }
  }
  if (!r.boundary_contact_discrete) return r;
  CompletionMesh c = cut_mesh(m, g);
  r.complement_connected = connected_components(c.mesh) == 1;
  int chi = c.mesh.num_vertices() - c.mesh.num_edges() + c.mesh.num_faces();
  r.complement_simply_connected = r.complement_connected && chi == 1 && c.mesh.boundary_loops.size() == 1;
  return r;
}

}  // namespace qli
