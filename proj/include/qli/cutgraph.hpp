#pragma once

#include <vector>

#include "qli/mesh.hpp"

namespace qli {

// A maximal chain of cut edges between nodes. For a closed chain the first
// and last vertex coincide.
struct GraphArc {
  std::vector<int> vertices;
  std::vector<int> edges;
};

struct CutGraph {
  std::vector<int> cut_edges;  // sorted edge ids
  std::vector<int> nodes;      // sorted vertex ids
  std::vector<GraphArc> arcs;
  bool simple = false;

  bool empty() const { return cut_edges.empty(); }
};

// Derives nodes and arcs from a set of cut edges. Singular vertices on the graph are nodes.
CutGraph make_cut_graph(const TriMesh& mesh, std::vector<int> cut_edges,
                        const std::vector<int>& singularities);

// Throws InvalidArgument when adjacent singularities leave no valid edge graph.
CutGraph build_cutting_graph(const TriMesh& mesh, const std::vector<int>& interior_singularities);

struct CutGraphReport {
  bool complement_connected = false;
  bool complement_simply_connected = false;
  bool singularities_are_endpoints = false;
  bool boundary_singularities_excluded = false;
  bool boundary_contact_discrete = false;
  bool all() const {
    return complement_connected && complement_simply_connected && singularities_are_endpoints &&
           boundary_singularities_excluded && boundary_contact_discrete;
  }
};

CutGraphReport validate_cutting_graph(const TriMesh& mesh, const CutGraph& graph,
                                      const std::vector<int>& singularities);

struct CompletionMesh {
  TriMesh mesh;
  std::vector<int> vertex_map;  // completion vertex -> original vertex
  // Halfedge and face ids are shared with the original mesh.
};

CompletionMesh cut_mesh(const TriMesh& mesh, const CutGraph& graph);
std::vector<char> cut_halfedge_mask(const TriMesh& mesh, const std::vector<int>& cut_edges);
std::vector<int> cut_valence(const TriMesh& mesh, const std::vector<int>& cut_edges);

}  // namespace qli
