#pragma once

#include <map>
#include <string>
#include <vector>

#include "qli/tracer.hpp"

namespace qli {

enum class CurveRole { Separatrix, Boundary, Periodic };
const char* curve_role_name(CurveRole r);

struct LayoutCurve {
  CurveRole role = CurveRole::Separatrix;
  QuotientCurve curve;
  bool closed = false;  // boundary loops and periodic curves
};

struct SeparatrixSet {
  std::vector<LayoutCurve> curves;  // duplicates merged
  int emitted = 0;                  // cone curves before merging
  int merged = 0;
};

// Throws PropertyViolation when a separatrix is not finite.
SeparatrixSet emit_separatrices(const SeamlessParam& p, int budget = -1);

enum class NodeRole { Cone, BoundaryCone, BoundaryHit, Crossing, Anchor };
const char* node_role_name(NodeRole r);

// Canonical location on the surface: a vertex, a point on an edge, or a face point.
struct SurfaceKey {
  enum Kind { Vertex = 0, Edge = 1, Face = 2 } kind = Face;
  int id = -1;
  double a = 0, b = 0;  // edge: UV distance from the lower halfedge's origin; face: chart UV
};

struct LayoutNode {
  SurfaceKey key;
  SurfacePoint point;
  NodeRole role = NodeRole::Crossing;
  int m = 0;  // cone index for cone nodes
};

struct ArcPiece {
  int face = -1;
  Vec2 a, b;
};

struct LayoutArc {
  int from = -1, to = -1;
  CurveRole role = CurveRole::Separatrix;
  int curve = -1;
  double length = 0;  // parametric
  std::vector<ArcPiece> pieces;
  int left = -1, right = -1;  // patches; -1 outside the surface
};

struct LayoutPatch {
  std::vector<int> arcs;     // boundary arcs in chaining order
  std::vector<int> corners;  // corner nodes, one entry per corner
  std::vector<int> faces;
  int corner_count = 0;
};

struct QuadLayout {
  std::vector<LayoutNode> nodes;
  std::vector<LayoutArc> arcs;
  std::vector<LayoutPatch> patches;
  std::vector<LayoutCurve> curves;
  int euler = 0;         // V - E + F of the layout
  int surface_euler = 0;
  int node_crossings = 0;  // tracer passes through non-cone cut-graph nodes
  int emitted = 0;
};

// Throws NonQuadPatch, ArrangementDegeneracy, or PropertyViolation.
QuadLayout extract_layout(const SeamlessParam& p, int budget = -1);

struct OracleResult {
  int V = 0, E = 0, F = 0;
  std::map<int, int> valence;  // valence -> vertex count
  std::vector<SurfaceKey> vertices;
};

// Throws NotGridAligned unless corner UVs and seam translations lie on the step grid.
OracleResult layout_oracle_bruteforce(const SeamlessParam& p, double step = 1.0);

struct CoarseningCheck {
  bool ok = true;
  std::string reason;
};
CoarseningCheck verify_coarsening(const SeamlessParam& p, const QuadLayout& layout, const OracleResult& oracle,
                                  double step = 1.0);

// Canonical key of a UV point in the chart of a face.
SurfaceKey surface_key(const SeamlessParam& p, int face, Vec2 uv, double tol);
bool same_key(const SurfaceKey& x, const SurfaceKey& y, double tol);

}  // namespace qli
