#pragma once

#include <string>
#include <vector>

#include "qli/immersion.hpp"

namespace qli {

// Axis U: the line keeps u constant and moves along v. Axis V: the reverse.
enum class Axis { U = 0, V = 1 };
const char* axis_name(Axis a);

enum class EndKind { None, HitSingularity, HitBoundaryTransverse, HitSeam, RunsAlongBoundary };
const char* end_kind_name(EndKind k);

struct EndEvent {
  EndKind kind = EndKind::None;
  int halfedge = -1;  // seam or boundary halfedge crossed, if any
  int vertex = -1;    // vertex reached, if any
  Vec2 uv;            // in the chart of the last segment
};

struct TraceSegment {
  int face = -1;
  Vec2 a, b;  // UV in the face's chart
  SurfacePoint pa, pb;
  bool along_boundary = false;
};

struct CoordinateLine {
  Axis axis = Axis::U;
  double value = 0;
  int direction = 1;  // sign of motion along the free coordinate
  std::vector<TraceSegment> segments;
  EndEvent end;
};

struct Continuation {
  int halfedge = -1;  // cut halfedge entered
  SeamTransition T;
  Axis axis = Axis::U;
  double value = 0;
  int direction = 1;
  Vec2 point;
  bool at_vertex = false;
};

struct ContinuationResult {
  Axis axis;
  double value;
  int direction;
  Vec2 point;
};
ContinuationResult continue_across_seam(const SeamTransition& T, Axis axis, double value, int direction, Vec2 point);

enum class CurveStatus { Finite, Periodic, ClosedLoop, BudgetExceeded };
const char* curve_status_name(CurveStatus s);

struct QuotientCurve {
  std::vector<CoordinateLine> pieces;
  std::vector<Continuation> continuations;
  CurveStatus status = CurveStatus::Finite;
  EndEvent end;             // terminal event for finite curves
  int period_start = -1;    // continuation index where the repeating state was first seen
  int period_length = 0;    // continuations per period
  int segments_used = 0;
  int budget = 0;
  int repeated_states = 0;  // (halfedge, axis, value) repeats seen; 0 unless periodic
  int node_crossings = 0;   // passes through non-cone cut-graph nodes
  int start_vertex = -1;    // set for separatrices

  int crossings() const { return static_cast<int>(continuations.size()); }
};

// Default budget: 64 segments per face.
int default_budget(const SeamlessParam& p);

// Throws StartOnSingularity when start sits on a cone vertex.
CoordinateLine trace_coordinate_line(const SeamlessParam& p, const SurfacePoint& start, Axis axis, int direction);
QuotientCurve trace_quotient_curve(const SeamlessParam& p, const SurfacePoint& start, Axis axis, int direction = 1,
                                   int budget = -1);

// An outgoing axis direction at a vertex, in the chart of the face holding the wedge.
struct SeparatrixStart {
  int vertex = -1;
  int corner = -1;  // halfedge of the wedge's face with origin at the vertex
  Axis axis = Axis::U;
  int direction = 1;
};
// m directions for interior cones; m - 1 interior directions for boundary cones.
std::vector<SeparatrixStart> separatrix_starts(const SeamlessParam& p, int vertex);
QuotientCurve trace_separatrix(const SeamlessParam& p, const SeparatrixStart& s, int budget = -1);

// Base point for cone-free surfaces: the +u and +v directions at the lowest interior vertex.
// Empty when the surface has no interior vertex.
std::vector<SeparatrixStart> base_point_starts(const SeamlessParam& p);

struct Q5Trace {
  SeparatrixStart start;  // vertex -1 for face-centroid traces
  SurfacePoint base;
  QuotientCurve curve;
};

struct Q5Report {
  bool pass = true;
  bool evaluated = true;                // false when skipped because Q1-Q4 failed
  bool cone_mode = true;                // false: singularity-free torus or annulus
  bool terminated_prematurely = false;  // some trace ran out of budget
  int budget = 0;
  std::vector<Q5Trace> traces;
  std::vector<Violation> violations;
};

Q5Report validate_q5(const SeamlessParam& p, int budget = -1);

// UV of a surface point in its face's chart.
Vec2 surface_uv(const SeamlessParam& p, const SurfacePoint& s);
SurfacePoint surface_point_at(const SeamlessParam& p, int face, Vec2 uv);

}  // namespace qli
