#pragma once

#include <string>
#include <vector>

#include "qli/cutgraph.hpp"
#include "qli/mesh.hpp"

namespace qli {

// T(x) = R^j x + t with R the counterclockwise quarter turn.
struct SeamTransition {
  int j = 0;
  Vec2 t;

  Vec2 apply(Vec2 p) const { return rot90(p, j) + t; }
  Vec2 apply_dir(Vec2 d) const { return rot90(d, j); }
  SeamTransition inverse() const {
    int k = (4 - j) % 4;
    return {k, -rot90(t, k)};
  }
  // x -> next(this(x))
  SeamTransition then(const SeamTransition& next) const {
    return {(j + next.j) % 4, rot90(t, next.j) + next.t};
  }
};

// Transition stored on a cut halfedge h of face f: uv_f(p) = T(uv_twin(p)).
struct SeamRecord {
  int halfedge = -1;
  SeamTransition T;
  int arc = -1;
};

struct ConeRecord {
  int vertex = -1;
  bool boundary = false;
  int m = 4;
  double angle = 0;   // measured total parametric angle
  double defect = 0;  // 2pi - m pi/2 (interior) or pi - m pi/2 (boundary)
};

struct SeamlessParam {
  TriMesh mesh;
  std::vector<Vec2> uv;  // uv[3f+i] is corner i of face f
  std::vector<SeamRecord> seams;  // sorted by halfedge
  std::vector<int> seam_of;       // halfedge -> index into seams, -1 if not cut
  CutGraph cut;
  CompletionMesh completion;
  std::vector<ConeRecord> declared_cones;
  bool has_declared_cones = false;

  bool is_cut(int h) const { return seam_of[h] >= 0; }
  const SeamTransition& transition(int h) const { return seams[seam_of[h]].T; }
  double uv_diagonal() const;
};

struct Tolerances {
  double angle = 1e-6;      // cone quantization, radians
  double uv_rel = 1e-8;     // chart agreement, relative to the UV bounding-box diagonal
  double gauss_bonnet = 1e-9;
  double uv(const SeamlessParam& p) const;
};

// Builds seam lookup, cut graph (arcs, nodes) and completion from raw tables.
// Seam records with arc < 0 receive the index of their cut-graph arc.
SeamlessParam assemble_param(TriMesh mesh, std::vector<Vec2> uv, std::vector<SeamRecord> seams,
                             std::vector<ConeRecord> declared = {}, bool has_declared = false);

double corner_angle(const SeamlessParam& p, int h);  // throws ZeroAreaFace
double parametric_angle(const SeamlessParam& p, int completion_vertex);

struct VertexAngle {
  double phi = 0;
  bool boundary = false;
  int m = 0;
  bool quantized = false;
  bool regular = false;
};
std::vector<VertexAngle> measure_vertex_angles(const SeamlessParam& p, double angle_tol = 1e-6);

std::vector<ConeRecord> detect_cones(const SeamlessParam& p, double angle_tol = 1e-6);
double check_gauss_bonnet(const std::vector<ConeRecord>& cones, const TopologyInfo& topo);

struct ArcFit {
  SeamTransition T;
  std::vector<int> halfedges;     // arc-oriented halfedge per edge
  std::vector<double> deviation;  // per edge
  double max_deviation = 0;
};
// Throws NoRigidQuarterTurnFit, or InconsistentAlongArc when the fit drifts along the arc.
ArcFit seam_transition_fit(const SeamlessParam& p, const GraphArc& arc, double uv_tol = 1e-8);
ArcFit seam_transition_fit_unchecked(const SeamlessParam& p, const GraphArc& arc, double uv_tol);

int vertex_holonomy(const SeamlessParam& p, int vertex);

struct Violation {
  std::string element;
  long id = -1;
  double measured = 0;
  double expected = 0;
  std::string detail;
};

struct PropertyOutcome {
  bool pass = true;
  std::vector<Violation> violations;
  void fail(Violation v) {
    pass = false;
    violations.push_back(std::move(v));
  }
};

struct ValidationReport {
  PropertyOutcome q1, q2, q3, q4, gauss_bonnet, holonomy;
  double sigma_min = 0, sigma_max = 0;
  double gauss_bonnet_residual = 0;
  TopologyInfo topology;
  std::vector<ConeRecord> cones;  // all non-regular vertices, m rounded
  bool pass() const {
    return q1.pass && q2.pass && q3.pass && q4.pass && gauss_bonnet.pass && holonomy.pass;
  }
  std::vector<std::string> failed() const;
};

ValidationReport validate_immersion(const SeamlessParam& p, const Tolerances& tol = {});

}  // namespace qli
