#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qli/immersion.hpp"

namespace qli {

struct AbstractQuadComplex {
  int num_vertices = 0;
  std::vector<std::array<int, 4>> quads;  // counterclockwise
  std::vector<Vec3> positions;            // optional embedding, empty when absent
  std::vector<char> declared_boundary;    // optional per-vertex flags, empty when absent
  std::optional<int> declared_euler;
  std::string note;
};

struct ComplexInfo {
  std::vector<char> boundary;
  std::vector<int> valence;  // incident quads
  int num_edges = 0;
  int euler = 0;
  std::vector<int> irregular() const;
};

// Throws InvalidComplex when the complex is not an oriented manifold or contradicts its declarations.
ComplexInfo check_complex(const AbstractQuadComplex& c);

struct RealizeInfo {
  std::vector<std::pair<int, int>> tree;  // (parent quad, child quad)
  bool overlap_warning = false;
};

SeamlessParam realize(const AbstractQuadComplex& c, RealizeInfo* info = nullptr);

AbstractQuadComplex flat_torus_complex(int w, int h);
AbstractQuadComplex grid_complex(int nx, int ny);
AbstractQuadComplex l_domain_complex();
AbstractQuadComplex annulus_35_complex();

SeamlessParam flat_torus(int w = 4, int h = 3);
SeamlessParam sheared_torus(int w = 4, int h = 3, double s = 1.4142135623730951);
SeamlessParam rectangle(double a = 1.4142135623730951, double b = 1.7320508075688772);
SeamlessParam l_domain();
SeamlessParam annulus_35();

struct Fixture {
  std::string name;
  AbstractQuadComplex complex;
  SeamlessParam param;
};
// Named fixture with optional numeric parameters (w, h, s, a, b).
Fixture make_fixture(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> fixture_names();

enum class PerturbKind { FlipFace, ScaleWedge, BumpRotation, NudgeBoundary };
const char* perturb_name(PerturbKind k);
std::optional<PerturbKind> parse_perturb(const std::string& s);

struct PerturbOptions {
  double wedge_scale = 1.1;
  double nudge = -1;  // negative: a nudge just below the cone-angle tolerance
};

// Throws InvalidArgument when the fixture has no element the mutation can target.
SeamlessParam perturb(const SeamlessParam& p, PerturbKind kind, const PerturbOptions& opts = {});

// Rebuilds derived tables after raw uv or seam edits.
SeamlessParam reassemble(const SeamlessParam& p);

}  // namespace qli
