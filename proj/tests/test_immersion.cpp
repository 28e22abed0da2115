#include <doctest.h>

#include <cmath>

#include "qli/immersion.hpp"
#include "qli/synth.hpp"

using namespace qli;

namespace {

int count_m(const std::vector<ConeRecord>& cones, bool boundary, int m) {
  int n = 0;
  for (const auto& c : cones) n += c.boundary == boundary && c.m == m;
  return n;
}

std::vector<SeamlessParam> base_fixtures() {
  return {flat_torus(), rectangle(), rectangle(3, 2), l_domain(), annulus_35(), sheared_torus()};
}

}  // namespace

TEST_CASE("seam transition algebra") {
  SeamTransition T{1, {2, -1}};
  auto I = T.then(T.inverse());
  CHECK(I.j == 0);
  CHECK(norm(I.t) < 1e-15);
  Vec2 p{0.3, 0.7};
  CHECK(norm(T.inverse().apply(T.apply(p)) - p) < 1e-15);
  SeamTransition A{1, {1, 0}}, B{3, {0, 2}};
  CHECK(norm(A.then(B).apply(p) - B.apply(A.apply(p))) < 1e-15);
}

TEST_CASE("parametric angles") {
  auto rect = rectangle(3, 2);
  auto ang = measure_vertex_angles(rect);
  int interior = 0, edge = 0, corner = 0;
  for (int v = 0; v < rect.mesh.num_vertices(); ++v) {
    if (!ang[v].boundary) {
      CHECK(std::fabs(ang[v].phi - 2 * kPi) < 1e-12);
      ++interior;
    } else if (ang[v].m == 2) {
      CHECK(std::fabs(ang[v].phi - kPi) < 1e-12);
      ++edge;
    } else {
      CHECK(ang[v].m == 1);
      ++corner;
    }
  }
  CHECK(interior == 2);
  CHECK(edge == 6);
  CHECK(corner == 4);

  // The reflex corner of the L-domain gathers three quarter wedges.
  auto L = l_domain();
  int reflex = 2 * 5 + 2;
  CHECK(std::fabs(parametric_angle(L, reflex) - 3 * kPi / 2) < 1e-12);
}

TEST_CASE("cone detection on fixtures") {
  CHECK(detect_cones(flat_torus()).empty());

  auto a = detect_cones(annulus_35());
  CHECK(a.size() == 2);
  CHECK(count_m(a, false, 3) == 1);
  CHECK(count_m(a, false, 5) == 1);
  for (const auto& c : a) CHECK(std::fabs(c.angle - c.m * kHalfPi) < 1e-9);

  auto r = detect_cones(rectangle());
  CHECK(r.size() == 4);
  CHECK(count_m(r, true, 1) == 4);

  auto l = detect_cones(l_domain());
  CHECK(count_m(l, true, 1) == 5);
  CHECK(count_m(l, true, 3) == 1);
}

TEST_CASE("conical Gauss-Bonnet") {
  for (const auto& p : base_fixtures()) {
    auto topo = topology_info(p.mesh);
    CHECK(std::fabs(check_gauss_bonnet(detect_cones(p), topo)) < 1e-9);
  }
  auto p = annulus_35();
  auto cones = detect_cones(p);
  cones.erase(std::remove_if(cones.begin(), cones.end(), [](const ConeRecord& c) { return c.m == 3; }), cones.end());
  CHECK(check_gauss_bonnet(cones, topology_info(p.mesh)) == doctest::Approx(-kPi / 2).epsilon(1e-12));
}

TEST_CASE("seam transition fit") {
  auto t = flat_torus(4, 3);
  REQUIRE(!t.cut.arcs.empty());
  for (const auto& arc : t.cut.arcs) {
    auto fit = seam_transition_fit(t, arc);
    CHECK(fit.T.j == 0);
    double qx = fit.T.t.x / 4, qy = fit.T.t.y / 3;
    CHECK(std::fabs(qx - std::round(qx)) < 1e-12);
    CHECK(std::fabs(qy - std::round(qy)) < 1e-12);
    CHECK(norm(fit.T.t) > 1);
    CHECK(fit.max_deviation < 1e-12);
  }

  // The fit reproduces the rotations the synthesizer assembled, including quarter turns.
  auto a = annulus_35();
  bool saw_rotation = false;
  for (size_t i = 0; i < a.cut.arcs.size(); ++i) {
    auto fit = seam_transition_fit(a, a.cut.arcs[i]);
    int h = fit.halfedges.front();
    const auto& T = a.transition(h);
    CHECK(T.j == fit.T.j);
    CHECK(norm(T.t - fit.T.t) < 1e-9);
    saw_rotation |= fit.T.j % 2 == 1;
  }
  CHECK(saw_rotation);

  for (const auto& s : a.seams) {
    const auto& U = a.transition(a.mesh.twin[s.halfedge]);
    CHECK((s.T.j + U.j) % 4 == 0);
    CHECK(norm(rot90(s.T.t, U.j) + U.t) < 1e-12);
  }
}

TEST_CASE("vertex holonomy") {
  auto t = flat_torus();
  for (int v = 0; v < t.mesh.num_vertices(); ++v) CHECK(vertex_holonomy(t, v) == 0);
  auto bumped = perturb(t, PerturbKind::BumpRotation);
  int nonzero = 0;
  for (int v = 0; v < bumped.mesh.num_vertices(); ++v) nonzero += vertex_holonomy(bumped, v) != 0;
  CHECK(nonzero >= 1);
}

TEST_CASE("validator accepts every fixture") {
  for (const auto& p : base_fixtures()) {
    auto r = validate_immersion(p);
    CHECK(r.pass());
    CHECK(r.sigma_min > 0);
    CHECK(r.gauss_bonnet_residual < 1e-9);
  }
}

TEST_CASE("orientation flip is a Q1 failure at that face") {
  auto p = rectangle(3, 2);
  auto uv = p.uv;
  std::swap(uv[0], uv[1]);
  auto q = assemble_param(p.mesh, uv, p.seams);
  auto r = validate_immersion(q);
  CHECK_FALSE(r.q1.pass);
  bool at_face0 = false;
  for (const auto& v : r.q1.violations) at_face0 |= v.element == "face" && v.id == 0;
  CHECK(at_face0);
}

TEST_CASE("boundary nudge is a Q4 failure") {
  PerturbOptions o;
  o.nudge = 1e-3;
  auto q = perturb(rectangle(3, 2), PerturbKind::NudgeBoundary, o);
  auto r = validate_immersion(q);
  CHECK_FALSE(r.q4.pass);
  CHECK(r.q1.pass);
  CHECK(r.q3.pass);
  CHECK_FALSE(r.q4.violations.empty());
}

TEST_CASE("declared cones must match measured ones") {
  auto p = annulus_35();
  REQUIRE(p.has_declared_cones);
  CHECK(p.declared_cones.size() == 2);
}
