#include <doctest.h>

#include <random>

#include "contracts.hpp"
#include "qli/synth.hpp"
#include "qli/tracer.hpp"

using namespace qli;

namespace {

SurfacePoint centroid(int f) { return SurfacePoint{f, {1.0 / 3, 1.0 / 3, 1.0 / 3}}; }

SurfacePoint random_point(std::mt19937& rng, int faces) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  SurfacePoint s;
  s.face = std::uniform_int_distribution<int>(0, faces - 1)(rng);
  double a = u(rng), b = u(rng), c = u(rng), t = a + b + c;
  s.bary = {a / t, b / t, c / t};
  return s;
}

}  // namespace

TEST_CASE("continuation across a seam") {
  auto r = continue_across_seam({0, {4, 0}}, Axis::U, 0.3, 1, {0.3, 0.5});
  CHECK(r.axis == Axis::U);
  CHECK(r.value == doctest::Approx(4.3));

  double c = 0.25, y = 0.6;
  r = continue_across_seam({1, {0, 0}}, Axis::U, c, 1, {c, y});
  CHECK(r.axis == Axis::V);
  CHECK(r.point.x == doctest::Approx(-y));
  CHECK(r.point.y == doctest::Approx(c));
  CHECK(r.value == doctest::Approx(c));

  SeamTransition q{1, {0.5, -1}};
  auto twice = continue_across_seam(q, Axis::V, 0.2, -1, {0.7, 0.2});
  twice = continue_across_seam(q, twice.axis, twice.value, twice.direction, twice.point);
  auto once = continue_across_seam(q.then(q), Axis::V, 0.2, -1, {0.7, 0.2});
  CHECK(once.axis == twice.axis);
  CHECK(once.direction == twice.direction);
  CHECK(once.value == doctest::Approx(twice.value));
  CHECK(norm(once.point - twice.point) < 1e-12);
}

TEST_CASE("coordinate line in a single chart") {
  auto p = rectangle(1, 1);
  auto line = trace_coordinate_line(p, centroid(0), Axis::U, 1);
  CHECK(line.end.kind == EndKind::HitBoundaryTransverse);
  REQUIRE(!line.segments.empty());
  for (const auto& s : line.segments) {
    CHECK(s.a.x == doctest::Approx(line.value));
    CHECK(s.b.x == doctest::Approx(line.value));
    CHECK(s.b.y >= s.a.y);
  }
  CHECK(line.segments.back().b.y == doctest::Approx(1.0));

  auto t = flat_torus();
  auto tl = trace_coordinate_line(t, centroid(5), Axis::V, -1);
  CHECK(tl.end.kind == EndKind::HitSeam);
  CHECK(t.is_cut(t.mesh.twin[tl.end.halfedge]));
}

TEST_CASE("starting on a cone is rejected") {
  auto p = annulus_35();
  auto cones = detect_cones(p);
  REQUIRE(!cones.empty());
  int v = cones[0].vertex;
  int h = p.mesh.outgoing(v).front();
  SurfacePoint s{TriMesh::face_of(h), {0, 0, 0}};
  s.bary[h % 3] = 1;
  CHECK_THROWS_AS(trace_coordinate_line(p, s, Axis::U, 1), Error);
}

TEST_CASE("flat torus lines are periodic with the torus period") {
  auto p = flat_torus(4, 3);
  for (Axis axis : {Axis::U, Axis::V}) {
    auto c = trace_quotient_curve(p, centroid(0), axis, 1);
    CHECK(c.status == CurveStatus::Periodic);
    CHECK(c.period_length >= 1);
    // Distance covered over one period.
    double len = 0;
    for (int k = c.period_start + 1; k <= c.period_start + c.period_length; ++k)
      for (const auto& s : c.pieces[k].segments) len += norm(s.b - s.a);
    CHECK(len == doctest::Approx(axis == Axis::U ? 3.0 : 4.0));
    CHECK(qtest::straightness_residual(p, c) < 1e-9);
  }
}

TEST_CASE("sheared torus u-lines never repeat") {
  auto p = sheared_torus();
  auto c = trace_quotient_curve(p, centroid(0), Axis::U, 1, 20000);
  CHECK(c.status == CurveStatus::BudgetExceeded);
  CHECK(c.repeated_states == 0);
  CHECK(c.crossings() > 1000);
  auto v = trace_quotient_curve(p, centroid(0), Axis::V, 1);
  CHECK(v.status == CurveStatus::Periodic);
}

TEST_CASE("annulus separatrices are finite") {
  auto p = annulus_35();
  int total = 0;
  for (const auto& cone : detect_cones(p)) {
    auto starts = separatrix_starts(p, cone.vertex);
    CHECK(static_cast<int>(starts.size()) == cone.m);
    for (const auto& s : starts) {
      auto c = trace_separatrix(p, s);
      CHECK(c.status == CurveStatus::Finite);
      CHECK((c.end.kind == EndKind::HitSingularity || c.end.kind == EndKind::HitBoundaryTransverse));
      CHECK(qtest::straightness_residual(p, c) < 1e-9);
      ++total;
    }
  }
  CHECK(total == 8);
}

TEST_CASE("boundary cones emit interior directions only") {
  auto p = l_domain();
  for (const auto& cone : detect_cones(p)) {
    CHECK(cone.boundary);
    CHECK(static_cast<int>(separatrix_starts(p, cone.vertex).size()) == cone.m - 1);
  }
}

TEST_CASE("Q5 outcomes") {
  auto a = validate_q5(annulus_35());
  CHECK(a.pass);
  CHECK(a.cone_mode);
  CHECK(a.traces.size() == 8);

  auto t = validate_q5(flat_torus());
  CHECK(t.pass);
  CHECK_FALSE(t.cone_mode);

  auto s = validate_q5(sheared_torus());
  CHECK_FALSE(s.pass);
  CHECK(s.terminated_prematurely);

  // A rational shear closes up after many wraps; a starved budget fails and says so.
  auto p = sheared_torus(4, 3, 0.25);
  auto full = validate_q5(p);
  CHECK(full.pass);
  CHECK_FALSE(full.terminated_prematurely);
  auto starved = validate_q5(p, std::max(1, default_budget(p) / 100));
  CHECK_FALSE(starved.pass);
  CHECK(starved.terminated_prematurely);
}

TEST_CASE("random traces are straight and reversible") {
  std::mt19937 rng(99);
  for (const auto& p : {flat_torus(), annulus_35(), l_domain()}) {
    for (int i = 0; i < 20; ++i) {
      auto s = random_point(rng, p.mesh.num_faces());
      Axis axis = i % 2 ? Axis::U : Axis::V;
      int dir = (i / 2) % 2 ? 1 : -1;
      auto c = trace_quotient_curve(p, s, axis, dir, 200);
      CHECK(qtest::straightness_residual(p, c) < 1e-9);
      double r = qtest::reversal_residual(p, s, axis, dir, 60);
      CHECK(r >= 0);
      CHECK(r < 1e-9);
    }
  }
}
