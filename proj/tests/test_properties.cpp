// Randomized checks of structural laws.

#include <doctest.h>

#include <random>

#include "contracts.hpp"
#include "qli/io.hpp"
#include "qli/synth.hpp"
#include "random_mesh.hpp"

using namespace qli;

TEST_CASE("halfedge structure laws on random surfaces") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    auto s = qtest::random_surface(rng, trial % 3, (trial / 3) % 3, 0);
    const auto& m = s.mesh;
    for (int h = 0; h < m.num_halfedges(); ++h) {
      int t = m.twin[h];
      if (t < 0) continue;
      CHECK(m.twin[t] == h);
      CHECK(m.origin(t) == m.dest(h));
      CHECK(m.edge[t] == m.edge[h]);
    }
    // Every corner of a vertex appears exactly once in its fan.
    std::vector<int> seen(m.num_halfedges(), 0);
    for (int v = 0; v < m.num_vertices(); ++v)
      for (int h : m.outgoing(v)) {
        CHECK(m.origin(h) == v);
        ++seen[h];
      }
    for (int n : seen) CHECK(n == 1);
    size_t loop_edges = 0;
    for (const auto& loop : m.boundary_loops) loop_edges += loop.size();
    int bnd = 0;
    for (int e = 0; e < m.num_edges(); ++e) bnd += m.is_boundary_edge(e);
    CHECK(static_cast<int>(loop_edges) == bnd);
  }
}

TEST_CASE("continuations flip the axis exactly for odd rotations") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 200; ++i) {
    SeamTransition T{i % 4, {u(rng), u(rng)}};
    Axis axis = i % 3 ? Axis::U : Axis::V;
    int dir = i % 5 < 2 ? -1 : 1;
    int ci = axis == Axis::U ? 0 : 1;
    Vec2 pt{u(rng), u(rng)};
    auto r = continue_across_seam(T, axis, pt[ci], dir, pt);
    CHECK((r.axis != axis) == (T.j % 2 == 1));
    Vec2 q = T.apply(pt);
    CHECK(norm(r.point - q) < 1e-12);
    CHECK(r.value == doctest::Approx(q[r.axis == Axis::U ? 0 : 1]));
    // Reversing through the inverse returns the original state.
    auto back = continue_across_seam(T.inverse(), r.axis, r.value, r.direction, r.point);
    CHECK(back.axis == axis);
    CHECK(back.direction == dir);
    CHECK(norm(back.point - pt) < 1e-9);
  }
}

TEST_CASE("random flat tori") {
  std::mt19937 rng(3);
  for (int i = 0; i < 4; ++i) {
    int w = std::uniform_int_distribution<int>(3, 6)(rng), h = std::uniform_int_distribution<int>(3, 6)(rng);
    auto p = flat_torus(w, h);
    CAPTURE(w);
    CAPTURE(h);
    CHECK(validate_immersion(p).pass());
    auto o = layout_oracle_bruteforce(p);
    CHECK(o.V == w * h);
    CHECK(o.E == 2 * w * h);
    CHECK(o.F == w * h);
    auto L = extract_layout(p);
    CHECK(L.nodes.size() == 1);
    CHECK(L.arcs.size() == 2);
    CHECK(L.patches.size() == 1);
    CHECK(write_qlim(read_qlim(write_qlim(p))) == write_qlim(p));
  }
}

TEST_CASE("random grid rectangles") {
  std::mt19937 rng(4);
  for (int i = 0; i < 5; ++i) {
    int nx = std::uniform_int_distribution<int>(1, 5)(rng), ny = std::uniform_int_distribution<int>(1, 5)(rng);
    auto fx = make_fixture("rectangle", {{"a", double(nx)}, {"b", double(ny)}});
    auto o = layout_oracle_bruteforce(fx.param);
    CHECK(o.V == (nx + 1) * (ny + 1));
    CHECK(o.F == nx * ny);
    auto L = extract_layout(fx.param);
    CHECK(L.patches.size() == 1);
    CHECK(verify_coarsening(fx.param, L, o).ok);
  }
}

TEST_CASE("quarter-turn re-rooting preserves outcomes") {
  std::mt19937 rng(21);
  for (const auto& p : {flat_torus(), annulus_35(), l_domain(), rectangle(), sheared_torus()}) {
    auto base = validate_immersion(p);
    for (int k = 1; k < 4; ++k) {
      auto q = qtest::rotate_charts(p, k);
      auto r = validate_immersion(q);
      CHECK(r.failed() == base.failed());
      CHECK(r.cones.size() == base.cones.size());
      for (int i = 0; i < 5; ++i) {
        SurfacePoint s{std::uniform_int_distribution<int>(0, p.mesh.num_faces() - 1)(rng), {0.2, 0.3, 0.5}};
        Axis a = i % 2 ? Axis::U : Axis::V, ra;
        int rd;
        qtest::rotate_direction(a, 1, k, ra, rd);
        auto c0 = trace_quotient_curve(p, s, a, 1, 300);
        auto c1 = trace_quotient_curve(q, s, ra, rd, 300);
        CHECK(qtest::face_sequence(c0) == qtest::face_sequence(c1));
        CHECK(c0.status == c1.status);
      }
    }
  }
}

TEST_CASE("mutations on every applicable fixture") {
  using V = std::vector<std::string>;
  const std::pair<PerturbKind, V> expect[] = {{PerturbKind::FlipFace, {"Q1"}},
                                              {PerturbKind::ScaleWedge, {"Q2"}},
                                              {PerturbKind::BumpRotation, {"Q3", "holonomy"}},
                                              {PerturbKind::NudgeBoundary, {"Q4"}}};
  for (const auto& p : {flat_torus(), rectangle(), rectangle(3, 2), l_domain(), annulus_35()}) {
    for (const auto& [kind, failed] : expect) {
      SeamlessParam q;
      try {
        q = perturb(p, kind);
      } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidArgument);
        continue;
      }
      CAPTURE(perturb_name(kind));
      CHECK(validate_immersion(q).failed() == failed);
    }
  }
}
