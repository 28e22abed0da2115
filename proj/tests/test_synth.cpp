#include <doctest.h>

#include <algorithm>

#include "qli/io.hpp"
#include "qli/synth.hpp"

using namespace qli;

namespace {

std::vector<std::string> failed_after(const SeamlessParam& p, PerturbKind k) {
  return validate_immersion(perturb(p, k)).failed();
}

}  // namespace

TEST_CASE("single quad realizes a unit square") {
  AbstractQuadComplex c;
  c.num_vertices = 4;
  c.quads = {{0, 1, 2, 3}};
  auto p = realize(c);
  CHECK(p.seams.empty());
  CHECK(p.mesh.num_faces() == 2);
  auto cones = detect_cones(p);
  CHECK(cones.size() == 4);
  for (const auto& k : cones) {
    CHECK(k.boundary);
    CHECK(k.m == 1);
  }
  CHECK(validate_immersion(p).pass());
}

TEST_CASE("closed grid realizes a translation torus") {
  auto p = flat_torus(4, 3);
  CHECK(!p.seams.empty());
  for (const auto& s : p.seams) {
    CHECK(s.T.j == 0);
    CHECK(std::fabs(s.T.t.x / 4 - std::round(s.T.t.x / 4)) < 1e-12);
    CHECK(std::fabs(s.T.t.y / 3 - std::round(s.T.t.y / 3)) < 1e-12);
  }
  CHECK(detect_cones(p).empty());
  CHECK(topology_info(p.mesh).genus == 1);
}

TEST_CASE("complex checks") {
  auto info = check_complex(annulus_35_complex());
  CHECK(info.euler == 0);
  auto irr = info.irregular();
  CHECK(irr.size() == 2);
  std::vector<int> vals;
  for (int v : irr) vals.push_back(info.valence[v]);
  std::sort(vals.begin(), vals.end());
  CHECK(vals == std::vector<int>{3, 5});

  auto l = check_complex(l_domain_complex());
  CHECK(l.euler == 1);
  CHECK(l_domain_complex().num_vertices == 21);
  CHECK(l_domain_complex().quads.size() == 12);

  AbstractQuadComplex bad;
  bad.num_vertices = 4;
  bad.quads = {{0, 1, 2, 3}, {0, 1, 2, 3}};
  CHECK_THROWS_AS(check_complex(bad), Error);

  AbstractQuadComplex lying = grid_complex(2, 2);
  lying.declared_euler = 0;
  CHECK_THROWS_AS(check_complex(lying), Error);

  CHECK_THROWS_AS(flat_torus_complex(2, 3), Error);
}

TEST_CASE("annulus fixture matches its complex") {
  auto fx = make_fixture("annulus_35");
  auto cones = detect_cones(fx.param);
  CHECK(cones.size() == 2);
  auto info = check_complex(fx.complex);
  for (const auto& c : cones) CHECK(info.valence[c.vertex] == c.m);
  CHECK(validate_immersion(fx.param).pass());
}

TEST_CASE("fixture names and parameters") {
  auto names = fixture_names();
  CHECK(names.size() == 5);
  for (const auto& n : names) CHECK_NOTHROW(make_fixture(n));
  CHECK_THROWS_AS(make_fixture("nope"), Error);
  CHECK_THROWS_AS(make_fixture("flat_torus", {{"w", 4.5}}), Error);
  auto r = make_fixture("rectangle", {{"a", 2.5}, {"b", 1.5}}).param;
  double maxu = 0, maxv = 0;
  for (Vec2 u : r.uv) {
    maxu = std::max(maxu, u.x);
    maxv = std::max(maxv, u.y);
  }
  CHECK(maxu == doctest::Approx(2.5));
  CHECK(maxv == doctest::Approx(1.5));
}

TEST_CASE("mutations fail exactly their property") {
  using V = std::vector<std::string>;
  auto torus = flat_torus();
  auto rect = rectangle(3, 2);
  CHECK(failed_after(torus, PerturbKind::FlipFace) == V{"Q1"});
  CHECK(failed_after(rect, PerturbKind::ScaleWedge) == V{"Q2"});
  CHECK(failed_after(torus, PerturbKind::BumpRotation) == V{"Q3", "holonomy"});
  CHECK(failed_after(rect, PerturbKind::NudgeBoundary) == V{"Q4"});

  // Mutations need a target.
  CHECK_THROWS_AS(perturb(rect, PerturbKind::BumpRotation), Error);
  CHECK_THROWS_AS(perturb(torus, PerturbKind::NudgeBoundary), Error);

  // Nudge violates exactly one boundary segment.
  auto r = validate_immersion(perturb(rect, PerturbKind::NudgeBoundary));
  CHECK(r.q4.violations.size() >= 1);
}

TEST_CASE("perturbation names") {
  for (auto k : {PerturbKind::FlipFace, PerturbKind::ScaleWedge, PerturbKind::BumpRotation, PerturbKind::NudgeBoundary})
    CHECK(parse_perturb(perturb_name(k)) == k);
  CHECK_FALSE(parse_perturb("twist").has_value());
}

TEST_CASE("qlay round trip") {
  auto c = annulus_35_complex();
  auto text = write_qlay(c);
  CHECK(write_qlay(read_qlay(text)) == text);
}
