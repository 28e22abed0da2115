#include <doctest.h>

#include <sstream>

#include "qli/io.hpp"
#include "qli/report.hpp"

using namespace qli;

namespace {

Errc code_of(const std::string& text) {
  try {
    read_qlim(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::InvalidArgument;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::string join(const std::vector<std::string>& ls) {
  std::string s;
  for (const auto& l : ls) s += l + "\n";
  return s;
}

int count(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (size_t i = hay.find(needle); i != std::string::npos; i = hay.find(needle, i + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("qlim round trip is byte exact") {
  for (const auto& name : fixture_names()) {
    auto text = write_qlim(make_fixture(name).param);
    CAPTURE(name);
    CHECK(write_qlim(read_qlim(text)) == text);
  }
}

TEST_CASE("qlim preserves tables") {
  auto p = annulus_35();
  auto q = read_qlim(write_qlim(p));
  CHECK(q.mesh.faces == p.mesh.faces);
  REQUIRE(q.uv.size() == p.uv.size());
  for (size_t i = 0; i < p.uv.size(); ++i) {
    CHECK(q.uv[i].x == p.uv[i].x);
    CHECK(q.uv[i].y == p.uv[i].y);
  }
  REQUIRE(q.seams.size() == p.seams.size());
  for (size_t i = 0; i < p.seams.size(); ++i) {
    CHECK(q.seams[i].halfedge == p.seams[i].halfedge);
    CHECK(q.seams[i].T.j == p.seams[i].T.j);
    CHECK(q.seams[i].arc == p.seams[i].arc);
  }
  CHECK(q.declared_cones.size() == p.declared_cones.size());
}

TEST_CASE("qlim errors") {
  auto text = write_qlim(flat_torus());
  auto ls = lines_of(text);

  auto v = ls;
  v[0] = "qlim 2";
  CHECK(code_of(join(v)) == Errc::VersionUnsupported);

  // Drop one seam record and fix the count.
  auto s = ls;
  size_t at = 0;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i].rfind("seams ", 0) == 0) at = i;
  REQUIRE(at > 0);
  int n = std::stoi(s[at].substr(6));
  s[at] = "seams " + std::to_string(n - 1);
  s.erase(s.begin() + at + 1);
  CHECK(code_of(join(s)) == Errc::SeamTwinMismatch);

  CHECK(code_of("qlim 1\nvertices 0\nfaces 0\nuv\nseams 0\nend\n") == Errc::ParseError);
  CHECK(code_of("qlim 1\nvertices 3\n0 0 0\n1 0 0\n") == Errc::ParseError);
  CHECK(code_of("") == Errc::ParseError);

  try {
    read_qlim("qlim 1\nvertices 3\n0 0 0\n1 0\n0 1 0\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("doubles round trip at 17 digits") {
  for (double d : {0.1, 1.0 / 3, 1.4142135623730951, -2.5e-300, 0.0, 123456789.123456789})
    CHECK(std::stod(format_double(d)) == d);
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("obj import") {
  auto m = read_obj("# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 4/4\n");
  CHECK(m.num_faces() == 2);
  CHECK(m.num_vertices() == 4);
  auto n = read_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
  CHECK(n.num_faces() == 1);
}

TEST_CASE("svg rendering") {
  auto p = rectangle(3, 2);
  auto svg = export_svg(p);
  CHECK(count(svg, "<polygon") == 12);
  CHECK(count(svg, "<circle") == 4);
  CHECK(export_svg(p) == svg);

  auto a = annulus_35();
  auto L = extract_layout(a);
  auto s1 = export_svg(a, &L);
  CHECK(s1 == export_svg(a, &L));
  CHECK(count(s1, "<polygon") == a.mesh.num_faces());
  CHECK(s1.find("id=\"layout\"") != std::string::npos);
}

TEST_CASE("reports are deterministic and name failures") {
  auto p = flat_torus();
  auto v = validate_all(p);
  auto r1 = report_json(p, v);
  CHECK(r1 == report_json(p, validate_all(p)));
  CHECK(r1.find("\"schema\": \"qli-report/1\"") != std::string::npos);

  auto b = perturb(p, PerturbKind::BumpRotation);
  auto vb = validate_all(b);
  CHECK_FALSE(vb.pass());
  CHECK_FALSE(vb.q5.evaluated);
  auto failed = vb.failed();
  CHECK(std::find(failed.begin(), failed.end(), "Q3") != failed.end());
  CHECK(report_json(b, vb).find("\"Q3\"") != std::string::npos);

  auto L = extract_layout(p);
  auto lj = layout_json(p, v, L);
  CHECK(lj == layout_json(p, v, L));
  CHECK(lj.find("\"patches\": 1") != std::string::npos);
}
