#include "qli/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qli {

std::string format_double(double v) {
  if (v == 0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  // Next non-empty line split on whitespace; false at end of input.
  bool next(std::vector<std::string>& tok) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      tok.clear();
      std::istringstream ls(line);
      std::string t;
      while (ls >> t) tok.push_back(t);
      raw_ = line;
      if (!tok.empty()) return true;
    }
    return false;
  }
  std::vector<std::string> expect(const char* what) {
    std::vector<std::string> tok;
    if (!next(tok)) fail(std::string("unexpected end of input, expected ") + what);
    return tok;
  }
  [[noreturn]] void fail(const std::string& reason) const {
    throw Error(Errc::ParseError, "line " + std::to_string(line_no_) + ": " + reason);
  }
  const std::string& raw() const { return raw_; }

  double to_double(const std::string& s) const {
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) fail("bad number '" + s + "'");
    return v;
  }
  long to_int(const std::string& s) const {
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) fail("bad integer '" + s + "'");
    return v;
  }
  int count(const std::vector<std::string>& tok, const char* key) const {
    if (tok.size() != 2 || tok[0] != key) fail(std::string("expected '") + key + " <count>'");
    long n = to_int(tok[1]);
    if (n < 0 || n > 100000000) fail("bad count");
    return static_cast<int>(n);
  }
  void arity(const std::vector<std::string>& tok, size_t n) const {
    if (tok.size() != n) fail("expected " + std::to_string(n) + " fields, got " + std::to_string(tok.size()));
  }

 private:
  std::istringstream in_;
  int line_no_ = 0;
  std::string raw_;
};

void check_header(LineReader& r, const char* magic) {
  auto tok = r.expect("header");
  if (tok.size() != 2 || tok[0] != magic) r.fail(std::string("missing '") + magic + " <version>' header");
  if (tok[1] != "1") throw Error(Errc::VersionUnsupported, std::string(magic) + " version " + tok[1]);
}

}  // namespace

std::string write_qlim(const SeamlessParam& p) {
  std::ostringstream o;
  const TriMesh& m = p.mesh;
  o << "qlim 1\n";
  o << "vertices " << m.num_vertices() << "\n";
  for (const Vec3& x : m.positions)
    o << format_double(x.x) << ' ' << format_double(x.y) << ' ' << format_double(x.z) << '\n';
  o << "faces " << m.num_faces() << "\n";
  for (const auto& f : m.faces) o << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  o << "uv\n";
  for (int f = 0; f < m.num_faces(); ++f) {
    for (int i = 0; i < 3; ++i) {
      Vec2 q = p.uv[3 * f + i];
      o << (i ? " " : "") << format_double(q.x) << ' ' << format_double(q.y);
    }
    o << '\n';
  }
  o << "seams " << p.seams.size() << "\n";
  for (const auto& s : p.seams)
    o << s.halfedge / 3 << ' ' << s.halfedge % 3 << ' ' << s.T.j << ' ' << format_double(s.T.t.x) << ' '
      << format_double(s.T.t.y) << ' ' << s.arc << '\n';
  if (p.has_declared_cones) {
    o << "cones " << p.declared_cones.size() << "\n";
    for (const auto& c : p.declared_cones)
      o << c.vertex << ' ' << (c.boundary ? "boundary" : "interior") << ' ' << c.m << '\n';
  }
  o << "end\n";
  return o.str();
}

SeamlessParam read_qlim(const std::string& text) {
  LineReader r(text);
  check_header(r, "qlim");
  int nv = r.count(r.expect("vertex count"), "vertices");
  if (nv == 0) r.fail("empty vertex table");
  std::vector<Vec3> pos(nv);
  for (auto& x : pos) {
    auto t = r.expect("vertex");
    r.arity(t, 3);
    x = {r.to_double(t[0]), r.to_double(t[1]), r.to_double(t[2])};
  }
  int nf = r.count(r.expect("face count"), "faces");
  if (nf == 0) r.fail("empty face table");
  std::vector<std::array<int, 3>> faces(nf);
  for (auto& f : faces) {
    auto t = r.expect("face");
    r.arity(t, 3);
    for (int i = 0; i < 3; ++i) {
      long v = r.to_int(t[i]);
      if (v < 0 || v >= nv) r.fail("vertex index out of range");
      f[i] = static_cast<int>(v);
    }
  }
  auto t = r.expect("uv table");
  if (t.size() != 1 || t[0] != "uv") r.fail("expected 'uv'");
  std::vector<Vec2> uv(3 * static_cast<size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    t = r.expect("uv row");
    r.arity(t, 6);
    for (int i = 0; i < 3; ++i) uv[3 * f + i] = {r.to_double(t[2 * i]), r.to_double(t[2 * i + 1])};
  }
  int ns = r.count(r.expect("seam count"), "seams");
  std::vector<SeamRecord> seams(ns);
  for (auto& s : seams) {
    t = r.expect("seam");
    r.arity(t, 6);
    long f = r.to_int(t[0]), e = r.to_int(t[1]), j = r.to_int(t[2]);
    if (f < 0 || f >= nf || e < 0 || e > 2) r.fail("seam halfedge out of range");
    if (j < 0 || j > 3) r.fail("rotation index must be 0..3");
    s.halfedge = static_cast<int>(3 * f + e);
    s.T = {static_cast<int>(j), {r.to_double(t[3]), r.to_double(t[4])}};
    long arc = r.to_int(t[5]);
    if (arc < -1) r.fail("bad arc id");
    s.arc = static_cast<int>(arc);
  }
  std::vector<ConeRecord> cones;
  bool has_cones = false;
  t = r.expect("'cones' or 'end'");
  if (t[0] == "cones") {
    has_cones = true;
    int nc = r.count(t, "cones");
    for (int i = 0; i < nc; ++i) {
      auto c = r.expect("cone");
      r.arity(c, 3);
      long v = r.to_int(c[0]), m = r.to_int(c[2]);
      if (v < 0 || v >= nv) r.fail("cone vertex out of range");
      if (c[1] != "interior" && c[1] != "boundary") r.fail("cone location must be interior or boundary");
      if (m < 1) r.fail("cone index must be positive");
      bool b = c[1] == "boundary";
      double full = b ? kPi : 2 * kPi;
      cones.push_back({static_cast<int>(v), b, static_cast<int>(m), m * kHalfPi, full - m * kHalfPi});
    }
    t = r.expect("'end'");
  }
  if (t.size() != 1 || t[0] != "end") r.fail("expected 'end'");
  std::vector<std::string> extra;
  if (r.next(extra)) r.fail("content after 'end'");

  TriMesh mesh = build_halfedge(std::move(pos), std::move(faces));
  for (const auto& c : cones)
    if (c.boundary != mesh.is_boundary_vertex(c.vertex))
      throw Error(Errc::ParseError, "cone at vertex " + std::to_string(c.vertex) + " has the wrong location");
  for (const auto& s : seams) {
    int tw = mesh.twin[s.halfedge];
    if (tw < 0) throw Error(Errc::SeamTwinMismatch, "seam on boundary halfedge " + std::to_string(s.halfedge));
  }
  // Each pair must hold mutually inverse transitions.
  std::vector<int> at(mesh.num_halfedges(), -1);
  for (int i = 0; i < ns; ++i) at[seams[i].halfedge] = i;
  for (const auto& s : seams) {
    int o = at[mesh.twin[s.halfedge]];
    if (o < 0) throw Error(Errc::SeamTwinMismatch, "seam on halfedge " + std::to_string(s.halfedge) + " has no twin record");
    SeamTransition c = s.T.then(seams[o].T);
    if (c.j != 0 || norm(c.t) > 1e-9 * std::max(1.0, norm(s.T.t)))
      throw Error(Errc::SeamTwinMismatch, "seam records on edge " + std::to_string(mesh.edge[s.halfedge]) +
                                              " are not mutually inverse");
  }
  return assemble_param(std::move(mesh), std::move(uv), std::move(seams), std::move(cones), has_cones);
}

std::string write_qlay(const AbstractQuadComplex& c) {
  ComplexInfo info = check_complex(c);
  std::ostringstream o;
  o << "qlay 1\n";
  if (!c.note.empty()) o << "note " << c.note << "\n";
  o << "vertices " << c.num_vertices << "\n";
  for (int v = 0; v < c.num_vertices; ++v) {
    o << (info.boundary[v] ? 'b' : 'i');
    if (!c.positions.empty()) {
      const Vec3& x = c.positions[v];
      o << ' ' << format_double(x.x) << ' ' << format_double(x.y) << ' ' << format_double(x.z);
    }
    o << '\n';
  }
  o << "quads " << c.quads.size() << "\n";
  for (const auto& q : c.quads) o << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
  if (c.declared_euler) o << "euler " << *c.declared_euler << "\n";
  o << "end\n";
  return o.str();
}

AbstractQuadComplex read_qlay(const std::string& text) {
  LineReader r(text);
  check_header(r, "qlay");
  AbstractQuadComplex c;
  auto t = r.expect("vertex count");
  if (t[0] == "note") {
    auto pos = r.raw().find("note");
    c.note = r.raw().substr(pos + 5 <= r.raw().size() ? pos + 5 : r.raw().size());
    t = r.expect("vertex count");
  }
  c.num_vertices = r.count(t, "vertices");
  if (c.num_vertices == 0) r.fail("empty vertex table");
  bool with_pos = false;
  for (int v = 0; v < c.num_vertices; ++v) {
    t = r.expect("vertex");
    if (t[0] != "b" && t[0] != "i") r.fail("vertex flag must be b or i");
    if (v == 0) with_pos = t.size() == 4;
    r.arity(t, with_pos ? 4 : 1);
    c.declared_boundary.push_back(t[0] == "b" ? 1 : 0);
    if (with_pos) c.positions.push_back({r.to_double(t[1]), r.to_double(t[2]), r.to_double(t[3])});
  }
  int nq = r.count(r.expect("quad count"), "quads");
  if (nq == 0) r.fail("empty quad table");
  for (int q = 0; q < nq; ++q) {
    t = r.expect("quad");
    r.arity(t, 4);
    std::array<int, 4> quad{};
    for (int i = 0; i < 4; ++i) {
      long v = r.to_int(t[i]);
      if (v < 0 || v >= c.num_vertices) r.fail("vertex index out of range");
      quad[i] = static_cast<int>(v);
    }
    c.quads.push_back(quad);
  }
  t = r.expect("'euler' or 'end'");
  if (t[0] == "euler") {
    r.arity(t, 2);
    c.declared_euler = static_cast<int>(r.to_int(t[1]));
    t = r.expect("'end'");
  }
  if (t.size() != 1 || t[0] != "end") r.fail("expected 'end'");
  std::vector<std::string> extra;
  if (r.next(extra)) r.fail("content after 'end'");
  check_complex(c);
  return c;
}

TriMesh read_obj(const std::string& text) {
  LineReader r(text);
  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::string> t;
  while (r.next(t)) {
    if (t[0] == "v") {
      if (t.size() < 4) r.fail("vertex needs 3 coordinates");
      pos.push_back({r.to_double(t[1]), r.to_double(t[2]), r.to_double(t[3])});
    } else if (t[0] == "f") {
      if (t.size() < 4) r.fail("face needs at least 3 vertices");
      std::vector<int> idx;
      for (size_t i = 1; i < t.size(); ++i) {
        long v = r.to_int(t[i].substr(0, t[i].find('/')));
        if (v < 0) v += static_cast<long>(pos.size()) + 1;
        if (v < 1 || v > static_cast<long>(pos.size())) r.fail("vertex index out of range");
        idx.push_back(static_cast<int>(v - 1));
      }
      for (size_t i = 1; i + 1 < idx.size(); ++i) faces.push_back({idx[0], idx[i], idx[i + 1]});
    }
  }
  if (pos.empty()) throw Error(Errc::ParseError, "no vertices");
  if (faces.empty()) throw Error(Errc::ParseError, "no faces");
  return build_halfedge(std::move(pos), std::move(faces));
}

SeamlessParam param_from_mesh(TriMesh mesh) {
  std::vector<Vec2> uv(mesh.num_halfedges());
  return assemble_param(std::move(mesh), std::move(uv), {});
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
  out << data;
  if (!out) throw Error(Errc::InvalidArgument, "write failed for " + path);
}

}  // namespace qli
