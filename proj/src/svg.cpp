#include <algorithm>
#include <cstdio>
#include <set>
#include <string>

#include "qli/report.hpp"

namespace qli {

namespace {

struct Frame {
  double minx = 0, miny = 0, scale = 1, margin = 12, height = 0;
  double X(Vec2 p) const { return margin + (p.x - minx) * scale; }
  double Y(Vec2 p) const { return height - margin - (p.y - miny) * scale; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string xy(const Frame& f, Vec2 p) { return fmt(f.X(p)) + "," + fmt(f.Y(p)); }

void line(std::string& out, const Frame& f, Vec2 a, Vec2 b, const char* stroke, double w, const char* extra = "") {
  out += "<line x1=\"" + fmt(f.X(a)) + "\" y1=\"" + fmt(f.Y(a)) + "\" x2=\"" + fmt(f.X(b)) + "\" y2=\"" +
         fmt(f.Y(b)) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(w) + "\"" + extra + "/>\n";
}

}  // namespace

std::string export_svg(const SeamlessParam& p, const QuadLayout* layout, const std::vector<QuotientCurve>& traces,
                       const SvgOptions& opts) {
  const auto& M = p.mesh;
  double minx = 0, maxx = 0, miny = 0, maxy = 0;
  if (!p.uv.empty()) {
    minx = maxx = p.uv[0].x;
    miny = maxy = p.uv[0].y;
  }
  for (Vec2 u : p.uv) {
    minx = std::min(minx, u.x);
    maxx = std::max(maxx, u.x);
    miny = std::min(miny, u.y);
    maxy = std::max(maxy, u.y);
  }
  Frame f;
  f.minx = minx;
  f.miny = miny;
  double extent = std::max({maxx - minx, maxy - miny, 1e-12});
  f.scale = (opts.width - 2 * f.margin) / extent;
  double width = 2 * f.margin + (maxx - minx) * f.scale;
  f.height = 2 * f.margin + (maxy - miny) * f.scale;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(f.height) +
         "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(f.height) + "\">\n";

  if (opts.show_faces) {
    out += "<g id=\"faces\" fill=\"#f4f4f4\" stroke=\"#bbbbbb\" stroke-width=\"0.5\">\n";
    for (int t = 0; t < M.num_faces(); ++t)
      out += "<polygon points=\"" + xy(f, p.uv[3 * t]) + " " + xy(f, p.uv[3 * t + 1]) + " " +
             xy(f, p.uv[3 * t + 2]) + "\"/>\n";
    out += "</g>\n";
  }

  auto angles = measure_vertex_angles(p);
  auto is_cone = [&](int v) { return !angles[v].regular; };

  if (opts.show_seams) {
    std::vector<char> arc_cone(p.cut.arcs.size(), 0);
    for (size_t a = 0; a < p.cut.arcs.size(); ++a) {
      const auto& vs = p.cut.arcs[a].vertices;
      if (!vs.empty() && (is_cone(vs.front()) || is_cone(vs.back()))) arc_cone[a] = 1;
    }
    out += "<g id=\"seams\">\n";
    for (int h = 0; h < M.num_halfedges(); ++h) {
      Vec2 a = p.uv[h], b = p.uv[TriMesh::next(h)];
      if (M.is_boundary_halfedge(h)) {
        line(out, f, a, b, "#2a9d3a", 1.5);
      } else if (p.is_cut(h)) {
        int arc = p.seams[p.seam_of[h]].arc;
        bool cone = arc >= 0 && arc < static_cast<int>(arc_cone.size()) && arc_cone[arc];
        line(out, f, a, b, cone ? "#d62828" : "#1d4ed8", 1.5);
      }
    }
    out += "</g>\n";
  }

  if (layout) {
    out += "<g id=\"layout\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.2\">\n";
    for (const auto& a : layout->arcs)
      for (const auto& pc : a.pieces) line(out, f, pc.a, pc.b, "#000000", 1.2);
    out += "</g>\n";
  }

  if (!traces.empty()) {
    out += "<g id=\"traces\">\n";
    for (const auto& c : traces)
      for (const auto& pc : c.pieces)
        for (const auto& s : pc.segments) line(out, f, s.a, s.b, "#7c3aed", 1.0, " stroke-dasharray=\"4,3\"");
    out += "</g>\n";
  }

  if (opts.show_cones) {
    // One dot per copy of a cone in the cut-open chart.
    out += "<g id=\"cones\">\n";
    std::set<int> seen;
    const auto& C = p.completion;
    for (int h = 0; h < M.num_halfedges(); ++h) {
      int v = M.origin(h);
      if (!is_cone(v)) continue;
      int cv = C.mesh.origin(h);
      if (!seen.insert(cv).second) continue;
      const char* fill = angles[v].m < 4 ? "#d62828" : "#1d4ed8";
      out += "<circle cx=\"" + fmt(f.X(p.uv[h])) + "\" cy=\"" + fmt(f.Y(p.uv[h])) + "\" r=\"3.000000\" fill=\"" +
             fill + "\"/>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace qli
