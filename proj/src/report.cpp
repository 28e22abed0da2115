#include "qli/report.hpp"

#include <json.hpp>

namespace qli {

using Json = nlohmann::ordered_json;

std::vector<std::string> FullValidation::failed() const {
  auto out = immersion.failed();
  if (q5.evaluated && !q5.pass) out.push_back("Q5");
  return out;
}

FullValidation validate_all(const SeamlessParam& p, int budget, const Tolerances& tol) {
  FullValidation v;
  v.immersion = validate_immersion(p, tol);
  // Coordinate lines are only meaningful on a valid seamless immersion.
  if (!v.immersion.pass()) {
    v.q5.evaluated = false;
    v.q5.budget = budget > 0 ? budget : default_budget(p);
    return v;
  }
  try {
    v.q5 = validate_q5(p, budget);
  } catch (const Error& e) {
    v.q5.pass = false;
    v.q5.budget = budget > 0 ? budget : default_budget(p);
    v.q5.violations.push_back({"trace", -1, 0, 0, e.what()});
  }
  return v;
}

namespace {

Json vec(Vec2 a) { return Json::array({a.x, a.y}); }

Json point(const SurfacePoint& s) {
  return Json{{"face", s.face}, {"bary", Json::array({s.bary[0], s.bary[1], s.bary[2]})}};
}

Json violations(const std::vector<Violation>& vs) {
  Json out = Json::array();
  for (const auto& v : vs)
    out.push_back({{"element", v.element},
                   {"id", v.id},
                   {"measured", v.measured},
                   {"expected", v.expected},
                   {"detail", v.detail}});
  return out;
}

Json outcome(const PropertyOutcome& o) {
  return Json{{"pass", o.pass}, {"violations", violations(o.violations)}};
}

Json end_event(const EndEvent& e) {
  return Json{{"kind", end_kind_name(e.kind)}, {"halfedge", e.halfedge}, {"vertex", e.vertex}, {"uv", vec(e.uv)}};
}

Json curve_summary(const QuotientCurve& c) {
  Json j{{"status", curve_status_name(c.status)},
         {"pieces", c.pieces.size()},
         {"crossings", c.crossings()},
         {"segments", c.segments_used},
         {"budget", c.budget},
         {"node_crossings", c.node_crossings}};
  if (c.status == CurveStatus::Periodic) {
    j["period_start"] = c.period_start;
    j["period_length"] = c.period_length;
    j["repeated_states"] = c.repeated_states;
  }
  if (c.status == CurveStatus::Finite) j["end"] = end_event(c.end);
  return j;
}

Json q5_json(const Q5Report& q) {
  Json traces = Json::array();
  for (const auto& t : q.traces) {
    Json j{{"vertex", t.start.vertex}};
    if (t.start.vertex >= 0) {
      j["corner"] = t.start.corner;
    } else {
      j["base"] = point(t.base);
    }
    j["axis"] = axis_name(t.start.axis);
    j["direction"] = t.start.direction;
    j["curve"] = curve_summary(t.curve);
    traces.push_back(std::move(j));
  }
  return Json{{"evaluated", q.evaluated},
              {"pass", q.pass},
              {"mode", q.cone_mode ? "separatrices" : "base_point"},
              {"terminated_prematurely", q.terminated_prematurely},
              {"budget", q.budget},
              {"violations", violations(q.violations)},
              {"traces", traces}};
}

Json validation_json(const SeamlessParam& p, const FullValidation& v) {
  const auto& r = v.immersion;
  Json cones = Json::array();
  for (const auto& c : r.cones)
    cones.push_back({{"vertex", c.vertex}, {"boundary", c.boundary}, {"m", c.m}, {"angle", c.angle}});
  Json failed = Json::array();
  for (const auto& f : v.failed()) failed.push_back(f);
  return Json{
      {"topology",
       {{"genus", r.topology.genus}, {"boundaries", r.topology.boundary_count}, {"euler", r.topology.euler}}},
      {"counts",
       {{"vertices", p.mesh.num_vertices()},
        {"faces", p.mesh.num_faces()},
        {"edges", p.mesh.num_edges()},
        {"seams", p.seams.size()},
        {"cut_edges", p.cut.cut_edges.size()},
        {"cut_arcs", p.cut.arcs.size()}}},
      {"cones", cones},
      {"sigma", {{"min", r.sigma_min}, {"max", r.sigma_max}}},
      {"gauss_bonnet_residual", r.gauss_bonnet_residual},
      {"properties",
       {{"Q1", outcome(r.q1)},
        {"Q2", outcome(r.q2)},
        {"Q3", outcome(r.q3)},
        {"Q4", outcome(r.q4)},
        {"gauss_bonnet", outcome(r.gauss_bonnet)},
        {"holonomy", outcome(r.holonomy)}}},
      {"Q5", q5_json(v.q5)},
      {"pass", v.pass()},
      {"failed", failed}};
}

Json key_json(const SurfaceKey& k) {
  static const char* kinds[] = {"vertex", "edge", "face"};
  Json j{{"kind", kinds[k.kind]}, {"id", k.id}};
  if (k.kind == SurfaceKey::Edge) j["t"] = k.a;
  if (k.kind == SurfaceKey::Face) j["uv"] = Json::array({k.a, k.b});
  return j;
}

}  // namespace

std::string report_json(const SeamlessParam& p, const FullValidation& v) {
  Json j{{"schema", "qli-report/1"}};
  j.update(validation_json(p, v));
  return j.dump(2) + "\n";
}

std::string layout_json(const SeamlessParam& p, const FullValidation& v, const QuadLayout& L) {
  Json nodes = Json::array();
  for (const auto& n : L.nodes) {
    Json j{{"role", node_role_name(n.role)}, {"key", key_json(n.key)}, {"point", point(n.point)}};
    if (n.role == NodeRole::Cone || n.role == NodeRole::BoundaryCone) j["m"] = n.m;
    nodes.push_back(std::move(j));
  }
  Json arcs = Json::array();
  for (const auto& a : L.arcs) {
    Json pieces = Json::array();
    for (const auto& pc : a.pieces) pieces.push_back({{"face", pc.face}, {"a", vec(pc.a)}, {"b", vec(pc.b)}});
    arcs.push_back({{"from", a.from},
                    {"to", a.to},
                    {"role", curve_role_name(a.role)},
                    {"curve", a.curve},
                    {"length", a.length},
                    {"left", a.left},
                    {"right", a.right},
                    {"pieces", pieces}});
  }
  Json patches = Json::array();
  for (const auto& q : L.patches)
    patches.push_back(
        {{"arcs", q.arcs}, {"corners", q.corners}, {"corner_count", q.corner_count}, {"faces", q.faces}});
  Json curves = Json::array();
  for (const auto& c : L.curves) {
    Json j{{"role", curve_role_name(c.role)}, {"closed", c.closed}};
    j.update(curve_summary(c.curve));
    curves.push_back(std::move(j));
  }
  Json j{{"schema", "qli-layout/1"},
         {"counts",
          {{"nodes", L.nodes.size()},
           {"arcs", L.arcs.size()},
           {"patches", L.patches.size()},
           {"euler", L.euler},
           {"surface_euler", L.surface_euler}}},
         {"tracer",
          {{"separatrices_emitted", L.emitted},
           {"curves", L.curves.size()},
           {"node_crossings", L.node_crossings}}},
         {"nodes", nodes},
         {"arcs", arcs},
         {"patches", patches},
         {"curves", curves},
         {"validation", validation_json(p, v)}};
  return j.dump(2) + "\n";
}

std::string curve_json(const QuotientCurve& c) {
  Json pieces = Json::array();
  for (const auto& pc : c.pieces) {
    Json segs = Json::array();
    for (const auto& s : pc.segments)
      segs.push_back({{"face", s.face}, {"a", vec(s.a)}, {"b", vec(s.b)}, {"along_boundary", s.along_boundary}});
    pieces.push_back({{"axis", axis_name(pc.axis)},
                      {"value", pc.value},
                      {"direction", pc.direction},
                      {"segments", segs},
                      {"end", end_event(pc.end)}});
  }
  Json conts = Json::array();
  for (const auto& k : c.continuations)
    conts.push_back({{"halfedge", k.halfedge},
                     {"j", k.T.j},
                     {"t", vec(k.T.t)},
                     {"axis", axis_name(k.axis)},
                     {"value", k.value},
                     {"direction", k.direction},
                     {"point", vec(k.point)},
                     {"at_vertex", k.at_vertex}});
  Json j{{"schema", "qli-curve/1"}};
  j.update(curve_summary(c));
  j["pieces"] = pieces;
  j["continuations"] = conts;
  return j.dump(2) + "\n";
}

}  // namespace qli
