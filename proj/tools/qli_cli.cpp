// qli: synthesize, validate, trace and extract seamless parameterizations.
// Exit codes: 0 success, 2 property failure, 1 usage or I/O error.

#include <CLI11.hpp>
#include <algorithm>
#include <map>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "qli/io.hpp"
#include "qli/report.hpp"

using namespace qli;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kProperty = 2;

bool is_property_error(Errc c) {
  switch (c) {
    case Errc::ZeroAreaFace:
    case Errc::NonQuantizedCone:
    case Errc::NoRigidQuarterTurnFit:
    case Errc::InconsistentAlongArc:
    case Errc::PropertyViolation:
    case Errc::NonQuadPatch:
    case Errc::ArrangementDegeneracy:
    case Errc::NotGridAligned:
      return true;
    default:
      return false;
  }
}

void emit(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-")
    std::cout << data;
  else
    write_file(path, data);
}

int effective_budget(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("QLI_BUDGET")) {
    int b = std::atoi(env);
    if (b > 0) return b;
  }
  return -1;
}

SeamlessParam load_param(const std::string& path) {
  std::string text = read_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".obj") return param_from_mesh(read_obj(text));
  return read_qlim(text);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "bad number for " + what + ": '" + s + "'");
  }
}

void print_summary(const FullValidation& v) {
  const auto& r = v.immersion;
  std::cerr << "genus " << r.topology.genus << ", boundaries " << r.topology.boundary_count << ", cones "
            << r.cones.size() << "\n";
  std::cerr << "sigma [" << r.sigma_min << ", " << r.sigma_max << "], gauss-bonnet residual "
            << r.gauss_bonnet_residual << "\n";
  if (!v.q5.evaluated) std::cerr << "Q5 skipped\n";
  if (v.pass()) {
    std::cerr << "valid\n";
  } else {
    std::cerr << "failed:";
    for (const auto& f : v.failed()) std::cerr << " " << f;
    std::cerr << "\n";
  }
}

struct SynthArgs {
  std::string fixture, out = "-", perturb, qlay;
  std::vector<std::string> params;
  double nudge = -1, scale = 1.1;
};

int run_synth(const SynthArgs& a) {
  std::map<std::string, double> params;
  for (const auto& kv : a.params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::InvalidArgument, "--param expects k=v, got '" + kv + "'");
    params[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), kv.substr(0, eq));
  }
  Fixture fx = make_fixture(a.fixture, params);
  SeamlessParam p = std::move(fx.param);
  if (!a.perturb.empty()) {
    auto kind = parse_perturb(a.perturb);
    if (!kind) throw Error(Errc::InvalidArgument, "unknown perturbation '" + a.perturb + "'");
    PerturbOptions o;
    o.nudge = a.nudge;
    o.wedge_scale = a.scale;
    p = perturb(p, *kind, o);
  }
  if (!a.qlay.empty()) write_file(a.qlay, write_qlay(fx.complex));
  emit(a.out, write_qlim(p));
  return kOk;
}

struct ValidateArgs {
  std::string in, report;
  int budget = -1;
};

int run_validate(const ValidateArgs& a) {
  SeamlessParam p = load_param(a.in);
  auto v = validate_all(p, effective_budget(a.budget));
  std::string json = report_json(p, v);
  if (!a.report.empty()) write_file(a.report, json);
  print_summary(v);
  return v.pass() ? kOk : kProperty;
}

struct TraceArgs {
  std::string in, out = "-", svg, axis = "u", bary = "0.3333333333333333,0.3333333333333333,0.3333333333333334";
  int face = 0, direction = 1, budget = -1;
};

int run_trace(const TraceArgs& a) {
  SeamlessParam p = load_param(a.in);
  if (a.face < 0 || a.face >= p.mesh.num_faces()) throw Error(Errc::InvalidArgument, "face out of range");
  auto parts = split(a.bary, ',');
  if (parts.size() != 3) throw Error(Errc::InvalidArgument, "--bary expects three comma-separated numbers");
  SurfacePoint s;
  s.face = a.face;
  for (int i = 0; i < 3; ++i) s.bary[i] = parse_number(parts[i], "--bary");
  Axis axis;
  if (a.axis == "u" || a.axis == "U")
    axis = Axis::U;
  else if (a.axis == "v" || a.axis == "V")
    axis = Axis::V;
  else
    throw Error(Errc::InvalidArgument, "--axis expects u or v");
  if (a.direction != 1 && a.direction != -1) throw Error(Errc::InvalidArgument, "--direction expects 1 or -1");
  auto c = trace_quotient_curve(p, s, axis, a.direction, effective_budget(a.budget));
  emit(a.out, curve_json(c));
  if (!a.svg.empty()) write_file(a.svg, export_svg(p, nullptr, {c}));
  std::cerr << curve_status_name(c.status) << ", " << c.crossings() << " seam crossings, " << c.segments_used
            << " segments\n";
  return kOk;
}

struct ExtractArgs {
  std::string in, out = "-", svg;
  int budget = -1;
};

int run_extract(const ExtractArgs& a) {
  SeamlessParam p = load_param(a.in);
  int budget = effective_budget(a.budget);
  auto v = validate_all(p, budget);
  if (!v.pass()) {
    print_summary(v);
    return kProperty;
  }
  QuadLayout L = extract_layout(p, budget);
  emit(a.out, layout_json(p, v, L));
  if (!a.svg.empty()) write_file(a.svg, export_svg(p, &L));
  std::cerr << L.nodes.size() << " nodes, " << L.arcs.size() << " arcs, " << L.patches.size() << " patches\n";
  return kOk;
}

struct CutArgs {
  std::string in, out, singularities;
};

int run_cut(const CutArgs& a) {
  SeamlessParam src = load_param(a.in);
  const TriMesh& M = src.mesh;
  std::vector<int> sing;
  for (const auto& s : split(a.singularities, ',')) {
    double v = parse_number(s, "--singularities");
    if (v != static_cast<int>(v) || v < 0 || v >= M.num_vertices())
      throw Error(Errc::InvalidArgument, "singularity '" + s + "' is not a vertex index");
    sing.push_back(static_cast<int>(v));
  }
  CutGraph g = build_cutting_graph(M, sing);
  CutGraphReport rep = validate_cutting_graph(M, g, sing);
  CompletionMesh C = cut_mesh(M, g);

  nlohmann::ordered_json arcs = nlohmann::ordered_json::array();
  for (const auto& arc : g.arcs) arcs.push_back({{"vertices", arc.vertices}, {"edges", arc.edges}});
  auto topo = topology_info(M);
  nlohmann::ordered_json j{
      {"schema", "qli-cut/1"},
      {"topology", {{"genus", topo.genus}, {"boundaries", topo.boundary_count}, {"euler", topo.euler}}},
      {"singularities", sing},
      {"cut_edges", g.cut_edges},
      {"nodes", g.nodes},
      {"arcs", arcs},
      {"completion", {{"vertices", C.mesh.num_vertices()}, {"euler", topology_info(C.mesh).euler}}},
      {"checks",
       {{"complement_connected", rep.complement_connected},
        {"complement_simply_connected", rep.complement_simply_connected},
        {"singularities_are_endpoints", rep.singularities_are_endpoints},
        {"boundary_singularities_excluded", rep.boundary_singularities_excluded},
        {"boundary_contact_discrete", rep.boundary_contact_discrete}}}};
  std::cout << j.dump(2) << "\n";

  if (!a.out.empty()) {
    // The cut graph travels as identity seam records; UVs stay zero until a solver fills them.
    std::vector<SeamRecord> seams;
    for (int e : g.cut_edges) {
      int h = M.edge_halfedge[e];
      seams.push_back({h, {}, -1});
      seams.push_back({M.twin[h], {}, -1});
    }
    std::sort(seams.begin(), seams.end(), [](const SeamRecord& x, const SeamRecord& y) { return x.halfedge < y.halfedge; });
    SeamlessParam out = assemble_param(M, std::vector<Vec2>(M.num_halfedges()), std::move(seams));
    write_file(a.out, write_qlim(out));
  }
  return rep.all() ? kOk : kProperty;
}

struct OracleArgs {
  std::string in;
  double step = 1.0;
};

int run_oracle(const OracleArgs& a) {
  SeamlessParam p = load_param(a.in);
  OracleResult r = layout_oracle_bruteforce(p, a.step);
  nlohmann::ordered_json val = nlohmann::ordered_json::object();
  for (auto [k, n] : r.valence) val[std::to_string(k)] = n;
  nlohmann::ordered_json j{{"schema", "qli-oracle/1"}, {"V", r.V}, {"E", r.E}, {"F", r.F}, {"valence", val}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seamless parameterization toolkit"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Build a named fixture");
  synth->add_option("fixture", sa.fixture, "flat_torus, sheared_torus, rectangle, l_domain, annulus_35")->required();
  synth->add_option("--param", sa.params, "Fixture parameter k=v (w, h, s, a, b)");
  synth->add_option("-o,--output", sa.out, "Output .qlim (default stdout)");
  synth->add_option("--perturb", sa.perturb, "flip_face, scale_wedge, bump_rotation, nudge_boundary");
  synth->add_option("--nudge", sa.nudge, "Boundary nudge distance for nudge_boundary");
  synth->add_option("--scale", sa.scale, "Wedge scale for scale_wedge");
  synth->add_option("--qlay", sa.qlay, "Also write the source quad complex");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check all properties");
  validate->add_option("input", va.in)->required();
  validate->add_option("--report", va.report, "Write the JSON report here");
  validate->add_option("--budget", va.budget, "Tracer segment budget (QLI_BUDGET also works)");

  TraceArgs ta;
  auto* trace = app.add_subcommand("trace", "Trace a quotient curve");
  trace->add_option("input", ta.in)->required();
  trace->add_option("--face", ta.face)->required();
  trace->add_option("--bary", ta.bary, "Barycentric start a,b,c");
  trace->add_option("--axis", ta.axis, "u keeps u constant, v keeps v constant");
  trace->add_option("--direction", ta.direction, "1 or -1");
  trace->add_option("--budget", ta.budget);
  trace->add_option("-o,--output", ta.out, "Curve JSON (default stdout)");
  trace->add_option("--svg", ta.svg);

  ExtractArgs ea;
  auto* extract = app.add_subcommand("extract", "Extract the quad layout");
  extract->add_option("input", ea.in)->required();
  extract->add_option("-o,--output", ea.out, "Layout JSON (default stdout)");
  extract->add_option("--svg", ea.svg);
  extract->add_option("--budget", ea.budget);

  CutArgs ca;
  auto* cut = app.add_subcommand("cut", "Build a cutting graph and its completion");
  cut->add_option("input", ca.in, ".qlim or .obj")->required();
  cut->add_option("--singularities", ca.singularities, "Comma-separated vertex indices");
  cut->add_option("-o,--output", ca.out, "Write the mesh with its cut as .qlim");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Count the integer-isoline complex by brute force");
  oracle->add_option("input", oa.in)->required();
  oracle->add_option("--step", oa.step);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*synth) return run_synth(sa);
    if (*validate) return run_validate(va);
    if (*trace) return run_trace(ta);
    if (*extract) return run_extract(ea);
    if (*cut) return run_cut(ca);
    if (*oracle) return run_oracle(oa);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_property_error(e.code()) ? kProperty : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
