#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vtorch/postprocess.hpp"

namespace vtorch {

struct PointSupport {
  double x = 0, y = 0;
  bool fix_x = true, fix_y = true;
};

struct EdgeSupport {
  char axis = 'x';  // 'x': the line x = value; 'y': the line y = value
  double value = 0;
  bool fix_x = true, fix_y = true;
};

struct PointForce {
  double x = 0, y = 0, fx = 0, fy = 0;
};

struct EdgeTraction {
  char axis = 'x';
  double value = 0;
  double lo = 0, hi = 0;  // band along the edge
  double tx = 0, ty = 0;  // traction components (N/mm)
};

struct OutputConfig {
  std::string dir = "out";
  std::vector<double> snapshots;
  std::vector<double> betas = default_betas();
  bool vtk = true;
  bool pgm = true;
};

// Parsed run description. Optional parameters left unset are derived
// automatically at resolve time.
struct RunConfig {
  std::string method;             // vtorch | simp | acpf
  std::string problem = "custom";
  double width = 0, height = 0, h = 0;
  double E = 0, nu = 0;
  PlaneModel model = PlaneModel::plane_stress;
  double alpha = 0.5;

  double T = 1, dt0 = 0, dt_max = 0, dt_growth = 1.2;

  bool cont_enabled = true;
  double dtheta0 = 0, dthetaT = 0.5;
  std::optional<double> cont_T;  // defaults to T

  std::optional<double> epsilon, epsilon_over_h, gamma, kappa, kappa_over_h, k_slope,
      char_length;
  double rho_min = 1e-3;

  double newton_rel_tol = 1e-8, newton_abs_tol = 1e-12;
  int newton_max_iter = 20;

  SimpConfig simp;
  std::optional<double> simp_rb_over_h;
  AcpfConfig acpf;

  std::vector<PointSupport> point_supports;
  std::vector<EdgeSupport> edge_supports;
  std::vector<PointForce> point_forces;
  std::vector<EdgeTraction> edge_tractions;

  OutputConfig output;
  std::string sweep_density;  // saved density field consumed by `sweep`
};

// Benchmark presets: geometry, material, loads, and the tabulated parameter
// ratios, resolved against the final mesh size.
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.method = "vtorch";
  c.problem = name;
  c.epsilon_over_h = 1 / (2 * std::sqrt(2.0));
  c.simp_rb_over_h = 2;
  if (name == "mbb") {
    c.width = 6;
    c.height = 1;
    c.h = 1.0 / 16;
    c.E = 74000;
    c.nu = 0.33;
    c.gamma = 5.77;
    c.kappa_over_h = 5.07;
    c.point_supports = {PointSupport{0, 0, true, true}, PointSupport{6, 0, false, true}};
    c.point_forces = {PointForce{3, 1, 0, -100}};
    c.acpf.kappa = 0.1;
    c.acpf.eta = 60;
    c.acpf.chi = 20;
    c.acpf.T_end = 1;
    c.acpf.dt = 1e-3;
  } else if (name == "michell") {
    c.width = 2;
    c.height = 1;
    c.h = 1.0 / 25;
    c.E = 1;
    c.nu = 0;
    c.gamma = 16.0 / 3;
    c.kappa_over_h = 1.83;
    c.edge_supports = {EdgeSupport{'x', 0, true, true}};
    c.edge_tractions = {EdgeTraction{'x', 2, 0.4, 0.6, 0, -5}};
    c.acpf.kappa = 5e-3;
    c.acpf.eta = 20;
    c.acpf.chi = 400;
    c.acpf.T_end = 5;
    c.acpf.dt = 5e-3;
  } else {
    throw UnknownPreset("unknown preset: " + name);
  }
  return c;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_num(const std::string& v, int line) {
  try {
    size_t idx = 0;
    const double x = std::stod(v, &idx);
    if (idx != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": not a number: '" + v + "'");
  }
}

inline int parse_int(const std::string& v, int line) {
  try {
    size_t idx = 0;
    const int x = std::stoi(v, &idx);
    if (idx != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": not an integer: '" + v + "'");
  }
}

inline bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ParseError("line " + std::to_string(line) + ": not a boolean: '" + v + "'");
}

inline std::vector<double> parse_num_list(const std::string& v, int line) {
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_num(tok, line));
  return out;
}

// "x=<v>" or "y=<v>" prefix of edge specifications.
inline std::pair<char, double> parse_axis(const std::string& tok, int line) {
  if (tok.size() < 3 || (tok[0] != 'x' && tok[0] != 'y') || tok[1] != '=')
    throw ParseError("line " + std::to_string(line) + ": expected x=<v> or y=<v>, got '" +
                     tok + "'");
  return {tok[0], parse_num(tok.substr(2), line)};
}

inline std::pair<bool, bool> parse_mask(const std::string& tok, int line) {
  if (tok == "xy") return {true, true};
  if (tok == "x") return {true, false};
  if (tok == "y") return {false, true};
  throw ParseError("line " + std::to_string(line) + ": support mask must be xy, x, or y");
}

inline std::vector<std::string> split_ws(const std::string& v) {
  std::istringstream in(v);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline void apply_key(RunConfig& c, const std::string& key, const std::string& value,
                      int line) {
  auto num = [&] { return parse_num(value, line); };
  auto integer = [&] { return parse_int(value, line); };
  auto boolean = [&] { return parse_bool(value, line); };
  if (key == "method") {
    c.method = value;
  } else if (key == "problem") {
    // handled in the first pass; accepted here so the key is not "unknown"
  } else if (key == "mesh.width") {
    c.width = num();
  } else if (key == "mesh.height") {
    c.height = num();
  } else if (key == "mesh.h") {
    c.h = num();
  } else if (key == "material.E") {
    c.E = num();
  } else if (key == "material.nu") {
    c.nu = num();
  } else if (key == "material.model") {
    if (value == "plane_stress")
      c.model = PlaneModel::plane_stress;
    else if (value == "plane_strain")
      c.model = PlaneModel::plane_strain;
    else
      throw ValidationError("material.model must be plane_stress or plane_strain");
  } else if (key == "volume.alpha") {
    c.alpha = num();
  } else if (key == "time.T") {
    c.T = num();
  } else if (key == "time.dt0") {
    c.dt0 = num();
  } else if (key == "time.dt_max") {
    c.dt_max = num();
  } else if (key == "time.dt_growth") {
    c.dt_growth = num();
  } else if (key == "continuation.enabled") {
    c.cont_enabled = boolean();
  } else if (key == "continuation.dtheta0") {
    c.dtheta0 = num();
  } else if (key == "continuation.dthetaT") {
    c.dthetaT = num();
  } else if (key == "continuation.T") {
    c.cont_T = num();
  } else if (key == "params.epsilon") {
    c.epsilon = num();
  } else if (key == "params.epsilon_over_h") {
    c.epsilon_over_h = num();
  } else if (key == "params.gamma") {
    c.gamma = num();
  } else if (key == "params.kappa") {
    c.kappa = num();
  } else if (key == "params.kappa_over_h") {
    c.kappa_over_h = num();
  } else if (key == "params.k") {
    c.k_slope = num();
  } else if (key == "params.rho_min") {
    c.rho_min = num();
  } else if (key == "params.char_length") {
    c.char_length = num();
  } else if (key == "newton.rel_tol") {
    c.newton_rel_tol = num();
  } else if (key == "newton.abs_tol") {
    c.newton_abs_tol = num();
  } else if (key == "newton.max_iter") {
    c.newton_max_iter = integer();
  } else if (key == "simp.p") {
    c.simp.p = num();
  } else if (key == "simp.r_b") {
    c.simp.r_b = num();
  } else if (key == "simp.r_b_over_h") {
    c.simp_rb_over_h = num();
  } else if (key == "simp.move") {
    c.simp.move = num();
  } else if (key == "simp.oc_eta") {
    c.simp.oc_eta = num();
  } else if (key == "simp.E_min") {
    c.simp.E_min = num();
  } else if (key == "simp.rho_min") {
    c.simp.rho_min = num();
  } else if (key == "simp.max_iters") {
    c.simp.max_iters = integer();
  } else if (key == "simp.change_tol") {
    c.simp.change_tol = num();
  } else if (key == "acpf.kappa") {
    c.acpf.kappa = num();
  } else if (key == "acpf.eta") {
    c.acpf.eta = num();
  } else if (key == "acpf.chi") {
    c.acpf.chi = num();
  } else if (key == "acpf.dt") {
    c.acpf.dt = num();
  } else if (key == "acpf.T") {
    c.acpf.T_end = num();
  } else if (key == "acpf.rho_min") {
    c.acpf.rho_min = num();
  } else if (key == "acpf.p") {
    c.acpf.p = num();
  } else if (key == "acpf.holes_x") {
    c.acpf.holes_x = integer();
  } else if (key == "acpf.holes_y") {
    c.acpf.holes_y = integer();
  } else if (key == "acpf.hole_radius") {
    c.acpf.hole_radius = num();
  } else if (key == "acpf.seed") {
    c.acpf.seed = static_cast<unsigned>(integer());
  } else if (key == "support.point") {
    const auto toks = split_ws(value);
    if (toks.size() != 3)
      throw ParseError("line " + std::to_string(line) + ": support.point wants <x> <y> <mask>");
    const auto [fx, fy] = parse_mask(toks[2], line);
    c.point_supports.push_back(
        {parse_num(toks[0], line), parse_num(toks[1], line), fx, fy});
  } else if (key == "support.edge") {
    const auto toks = split_ws(value);
    if (toks.size() != 2)
      throw ParseError("line " + std::to_string(line) + ": support.edge wants <axis>=<v> <mask>");
    const auto [axis, v] = parse_axis(toks[0], line);
    const auto [fx, fy] = parse_mask(toks[1], line);
    c.edge_supports.push_back({axis, v, fx, fy});
  } else if (key == "load.point") {
    const auto toks = split_ws(value);
    if (toks.size() != 4)
      throw ParseError("line " + std::to_string(line) + ": load.point wants <x> <y> <fx> <fy>");
    c.point_forces.push_back({parse_num(toks[0], line), parse_num(toks[1], line),
                              parse_num(toks[2], line), parse_num(toks[3], line)});
  } else if (key == "load.edge") {
    const auto toks = split_ws(value);
    if (toks.size() != 5)
      throw ParseError("line " + std::to_string(line) +
                       ": load.edge wants <axis>=<v> <lo> <hi> <tx> <ty>");
    const auto [axis, v] = parse_axis(toks[0], line);
    c.edge_tractions.push_back({axis, v, parse_num(toks[1], line), parse_num(toks[2], line),
                                parse_num(toks[3], line), parse_num(toks[4], line)});
  } else if (key == "output.dir") {
    c.output.dir = value;
  } else if (key == "output.snapshots") {
    c.output.snapshots = parse_num_list(value, line);
  } else if (key == "output.betas") {
    c.output.betas = parse_num_list(value, line);
  } else if (key == "output.vtk") {
    c.output.vtk = boolean();
  } else if (key == "output.pgm") {
    c.output.pgm = boolean();
  } else if (key == "sweep.density") {
    c.sweep_density = value;
  } else {
    throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  if (c.method != "vtorch" && c.method != "simp" && c.method != "acpf")
    throw ValidationError("method must be vtorch, simp, or acpf (got '" + c.method + "')");
  if (!(c.width > 0)) throw ValidationError("mesh.width must be positive");
  if (!(c.height > 0)) throw ValidationError("mesh.height must be positive");
  if (!(c.h > 0)) throw ValidationError("mesh.h must be positive");
  if (!(c.E > 0)) throw ValidationError("material.E must be positive");
  if (!(c.nu > -1) || !(c.nu < 0.5)) throw ValidationError("material.nu must lie in (-1, 0.5)");
  if (!(c.alpha > 0) || !(c.alpha < 1)) throw ValidationError("volume.alpha must lie in (0,1)");
  if (!(c.T > 0)) throw ValidationError("time.T must be positive");
  if (c.dt0 < 0 || c.dt_max < 0) throw ValidationError("time.dt0/dt_max must be nonnegative");
  if (!(c.dt_growth >= 1)) throw ValidationError("time.dt_growth must be >= 1");
  if (!(c.rho_min > 0) || !(c.rho_min < 0.5))
    throw ValidationError("params.rho_min must lie in (0, 1/2)");
  if (c.epsilon && c.epsilon_over_h)
    throw ValidationError("params.epsilon and params.epsilon_over_h are exclusive");
  if (c.kappa && c.kappa_over_h)
    throw ValidationError("params.kappa and params.kappa_over_h are exclusive");
  if (!(c.dthetaT > 0)) throw ValidationError("continuation.dthetaT must be positive");
  if (c.newton_max_iter < 1) throw ValidationError("newton.max_iter must be >= 1");
  if (c.point_supports.empty() && c.edge_supports.empty())
    throw ValidationError("at least one support is required");
  if (c.point_forces.empty() && c.edge_tractions.empty())
    throw ValidationError("at least one load is required");
}

inline RunConfig parse_config(const std::string& text) {
  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::map<std::string, int> seen;
  const std::vector<std::string> repeatable = {"support.point", "support.edge", "load.point",
                                               "load.edge"};
  std::istringstream in(text);
  std::string raw;
  int n = 0;
  std::string problem = "custom";
  while (std::getline(in, raw)) {
    ++n;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    // Edge specs contain '=' inside the value; the key is everything before
    // the first '=' regardless.
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(n) + ": expected key = value");
    const std::string key = detail::trim(raw.substr(0, eq));
    const std::string value = detail::trim(raw.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("line " + std::to_string(n) + ": expected key = value");
    if (std::find(repeatable.begin(), repeatable.end(), key) == repeatable.end()) {
      if (seen.count(key))
        throw ParseError("line " + std::to_string(n) + ": duplicate key '" + key +
                         "' (first at line " + std::to_string(seen[key]) + ")");
      seen[key] = n;
    }
    if (key == "problem") problem = value;
    entries.push_back({key, value, n});
  }
  RunConfig c;
  if (problem != "custom") {
    try {
      c = preset(problem);
    } catch (const UnknownPreset& e) {
      throw ValidationError(std::string("problem: ") + e.what());
    }
  }
  for (const Entry& e : entries) detail::apply_key(c, e.key, e.value, e.line);
  if (c.method.empty()) throw ValidationError("method is missing");
  validate(c);
  return c;
}

// Fully-resolved run: mesh and loads are concrete, all optional parameters
// are numeric, and `manifest` reparses to the identical setup.
struct ResolvedProblem {
  Mesh mesh;
  Material mat;
  LoadCase loads;
  ModelParams params;  // populated for method == vtorch
  SimpConfig simp;
  AcpfConfig acpf;
  RunConfig manifest;
};

namespace detail {

inline int nearest_boundary_node(const Mesh& mesh, double x, double y) {
  const auto nodes = select_boundary_nodes(mesh, near_point(x, y, 0.5 * mesh.h));
  int best = nodes.front();
  double bd = (mesh.node_coords[best] - Vec2(x, y)).norm();
  for (int nd : nodes) {
    const double d = (mesh.node_coords[nd] - Vec2(x, y)).norm();
    if (d < bd) {
      bd = d;
      best = nd;
    }
  }
  return best;
}

}  // namespace detail

inline ResolvedProblem resolve(const RunConfig& in) {
  validate(in);
  ResolvedProblem r;
  r.mesh = build_rect_mesh(in.width, in.height, in.h);
  r.mat = Material{in.E, in.nu, in.model};
  const double tol = boundary_tol(r.mesh);

  for (const PointSupport& s : in.point_supports) {
    const int node = detail::nearest_boundary_node(r.mesh, s.x, s.y);
    if (s.fix_x) r.loads.dirichlet.push_back({node, 0, 0.0});
    if (s.fix_y) r.loads.dirichlet.push_back({node, 1, 0.0});
  }
  for (const EdgeSupport& s : in.edge_supports) {
    const auto nodes = select_boundary_nodes(
        r.mesh, s.axis == 'x' ? x_equals(s.value, tol) : y_equals(s.value, tol));
    for (int node : nodes) {
      if (s.fix_x) r.loads.dirichlet.push_back({node, 0, 0.0});
      if (s.fix_y) r.loads.dirichlet.push_back({node, 1, 0.0});
    }
  }
  for (const PointForce& p : in.point_forces) {
    const int node = detail::nearest_boundary_node(r.mesh, p.x, p.y);
    r.loads.point_loads.push_back({node, Vec2(p.fx, p.fy)});
  }
  for (const EdgeTraction& t : in.edge_tractions) {
    const auto edges = select_boundary_edges(
        r.mesh, t.axis == 'x' ? segment_x(t.value, t.lo, t.hi, tol)
                              : segment_y(t.value, t.lo, t.hi, tol));
    for (const auto& e : edges) r.loads.traction_edges.push_back({e, Vec2(t.tx, t.ty)});
  }

  r.manifest = in;
  r.manifest.problem = "custom";

  if (in.method == "vtorch") {
    ModelParams p;
    p.alpha = in.alpha;
    p.T_end = in.T;
    p.dt0 = in.dt0;
    p.dt_max = in.dt_max;
    p.dt_growth = in.dt_growth;
    p.newton_rel_tol = in.newton_rel_tol;
    p.newton_abs_tol = in.newton_abs_tol;
    p.newton_max_iter = in.newton_max_iter;
    p.reparam = in.k_slope ? Reparam{*in.k_slope, in.rho_min} : make_reparam(in.rho_min);
    p.schedule = WellSchedule{in.dtheta0, in.dthetaT, in.cont_T.value_or(in.T),
                              in.cont_enabled};
    const bool need_auto = !(in.epsilon || in.epsilon_over_h) || !in.gamma ||
                           !(in.kappa || in.kappa_over_h);
    ModelParams autod;
    if (need_auto)
      autod = auto_params(r.mesh, r.mat, r.loads, in.alpha, in.T, in.rho_min,
                          in.char_length.value_or(0));
    p.epsilon = in.epsilon ? *in.epsilon
                           : in.epsilon_over_h ? *in.epsilon_over_h * r.mesh.h : autod.epsilon;
    p.gamma = in.gamma ? *in.gamma : autod.gamma;
    p.kappa =
        in.kappa ? *in.kappa : in.kappa_over_h ? *in.kappa_over_h * r.mesh.h : autod.kappa;
    validate_params(p);
    r.params = p;
    r.manifest.epsilon = p.epsilon;
    r.manifest.epsilon_over_h.reset();
    r.manifest.gamma = p.gamma;
    r.manifest.kappa = p.kappa;
    r.manifest.kappa_over_h.reset();
    r.manifest.k_slope = p.reparam.k;
  }

  r.simp = in.simp;
  if (in.simp_rb_over_h) r.simp.r_b = *in.simp_rb_over_h * r.mesh.h;
  if (r.simp.E_min <= 0) r.simp.E_min = 1e-9 * in.E;
  r.manifest.simp = r.simp;
  r.manifest.simp_rb_over_h.reset();

  r.acpf = in.acpf;
  if (r.acpf.dt <= 0) r.acpf.dt = 1e-3 * r.acpf.T_end;
  if (r.acpf.hole_radius <= 0)
    r.acpf.hole_radius =
        0.3 * std::min(in.width / r.acpf.holes_x, in.height / r.acpf.holes_y);
  r.manifest.acpf = r.acpf;
  return r;
}

// Round-trips through parse_config to the identical RunConfig; used as the
// reproducibility manifest.
inline std::string serialize_config(const RunConfig& c) {
  using detail::fmt17;
  std::string s;
  auto line = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  auto numl = [&](const std::string& k, double v) { line(k, fmt17(v)); };
  auto booll = [&](const std::string& k, bool v) { line(k, v ? "true" : "false"); };
  line("method", c.method);
  line("problem", c.problem);
  numl("mesh.width", c.width);
  numl("mesh.height", c.height);
  numl("mesh.h", c.h);
  numl("material.E", c.E);
  numl("material.nu", c.nu);
  line("material.model",
       c.model == PlaneModel::plane_stress ? "plane_stress" : "plane_strain");
  numl("volume.alpha", c.alpha);
  numl("time.T", c.T);
  numl("time.dt0", c.dt0);
  numl("time.dt_max", c.dt_max);
  numl("time.dt_growth", c.dt_growth);
  booll("continuation.enabled", c.cont_enabled);
  numl("continuation.dtheta0", c.dtheta0);
  numl("continuation.dthetaT", c.dthetaT);
  if (c.cont_T) numl("continuation.T", *c.cont_T);
  if (c.epsilon) numl("params.epsilon", *c.epsilon);
  if (c.epsilon_over_h) numl("params.epsilon_over_h", *c.epsilon_over_h);
  if (c.gamma) numl("params.gamma", *c.gamma);
  if (c.kappa) numl("params.kappa", *c.kappa);
  if (c.kappa_over_h) numl("params.kappa_over_h", *c.kappa_over_h);
  if (c.k_slope) numl("params.k", *c.k_slope);
  numl("params.rho_min", c.rho_min);
  if (c.char_length) numl("params.char_length", *c.char_length);
  numl("newton.rel_tol", c.newton_rel_tol);
  numl("newton.abs_tol", c.newton_abs_tol);
  line("newton.max_iter", std::to_string(c.newton_max_iter));
  numl("simp.p", c.simp.p);
  numl("simp.r_b", c.simp.r_b);
  if (c.simp_rb_over_h) numl("simp.r_b_over_h", *c.simp_rb_over_h);
  numl("simp.move", c.simp.move);
  numl("simp.oc_eta", c.simp.oc_eta);
  numl("simp.E_min", c.simp.E_min);
  numl("simp.rho_min", c.simp.rho_min);
  line("simp.max_iters", std::to_string(c.simp.max_iters));
  numl("simp.change_tol", c.simp.change_tol);
  numl("acpf.kappa", c.acpf.kappa);
  numl("acpf.eta", c.acpf.eta);
  numl("acpf.chi", c.acpf.chi);
  numl("acpf.dt", c.acpf.dt);
  numl("acpf.T", c.acpf.T_end);
  numl("acpf.rho_min", c.acpf.rho_min);
  numl("acpf.p", c.acpf.p);
  line("acpf.holes_x", std::to_string(c.acpf.holes_x));
  line("acpf.holes_y", std::to_string(c.acpf.holes_y));
  numl("acpf.hole_radius", c.acpf.hole_radius);
  line("acpf.seed", std::to_string(c.acpf.seed));
  for (const PointSupport& p : c.point_supports)
    line("support.point", fmt17(p.x) + " " + fmt17(p.y) + " " +
                              (p.fix_x ? (p.fix_y ? "xy" : "x") : "y"));
  for (const EdgeSupport& e : c.edge_supports)
    line("support.edge", std::string(1, e.axis) + "=" + fmt17(e.value) + " " +
                             (e.fix_x ? (e.fix_y ? "xy" : "x") : "y"));
  for (const PointForce& p : c.point_forces)
    line("load.point",
         fmt17(p.x) + " " + fmt17(p.y) + " " + fmt17(p.fx) + " " + fmt17(p.fy));
  for (const EdgeTraction& t : c.edge_tractions)
    line("load.edge", std::string(1, t.axis) + "=" + fmt17(t.value) + " " + fmt17(t.lo) +
                          " " + fmt17(t.hi) + " " + fmt17(t.tx) + " " + fmt17(t.ty));
  line("output.dir", c.output.dir);
  if (!c.output.snapshots.empty()) {
    std::string v;
    for (size_t i = 0; i < c.output.snapshots.size(); ++i)
      v += (i ? " " : "") + fmt17(c.output.snapshots[i]);
    line("output.snapshots", v);
  }
  {
    std::string v;
    for (size_t i = 0; i < c.output.betas.size(); ++i)
      v += (i ? " " : "") + fmt17(c.output.betas[i]);
    line("output.betas", v);
  }
  booll("output.vtk", c.output.vtk);
  booll("output.pgm", c.output.pgm);
  if (!c.sweep_density.empty()) line("sweep.density", c.sweep_density);
  return s;
}

}  // namespace vtorch
