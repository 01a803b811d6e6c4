#pragma once

#include <filesystem>
#include <iostream>

#include "vtorch/config.hpp"

namespace vtorch {

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace detail {

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

inline std::string join(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace detail

inline VtkFields state_fields(const Mesh& mesh, const State& s, const Reparam& rp) {
  const int n = mesh.n_nodes();
  std::vector<double> rho(n), theta(n), mu(n);
  for (int i = 0; i < n; ++i) {
    rho[i] = logistic(s.theta[i], rp).rho;
    theta[i] = s.theta[i];
    mu[i] = s.mu[i];
  }
  VtkFields f;
  f.point_scalars = {{"rho", std::move(rho)}, {"theta", std::move(theta)},
                     {"mu", std::move(mu)}};
  f.point_vectors = {{"displacement", s.u}};
  return f;
}

struct RunArtifacts {
  History history;
  DensityField density;
  std::string out_dir;
};

// Runs one configuration end to end and writes history, density field,
// manifest, and the requested images.
inline RunArtifacts execute_run(const RunConfig& cfg) {
  ResolvedProblem rp = resolve(cfg);
  const std::string& dir = cfg.output.dir;
  detail::ensure_dir(dir);

  RunArtifacts art;
  art.out_dir = dir;

  if (cfg.method == "vtorch") {
    FlowSolver solver(rp.mesh, rp.mat, rp.loads, rp.params);
    RunOptions opts;
    opts.snapshots = cfg.output.snapshots;
    int snap = 0;
    opts.on_snapshot = [&](const State& s) {
      ++snap;
      if (!cfg.output.vtk) return;
      char name[32];
      std::snprintf(name, sizeof(name), "snapshot_%04d.vtk", snap);
      export_vtk(rp.mesh, state_fields(rp.mesh, s, rp.params.reparam),
                 detail::join(dir, name));
    };
    RunResult rr = solver.run(opts);
    art.history = std::move(rr.history);
    art.density.kind = DensityField::Kind::nodal;
    art.density.values.resize(rp.mesh.n_nodes());
    for (int i = 0; i < rp.mesh.n_nodes(); ++i)
      art.density.values[i] = logistic(rr.state.theta[i], rp.params.reparam).rho;
    if (cfg.output.vtk)
      export_vtk(rp.mesh, state_fields(rp.mesh, rr.state, rp.params.reparam),
                 detail::join(dir, "final.vtk"));
  } else if (cfg.method == "simp") {
    SimpResult sr = simp_run(rp.mesh, rp.mat, rp.loads, cfg.alpha, rp.simp);
    art.history = std::move(sr.history);
    art.density.kind = DensityField::Kind::element;
    art.density.values = std::move(sr.rho);
    if (cfg.output.vtk) {
      VtkFields f;
      f.cell_scalars = {{"rho", art.density.values}};
      f.point_scalars = {{"rho_nodal", nodal_from_elements(rp.mesh, art.density.values)}};
      export_vtk(rp.mesh, f, detail::join(dir, "final.vtk"));
    }
  } else {
    AcpfResult ar = acpf_run(rp.mesh, rp.mat, rp.loads, cfg.alpha, rp.acpf);
    art.history = std::move(ar.history);
    art.density.kind = DensityField::Kind::nodal;
    art.density.values.assign(ar.phi.data(), ar.phi.data() + ar.phi.size());
    if (cfg.output.vtk) {
      VtkFields f;
      f.point_scalars = {{"rho", art.density.values}};
      export_vtk(rp.mesh, f, detail::join(dir, "final.vtk"));
    }
  }

  export_csv(art.history, detail::join(dir, "history.csv"));
  save_density_field(art.density, detail::join(dir, "density.field"));
  if (cfg.output.pgm) export_pgm(rp.mesh, art.density, detail::join(dir, "final.pgm"));

  RunConfig manifest = rp.manifest;
  manifest.sweep_density = detail::join(dir, "density.field");
  detail::write_text_file(detail::join(dir, "manifest.cfg"), serialize_config(manifest));
  return art;
}

inline std::string sweep_csv(const ThresholdReport& rep) {
  std::string s = "beta,V,V_normalized,area\n";
  for (const ThresholdRow& r : rep.rows)
    s += detail::fmt17(r.beta) + "," + detail::fmt17(r.V) + "," +
         detail::fmt17(r.V_normalized) + "," + detail::fmt17(r.area) + "\n";
  return s;
}

inline ThresholdReport execute_sweep(const RunConfig& cfg) {
  if (cfg.sweep_density.empty())
    throw ValidationError("sweep.density must point at a saved density field");
  ResolvedProblem rp = resolve(cfg);
  const DensityField field = load_density_field(cfg.sweep_density);
  ThresholdReport rep = threshold_sweep(rp.mesh, rp.mat, rp.loads, field, cfg.output.betas);
  detail::ensure_dir(cfg.output.dir);
  detail::write_text_file(detail::join(cfg.output.dir, "sweep.csv"), sweep_csv(rep));
  return rep;
}

inline std::string execute_compare(const std::vector<RunConfig>& cfgs,
                                   const std::string& out_path) {
  std::string csv = "method,steps,final_V,final_alpha\n";
  for (const RunConfig& cfg : cfgs) {
    const RunArtifacts art = execute_run(cfg);
    if (art.history.empty()) throw ValidationError("run produced an empty history");
    const HistoryRow& last = art.history.back();
    csv += cfg.method + "," + std::to_string(art.history.size()) + "," +
           detail::fmt17(last.V) + "," + detail::fmt17(last.alpha) + "\n";
  }
  detail::write_text_file(out_path, csv);
  return csv;
}

}  // namespace vtorch
