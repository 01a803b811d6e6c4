#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vtorch/baselines.hpp"

namespace vtorch {

// Density field as stored on disk and consumed by threshold sweeps. Nodal
// fields come from VTORCH/ACPF, element fields from SIMP.
struct DensityField {
  enum class Kind { nodal, element };
  Kind kind = Kind::nodal;
  std::vector<double> values;
};

inline std::vector<double> default_betas() {
  return {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999};
}

template <typename Vec>
std::vector<double> threshold_density(const Vec& rho, double beta) {
  if (!(beta >= 0.5) || !(beta < 1)) throw ValidationError("beta must lie in [0.5, 1)");
  std::vector<double> out(rho.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = rho[i] >= beta ? 1.0 : 1e-5;
  return out;
}

inline double normalized_area(const Mesh& mesh, const DensityField& rho) {
  double acc = 0;
  if (rho.kind == DensityField::Kind::element) {
    const double v_e = mesh.hx() * mesh.hy();
    for (double r : rho.values) acc += r * v_e;
  } else {
    const auto geo = precompute_qp_geometry(mesh);
    for (int e = 0; e < mesh.n_elements(); ++e)
      for (int q = 0; q < 4; ++q) {
        const QpGeom& g = geo[e][q];
        double v = 0;
        for (int a = 0; a < 4; ++a) v += g.N[a] * rho.values[mesh.elements[e][a]];
        acc += g.wdetJ * v;
      }
  }
  return acc / mesh.area();
}

inline double normalized_area(const Mesh& mesh, const Eigen::VectorXd& theta,
                              const Reparam& rp) {
  DensityField f;
  f.values.resize(theta.size());
  for (int i = 0; i < theta.size(); ++i) f.values[i] = logistic(theta[i], rp).rho;
  return normalized_area(mesh, f);
}

struct ThresholdRow {
  double beta = 0;
  double V = 0;
  double V_normalized = 0;
  double area = 0;
};

struct ThresholdReport {
  std::vector<ThresholdRow> rows;
  double V_ref = 0;  // the beta = 0.5 potential energy the rows are scaled by
};

// Re-solve the equilibrium on each thresholded structure. v_ref = 0 means
// self-normalization against this sweep's beta = 0.5 entry.
inline ThresholdReport threshold_sweep(const Mesh& mesh, const Material& mat,
                                       const LoadCase& loads, const DensityField& rho,
                                       const std::vector<double>& betas, double v_ref = 0) {
  if (betas.empty()) throw ValidationError("beta grid is empty");
  for (size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] >= 0.5) || !(betas[i] < 1))
      throw ValidationError("beta must lie in [0.5, 1)");
    if (i > 0 && !(betas[i] > betas[i - 1]))
      throw ValidationError("beta grid must be strictly increasing");
  }
  const bool elementwise = rho.kind == DensityField::Kind::element;
  if (elementwise ? static_cast<int>(rho.values.size()) != mesh.n_elements()
                  : static_cast<int>(rho.values.size()) != mesh.n_nodes())
    throw ValidationError("density field size does not match the mesh");

  const QuadratureRule& qr = quadrature_rule();
  std::array<std::array<double, 4>, 4> Nq;
  for (int q = 0; q < 4; ++q) Nq[q] = shape_eval(qr.points[q].x(), qr.points[q].y()).N;

  EquilibriumSolver solver(mesh, mat, loads);
  ThresholdReport rep;
  for (double beta : betas) {
    const std::vector<double> tb = threshold_density(rho.values, beta);
    DensityField fb{rho.kind, tb};
    if (elementwise)
      solver.solve([&](int e, int) { return tb[e]; });
    else
      solver.solve([&](int e, int q) {
        double v = 0;
        for (int a = 0; a < 4; ++a) v += Nq[q][a] * tb[mesh.elements[e][a]];
        return v;
      });
    ThresholdRow row;
    row.beta = beta;
    row.V = -0.5 * solver.compliance();
    row.area = normalized_area(mesh, fb);
    rep.rows.push_back(row);
  }
  rep.V_ref = v_ref != 0 ? v_ref : rep.rows.front().V;
  for (ThresholdRow& row : rep.rows) row.V_normalized = row.V / rep.V_ref;
  return rep;
}

// Area-weighted projection of element values onto nodes (for imaging SIMP
// results; mass in SIMP is defined elementwise).
inline std::vector<double> nodal_from_elements(const Mesh& mesh,
                                               const std::vector<double>& evals) {
  std::vector<double> num(mesh.n_nodes(), 0.0), den(mesh.n_nodes(), 0.0);
  const double v_e = mesh.hx() * mesh.hy();
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int a = 0; a < 4; ++a) {
      num[mesh.elements[e][a]] += v_e * evals[e];
      den[mesh.elements[e][a]] += v_e;
    }
  for (int i = 0; i < mesh.n_nodes(); ++i) num[i] /= den[i];
  return num;
}

// ---------------------------------------------------------------------------
// Exports. All writers are byte-deterministic: fixed header text, %.17g
// floats, '\n' line ends.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  return f;
}

}  // namespace detail

inline std::string history_csv(const History& h) {
  std::string out = "t,dt,V,M_eps,G_eps,alpha,newton_iters\n";
  for (const HistoryRow& r : h) {
    out += detail::fmt17(r.t) + "," + detail::fmt17(r.dt) + "," + detail::fmt17(r.V) + "," +
           detail::fmt17(r.M_eps) + "," + detail::fmt17(r.G_eps) + "," +
           detail::fmt17(r.alpha) + "," + std::to_string(r.newton_iters) + "\n";
  }
  return out;
}

inline void export_csv(const History& h, const std::string& path) {
  auto f = detail::open_out(path);
  f << history_csv(h);
  if (!f) throw IoError("write failed: " + path);
}

inline History parse_history_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,dt,V,M_eps,G_eps,alpha,newton_iters")
    throw ParseError("bad history header");
  History h;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    HistoryRow r;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    if (!(ls >> r.t >> r.dt >> r.V >> r.M_eps >> r.G_eps >> r.alpha >> r.newton_iters))
      throw ParseError("bad history row: " + line);
    h.push_back(r);
  }
  return h;
}

struct VtkFields {
  std::vector<std::pair<std::string, std::vector<double>>> point_scalars;
  std::vector<std::pair<std::string, Eigen::VectorXd>> point_vectors;  // 2n packed (x,y)
  std::vector<std::pair<std::string, std::vector<double>>> cell_scalars;
};

inline void export_vtk(const Mesh& mesh, const VtkFields& fields, const std::string& path) {
  auto f = detail::open_out(path);
  const int n = mesh.n_nodes(), ne = mesh.n_elements();
  f << "# vtk DataFile Version 3.0\n"
    << "density flow output\n"
    << "ASCII\n"
    << "DATASET UNSTRUCTURED_GRID\n"
    << "POINTS " << n << " double\n";
  for (const Vec2& x : mesh.node_coords)
    f << detail::fmt17(x.x()) << " " << detail::fmt17(x.y()) << " 0\n";
  f << "CELLS " << ne << " " << 5 * ne << "\n";
  for (const auto& e : mesh.elements)
    f << "4 " << e[0] << " " << e[1] << " " << e[2] << " " << e[3] << "\n";
  f << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) f << "9\n";
  if (!fields.point_scalars.empty() || !fields.point_vectors.empty()) {
    f << "POINT_DATA " << n << "\n";
    for (const auto& [name, vals] : fields.point_scalars) {
      if (static_cast<int>(vals.size()) != n) throw ValidationError("bad field size: " + name);
      f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : vals) f << detail::fmt17(v) << "\n";
    }
    for (const auto& [name, vals] : fields.point_vectors) {
      if (vals.size() != 2 * n) throw ValidationError("bad vector size: " + name);
      f << "VECTORS " << name << " double\n";
      for (int i = 0; i < n; ++i)
        f << detail::fmt17(vals[2 * i]) << " " << detail::fmt17(vals[2 * i + 1]) << " 0\n";
    }
  }
  if (!fields.cell_scalars.empty()) {
    f << "CELL_DATA " << ne << "\n";
    for (const auto& [name, vals] : fields.cell_scalars) {
      if (static_cast<int>(vals.size()) != ne) throw ValidationError("bad field size: " + name);
      f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : vals) f << detail::fmt17(v) << "\n";
    }
  }
  if (!f) throw IoError("write failed: " + path);
}

// One pixel per element, solid drawn dark, top row of the domain first.
inline void export_pgm(const Mesh& mesh, const DensityField& rho, const std::string& path) {
  std::vector<double> cell(mesh.n_elements());
  if (rho.kind == DensityField::Kind::element) {
    if (static_cast<int>(rho.values.size()) != mesh.n_elements())
      throw ValidationError("density field size does not match the mesh");
    cell = rho.values;
  } else {
    if (static_cast<int>(rho.values.size()) != mesh.n_nodes())
      throw ValidationError("density field size does not match the mesh");
    for (int e = 0; e < mesh.n_elements(); ++e) {
      double v = 0;
      for (int a = 0; a < 4; ++a) v += 0.25 * rho.values[mesh.elements[e][a]];
      cell[e] = v;
    }
  }
  auto f = detail::open_out(path);
  f << "P2\n" << mesh.nx << " " << mesh.ny << "\n255\n";
  for (int j = mesh.ny - 1; j >= 0; --j) {
    for (int i = 0; i < mesh.nx; ++i) {
      const int px = static_cast<int>(std::lround(255 * (1 - cell[j * mesh.nx + i])));
      f << std::min(255, std::max(0, px));
      f << (i + 1 == mesh.nx ? "\n" : " ");
    }
  }
  if (!f) throw IoError("write failed: " + path);
}

inline void save_density_field(const DensityField& rho, const std::string& path) {
  auto f = detail::open_out(path);
  f << (rho.kind == DensityField::Kind::nodal ? "nodal " : "element ") << rho.values.size()
    << "\n";
  for (double v : rho.values) f << detail::fmt17(v) << "\n";
  if (!f) throw IoError("write failed: " + path);
}

inline DensityField load_density_field(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open for reading: " + path);
  std::string kind;
  size_t count = 0;
  if (!(f >> kind >> count) || (kind != "nodal" && kind != "element"))
    throw ParseError("bad density field header in " + path);
  DensityField out;
  out.kind = kind == "nodal" ? DensityField::Kind::nodal : DensityField::Kind::element;
  out.values.resize(count);
  for (size_t i = 0; i < count; ++i)
    if (!(f >> out.values[i])) throw ParseError("truncated density field in " + path);
  return out;
}

}  // namespace vtorch
