#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "vtorch/vtorch.hpp"

namespace vtorch {

// ---------------------------------------------------------------------------
// SIMP with sensitivity filtering and optimality-criteria updates.
// ---------------------------------------------------------------------------

struct SimpConfig {
  double p = 3;           // penalization exponent
  double r_b = 0;         // filter radius (mm); <= 0 disables filtering
  double move = 0.2;      // OC move limit
  double oc_eta = 0.5;    // OC damping exponent
  double E_min = 0;       // void stiffness floor (MPa); 0 -> 1e-9 * E
  double rho_min = 1e-3;  // lower density bound
  int max_iters = 200;
  double change_tol = 0.01;
};

struct SimpResult {
  std::vector<double> rho;  // element densities
  History history;          // t = iterate index, dt = 1, M_eps = 0
};

// Classic sensitivity filter: weighted mean over elements whose centroids lie
// within r_b, weights r_b - distance.
inline std::vector<double> simp_filter(const Mesh& mesh, const std::vector<double>& sens,
                                       const std::vector<double>& rho, double r_b) {
  if (r_b < 0) throw ValidationError("filter radius must be nonnegative");
  if (r_b == 0) return sens;
  const int nx = mesh.nx, ny = mesh.ny;
  const double hx = mesh.hx(), hy = mesh.hy();
  const int wx = static_cast<int>(std::ceil(r_b / hx));
  const int wy = static_cast<int>(std::ceil(r_b / hy));
  std::vector<double> out(sens.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int e = j * nx + i;
      double num = 0, den = 0;
      for (int jj = std::max(0, j - wy); jj <= std::min(ny - 1, j + wy); ++jj)
        for (int ii = std::max(0, i - wx); ii <= std::min(nx - 1, i + wx); ++ii) {
          const double d = std::hypot((ii - i) * hx, (jj - j) * hy);
          if (d >= r_b) continue;
          const int k = jj * nx + ii;
          const double w = r_b - d;
          num += w * rho[k] * sens[k];
          den += w;
        }
      out[e] = num / (rho[e] * den);
    }
  return out;
}

namespace detail {

// Bisection on the volume multiplier; rho(lambda) is continuous, so the
// bracket always closes on the target volume.
inline std::vector<double> oc_update(const std::vector<double>& rho,
                                     const std::vector<double>& sens, double v_e,
                                     double target_volume, const SimpConfig& cfg) {
  const double total = v_e * static_cast<double>(rho.size());
  auto candidate = [&](double lambda, std::vector<double>& out) {
    double vol = 0;
    for (size_t e = 0; e < rho.size(); ++e) {
      const double B = -sens[e] / (lambda * v_e);
      double r = rho[e] * std::pow(std::max(B, 0.0), cfg.oc_eta);
      r = std::min(r, std::min(1.0, rho[e] + cfg.move));
      r = std::max(r, std::max(cfg.rho_min, rho[e] - cfg.move));
      out[e] = r;
      vol += r * v_e;
    }
    return vol;
  };
  std::vector<double> out(rho.size());
  double l1 = 1e-30, l2 = 1e30;
  for (int it = 0; it < 200; ++it) {
    const double lmid = std::sqrt(l1 * l2);
    const double vol = candidate(lmid, out);
    if (std::abs(vol - target_volume) <= 1e-10 * total) return out;
    (vol > target_volume ? l1 : l2) = lmid;
  }
  throw NoConvergence("volume bisection failed to reach 1e-10 relative tolerance");
}

}  // namespace detail

inline SimpResult simp_run(const Mesh& mesh, const Material& mat, const LoadCase& loads,
                           double alpha, const SimpConfig& cfg) {
  if (!(alpha > 0) || !(alpha > cfg.rho_min) || alpha > 1)
    throw ValidationError("alpha must lie in (rho_min, 1]");
  const double E_min = cfg.E_min > 0 ? cfg.E_min : 1e-9 * mat.E;
  const double v_e = mesh.hx() * mesh.hy();
  const double target = alpha * mesh.area();
  const int ne = mesh.n_elements();

  EquilibriumSolver solver(mesh, mat, loads);
  Material unit = mat;
  unit.E = 1;
  const Eigen::Matrix<double, 8, 8> k_unit =
      element_stiffness(mesh, 0, elastic_moduli(unit), {1.0, 1.0, 1.0, 1.0});

  SimpResult res;
  res.rho.assign(ne, alpha);
  std::vector<double> sens(ne);
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const std::vector<double>& rho = res.rho;
    const Eigen::VectorXd& u = solver.solve([&](int e, int) {
      return (E_min + std::pow(rho[e], cfg.p) * (mat.E - E_min)) / mat.E;
    });
    const double compliance = solver.compliance();
    for (int e = 0; e < ne; ++e) {
      Eigen::Matrix<double, 8, 1> ue;
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 2; ++c) ue[2 * a + c] = u[2 * mesh.elements[e][a] + c];
      sens[e] = -cfg.p * std::pow(rho[e], cfg.p - 1) * (mat.E - E_min) *
                ue.dot(k_unit * ue);
    }
    const std::vector<double> filtered = simp_filter(mesh, sens, rho, cfg.r_b);
    std::vector<double> next = detail::oc_update(rho, filtered, v_e, target, cfg);

    double change = 0, vol = 0;
    for (int e = 0; e < ne; ++e) {
      change = std::max(change, std::abs(next[e] - rho[e]));
      vol += next[e] * v_e;
    }
    res.rho = std::move(next);

    HistoryRow row;
    row.t = iter;
    row.dt = 1;
    row.V = -0.5 * compliance;
    row.M_eps = 0;
    row.G_eps = row.V;
    row.alpha = vol / mesh.area();
    row.newton_iters = 1;
    res.history.push_back(row);
    if (change <= cfg.change_tol) break;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Allen-Cahn phase-field baseline: semi-implicit reaction-diffusion flow with
// penalty volume control. Needs a hole-seeded start; it cannot nucleate.
// ---------------------------------------------------------------------------

struct AcpfConfig {
  double kappa = 0.1;  // diffusivity (mm^2/s)
  double eta = 60;     // sensitivity scaling (mm^3/s)
  double chi = 20;     // volume penalty (N/mm^5)
  double dt = 0;       // 0 -> 1e-3 * T_end
  double T_end = 1;
  double rho_min = 1e-3;
  double p = 3;          // stiffness interpolation exponent
  int holes_x = 9;       // hole grid
  int holes_y = 3;
  double hole_radius = 0;  // 0 -> 0.3 * min hole spacing
  unsigned seed = 0;       // recorded for reproducibility of the seeding layout
};

struct AcpfResult {
  Eigen::VectorXd phi;  // nodal phase field
  History history;
};

// Uniform field minus a regular grid of circular holes, with the solid level
// chosen so the initial volume hits alpha * |Omega| exactly.
inline Eigen::VectorXd acpf_seed_holes(const Mesh& mesh, double alpha, const AcpfConfig& cfg) {
  const int n = mesh.n_nodes();
  const double sx = mesh.width / cfg.holes_x, sy = mesh.height / cfg.holes_y;
  const double r = cfg.hole_radius > 0 ? cfg.hole_radius : 0.3 * std::min(sx, sy);
  Eigen::VectorXd ind = Eigen::VectorXd::Ones(n);
  for (int node = 0; node < n; ++node) {
    const Vec2& x = mesh.node_coords[node];
    const int ci = std::min(cfg.holes_x - 1, std::max(0, static_cast<int>(x.x() / sx)));
    const int cj = std::min(cfg.holes_y - 1, std::max(0, static_cast<int>(x.y() / sy)));
    const Vec2 center((ci + 0.5) * sx, (cj + 0.5) * sy);
    if ((x - center).norm() < r) ind[node] = 0;
  }
  const auto geo = precompute_qp_geometry(mesh);
  double I = 0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int q = 0; q < 4; ++q) {
      const QpGeom& g = geo[e][q];
      double v = 0;
      for (int a = 0; a < 4; ++a) v += g.N[a] * ind[mesh.elements[e][a]];
      I += g.wdetJ * v;
    }
  if (I <= 0) throw ValidationError("hole seeding removed the whole domain");
  const double c = cfg.rho_min + (alpha - cfg.rho_min) * mesh.area() / I;
  if (c > 1)
    throw ValidationError("hole grid too dense for the requested volume fraction");
  return (cfg.rho_min + (c - cfg.rho_min) * ind.array()).matrix();
}

inline double acpf_lambda_update(double lambda, double volume, double target, double chi) {
  return lambda + chi * (volume - target);
}

// Implicit-diffusion operator (M_L/dt + kappa*L) with lumped mass, factorized
// once; reaction enters explicitly through the right-hand side.
class AcpfStepper {
 public:
  AcpfStepper(const Mesh& mesh, double kappa, double dt) : dt_(dt) {
    const int n = mesh.n_nodes();
    const auto geo = precompute_qp_geometry(mesh);
    mass_ = Eigen::VectorXd::Zero(n);
    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(mesh.n_elements()) * 16);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& en = mesh.elements[e];
      for (int q = 0; q < 4; ++q) {
        const QpGeom& g = geo[e][q];
        for (int a = 0; a < 4; ++a) {
          mass_[en[a]] += g.wdetJ * g.N[a];
          for (int b = 0; b < 4; ++b)
            trips.emplace_back(en[a], en[b], g.wdetJ * kappa * g.grad[a].dot(g.grad[b]));
        }
      }
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, mass_[i] / dt_);
    sys_ = assemble(n, trips);
    solver_.factorize(sys_);
  }

  const Eigen::VectorXd& lumped_mass() const { return mass_; }

  Eigen::VectorXd step(const Eigen::VectorXd& phi, const Eigen::VectorXd& reaction) {
    const Eigen::VectorXd rhs = mass_.cwiseProduct(phi / dt_ - reaction);
    return solver_.solve(sys_, rhs);
  }

 private:
  double dt_;
  Eigen::VectorXd mass_;
  SymSparse sys_;
  SymSolver solver_;
};

inline AcpfResult acpf_run(const Mesh& mesh, const Material& mat, const LoadCase& loads,
                           double alpha, const AcpfConfig& cfg) {
  if (!(alpha > cfg.rho_min) || !(alpha < 1)) throw ValidationError("alpha out of range");
  if (!(cfg.kappa > 0) || !(cfg.T_end > 0)) throw ValidationError("kappa, T_end must be positive");
  const double dt = cfg.dt > 0 ? cfg.dt : 1e-3 * cfg.T_end;
  const int nsteps = static_cast<int>(std::llround(cfg.T_end / dt));
  const double E_min = 1e-9 * mat.E;
  const double target = alpha * mesh.area();
  const int ne = mesh.n_elements();

  EquilibriumSolver solver(mesh, mat, loads);
  Material unit = mat;
  unit.E = 1;
  const Eigen::Matrix<double, 8, 8> k_unit =
      element_stiffness(mesh, 0, elastic_moduli(unit), {1.0, 1.0, 1.0, 1.0});
  const double v_e = mesh.hx() * mesh.hy();
  AcpfStepper stepper(mesh, cfg.kappa, dt);
  const Eigen::VectorXd& mvec = stepper.lumped_mass();

  AcpfResult res;
  res.phi = acpf_seed_holes(mesh, alpha, cfg);
  const QuadratureRule& qr = quadrature_rule();
  std::array<std::array<double, 4>, 4> Nq;
  for (int q = 0; q < 4; ++q) Nq[q] = shape_eval(qr.points[q].x(), qr.points[q].y()).N;

  double lambda = 0;
  bool lambda_primed = false;
  for (int step = 1; step <= nsteps; ++step) {
    const Eigen::VectorXd& phi = res.phi;
    const Eigen::VectorXd& u = solver.solve([&](int e, int q) {
      double v = 0;
      for (int a = 0; a < 4; ++a) v += Nq[q][a] * phi[mesh.elements[e][a]];
      return (E_min + std::pow(v, cfg.p) * (mat.E - E_min)) / mat.E;
    });
    const double compliance = solver.compliance();

    // Elementwise energy-density sensitivity, lumped to nodes.
    Eigen::VectorXd s = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (int e = 0; e < ne; ++e) {
      const auto& en = mesh.elements[e];
      Eigen::Matrix<double, 8, 1> ue;
      double pbar = 0;
      for (int a = 0; a < 4; ++a) {
        pbar += 0.25 * phi[en[a]];
        for (int c = 0; c < 2; ++c) ue[2 * a + c] = u[2 * en[a] + c];
      }
      const double se = cfg.p * std::pow(pbar, cfg.p - 1) * (mat.E - E_min) *
                        ue.dot(k_unit * ue) / (2 * v_e);
      for (int a = 0; a < 4; ++a) s[en[a]] += (v_e / 4) * se;
    }
    s = s.cwiseQuotient(mvec);

    // Start the multiplier where the initial volume is stationary; winding it
    // up from zero floods the design with material before the penalty update
    // catches up, breaking the volume envelope.
    if (!lambda_primed) {
      double acc = 0;
      for (int a = 0; a < mesh.n_nodes(); ++a) {
        const double f = phi[a];
        acc += mvec[a] * (cfg.eta * s[a] - 2 * f * (1 - f) * (1 - 2 * f));
      }
      lambda = acc / mesh.area();
      lambda_primed = true;
    }

    lambda = acpf_lambda_update(lambda, mvec.dot(phi), target, cfg.chi);
    Eigen::VectorXd reaction(mesh.n_nodes());
    for (int a = 0; a < mesh.n_nodes(); ++a) {
      const double f = phi[a];
      reaction[a] = 2 * f * (1 - f) * (1 - 2 * f) - cfg.eta * s[a] + lambda;
    }
    res.phi = stepper.step(phi, reaction);
    for (int a = 0; a < mesh.n_nodes(); ++a)
      res.phi[a] = std::min(1.0, std::max(cfg.rho_min, res.phi[a]));

    HistoryRow row;
    row.t = step * dt;
    row.dt = dt;
    row.V = -0.5 * compliance;
    row.M_eps = 0;
    row.G_eps = row.V;
    row.alpha = mvec.dot(res.phi) / mesh.area();
    row.newton_iters = 1;
    res.history.push_back(row);
  }
  return res;
}

}  // namespace vtorch
