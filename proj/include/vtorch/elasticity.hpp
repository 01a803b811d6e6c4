#pragma once

#include <functional>
#include <vector>

#include "vtorch/mesh.hpp"
#include "vtorch/symlin.hpp"

namespace vtorch {

enum class PlaneModel { plane_stress, plane_strain };

struct Material {
  double E = 1;
  double nu = 0;
  PlaneModel model = PlaneModel::plane_stress;
};

inline Mat3 elastic_moduli(const Material& mat) {
  if (!(mat.E > 0) || !(mat.nu > -1) || !(mat.nu < 0.5))
    throw ValidationError("material constants out of range");
  Mat3 C = Mat3::Zero();
  if (mat.model == PlaneModel::plane_stress) {
    const double f = mat.E / (1 - mat.nu * mat.nu);
    C(0, 0) = C(1, 1) = f;
    C(0, 1) = C(1, 0) = f * mat.nu;
    C(2, 2) = f * (1 - mat.nu) / 2;
  } else {
    const double f = mat.E / ((1 + mat.nu) * (1 - 2 * mat.nu));
    C(0, 0) = C(1, 1) = f * (1 - mat.nu);
    C(0, 1) = C(1, 0) = f * mat.nu;
    C(2, 2) = f * (1 - 2 * mat.nu) / 2;
  }
  return C;
}

// W = 1/2 eps : C : eps with engineering shear in the Voigt strain.
inline double stored_energy_density(const Vec3& strain, const Mat3& C) {
  return 0.5 * strain.dot(C * strain);
}

struct PointLoad {
  int node = 0;
  Vec2 force = Vec2::Zero();  // N
};

struct TractionEdge {
  std::array<int, 2> nodes{};
  Vec2 traction = Vec2::Zero();  // N/mm along the edge
};

struct Dirichlet {
  int node = 0;
  int comp = 0;  // 0 = u_x, 1 = u_y
  double value = 0;
};

struct LoadCase {
  std::vector<PointLoad> point_loads;
  std::vector<TractionEdge> traction_edges;
  std::vector<Dirichlet> dirichlet;
};

// Density at a quadrature point of an element, however the caller stores it.
using DensityEval = std::function<double(int elem, int qp)>;

inline DensityEval uniform_density(double v) {
  return [v](int, int) { return v; };
}

inline DensityEval element_density(std::vector<double> rho) {
  return [rho = std::move(rho)](int e, int) { return rho[e]; };
}

inline DensityEval nodal_density(const Mesh& mesh, std::vector<double> rho) {
  const QuadratureRule& qr = quadrature_rule();
  std::array<std::array<double, 4>, 4> N;
  for (int q = 0; q < 4; ++q) N[q] = shape_eval(qr.points[q].x(), qr.points[q].y()).N;
  return [&mesh, rho = std::move(rho), N](int e, int q) {
    const auto& en = mesh.elements[e];
    double v = 0;
    for (int a = 0; a < 4; ++a) v += N[q][a] * rho[en[a]];
    return v;
  };
}

// Strain-displacement matrix (Voigt, engineering shear) from physical shape
// gradients; columns ordered (u_x^a, u_y^a) per node.
inline Eigen::Matrix<double, 3, 8> strain_matrix(const std::array<Vec2, 4>& grad) {
  Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
  for (int a = 0; a < 4; ++a) {
    B(0, 2 * a) = grad[a].x();
    B(1, 2 * a + 1) = grad[a].y();
    B(2, 2 * a) = grad[a].y();
    B(2, 2 * a + 1) = grad[a].x();
  }
  return B;
}

inline Eigen::Matrix<double, 8, 8> element_stiffness(const Mesh& mesh, int e, const Mat3& C,
                                                     const std::array<double, 4>& rho_qp) {
  const QuadratureRule& qr = quadrature_rule();
  Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
  for (int q = 0; q < 4; ++q) {
    const ShapeEval s = shape_eval(qr.points[q].x(), qr.points[q].y());
    Mat2 J = Mat2::Zero();
    for (int a = 0; a < 4; ++a) J += mesh.node_coords[mesh.elements[e][a]] * s.dN[a].transpose();
    const Mat2 Jit = J.inverse().transpose();
    std::array<Vec2, 4> grad;
    for (int a = 0; a < 4; ++a) grad[a] = Jit * s.dN[a];
    const Eigen::Matrix<double, 3, 8> B = strain_matrix(grad);
    K += (qr.weights[q] * J.determinant() * rho_qp[q]) * (B.transpose() * C * B);
  }
  return K;
}

inline SymSparse assemble_stiffness(const Mesh& mesh, const Mat3& C, const DensityEval& rho) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(mesh.n_elements()) * 64);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    std::array<double, 4> rq;
    for (int q = 0; q < 4; ++q) rq[q] = rho(e, q);
    const Eigen::Matrix<double, 8, 8> K = element_stiffness(mesh, e, C, rq);
    const auto& en = mesh.elements[e];
    for (int a = 0; a < 4; ++a)
      for (int i = 0; i < 2; ++i)
        for (int b = 0; b < 4; ++b)
          for (int j = 0; j < 2; ++j)
            trips.emplace_back(2 * en[a] + i, 2 * en[b] + j, K(2 * a + i, 2 * b + j));
  }
  return assemble(2 * mesh.n_nodes(), trips);
}

// Point loads plus consistent (trapezoidal) lumping of constant edge tractions.
inline Eigen::VectorXd build_force_vector(const Mesh& mesh, const LoadCase& loads) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * mesh.n_nodes());
  for (const PointLoad& p : loads.point_loads) {
    f[2 * p.node] += p.force.x();
    f[2 * p.node + 1] += p.force.y();
  }
  for (const TractionEdge& t : loads.traction_edges) {
    const double len = (mesh.node_coords[t.nodes[1]] - mesh.node_coords[t.nodes[0]]).norm();
    for (int k = 0; k < 2; ++k) {
      f[2 * t.nodes[k]] += 0.5 * len * t.traction.x();
      f[2 * t.nodes[k] + 1] += 0.5 * len * t.traction.y();
    }
  }
  return f;
}

inline DofLayout displacement_layout(const Mesh& mesh, const LoadCase& loads) {
  DofLayout layout;
  layout.n_dofs = 2 * mesh.n_nodes();
  layout.dofs_per_node = 2;
  for (const Dirichlet& d : loads.dirichlet) layout.constrain(layout.dof(d.node, d.comp), d.value);
  layout.finalize();
  return layout;
}

inline Eigen::VectorXd solve_equilibrium(const Mesh& mesh, const Material& mat,
                                         const LoadCase& loads, const DensityEval& rho) {
  SymSparse K = assemble_stiffness(mesh, elastic_moduli(mat), rho);
  Eigen::VectorXd f = build_force_vector(mesh, loads);
  apply_dirichlet(K, f, displacement_layout(mesh, loads));
  return solve_sym(K, f);
}

// V = int W(eps(u)) rho dV - f . u  (potential of the loaded, density-scaled body).
inline double potential_energy(const Mesh& mesh, const Material& mat, const LoadCase& loads,
                               const DensityEval& rho, const Eigen::VectorXd& u) {
  const Mat3 C = elastic_moduli(mat);
  const auto geo = precompute_qp_geometry(mesh);
  double stored = 0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& en = mesh.elements[e];
    Eigen::Matrix<double, 8, 1> ue;
    for (int a = 0; a < 4; ++a) {
      ue[2 * a] = u[2 * en[a]];
      ue[2 * a + 1] = u[2 * en[a] + 1];
    }
    for (int q = 0; q < 4; ++q) {
      const QpGeom& g = geo[e][q];
      const Vec3 eps = strain_matrix(g.grad) * ue;
      stored += g.wdetJ * rho(e, q) * stored_energy_density(eps, C);
    }
  }
  return stored - build_force_vector(mesh, loads).dot(u);
}

// Repeated equilibrium solves against changing densities (SIMP, ACPF,
// threshold sweeps): pattern, force vector and symbolic factorization are
// built once.
class EquilibriumSolver {
 public:
  EquilibriumSolver(const Mesh& mesh, const Material& mat, const LoadCase& loads)
      : mesh_(mesh),
        C_(elastic_moduli(mat)),
        layout_(displacement_layout(mesh, loads)),
        geo_(precompute_qp_geometry(mesh)),
        f_full_(build_force_vector(mesh, loads)) {
    std::vector<std::vector<int>> edofs(mesh.n_elements());
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const auto& en = mesh.elements[e];
      edofs[e] = {2 * en[0], 2 * en[0] + 1, 2 * en[1], 2 * en[1] + 1,
                  2 * en[2], 2 * en[2] + 1, 2 * en[3], 2 * en[3] + 1};
    }
    pat_ = ReducedPattern(layout_, std::move(edofs));
    u_.resize(layout_.n_dofs);
  }

  const Eigen::VectorXd& solve(const DensityEval& rho) {
    pat_.begin();
    for (int d = 0; d < layout_.n_dofs; ++d) pat_.add_rhs(d, f_full_[d]);
    Eigen::Matrix<double, 8, 8> K;
    for (int e = 0; e < mesh_.n_elements(); ++e) {
      K.setZero();
      for (int q = 0; q < 4; ++q) {
        const QpGeom& g = geo_[e][q];
        const Eigen::Matrix<double, 3, 8> B = strain_matrix(g.grad);
        K += (g.wdetJ * rho(e, q)) * (B.transpose() * C_ * B);
      }
      pat_.add(e, K);
    }
    pat_.finish();
    solver_.factorize(pat_.matrix());
    const Eigen::VectorXd uf = solver_.solve(pat_.matrix(), pat_.rhs());
    for (const auto& [d, v] : layout_.constraints) u_[d] = v;
    pat_.scatter_free(uf, u_);
    return u_;
  }

  double compliance() const { return f_full_.dot(u_); }
  const Eigen::VectorXd& force() const { return f_full_; }
  const Eigen::VectorXd& displacement() const { return u_; }
  const std::vector<std::array<QpGeom, 4>>& geometry() const { return geo_; }
  double asymmetry_ratio() const { return pat_.asymmetry_ratio(); }

 private:
  const Mesh& mesh_;
  Mat3 C_;
  DofLayout layout_;
  ReducedPattern pat_;
  SymSolver solver_;
  std::vector<std::array<QpGeom, 4>> geo_;
  Eigen::VectorXd f_full_, u_;
};

}  // namespace vtorch
