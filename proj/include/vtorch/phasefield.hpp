#pragma once

#include <cmath>
#include <limits>

#include "vtorch/mesh.hpp"

namespace vtorch {

// Logistic bijection theta -> rho between the unconstrained pseudo-density
// and the physical density in (0,1).
struct Reparam {
  double k = 1;        // slope
  double rho_min = 0;  // density attained at theta = -1/2 when k is derived
};

// Slope making rho(+-1/2) hit {1 - rho_min, rho_min}.
inline double logistic_slope(double rho_min) {
  if (!(rho_min > 0) || !(rho_min < 0.5))
    throw ValidationError("rho_min must lie in (0, 1/2)");
  return 2 * std::log((1 - rho_min) / rho_min);
}

inline Reparam make_reparam(double rho_min) { return {logistic_slope(rho_min), rho_min}; }

template <class T>
struct Logistic3T {
  T rho = 0, d1 = 0, d2 = 0;
};
using Logistic3 = Logistic3T<double>;

template <class T = double>
Logistic3T<T> logistic(T theta, const Reparam& rp) {
  const T k = static_cast<T>(rp.k);
  const T t = k * theta;
  T rho;
  if (t >= 0) {
    const T e = std::exp(-t);
    rho = 1 / (1 + e);
  } else {
    const T e = std::exp(t);
    rho = e / (1 + e);
  }
  // Keep the image in the open interval even when exp() underflows.
  const T lo = std::numeric_limits<T>::min();
  const T hi = 1 - std::numeric_limits<T>::epsilon() / 2;
  rho = std::min(std::max(rho, lo), hi);
  Logistic3T<T> out;
  out.rho = rho;
  out.d1 = k * rho * (1 - rho);
  out.d2 = k * k * rho * (1 - rho) * (1 - 2 * rho);
  return out;
}

// Continuation schedule for the well half-separation.
struct WellSchedule {
  double dtheta0 = 0;
  double dthetaT = 0.5;
  double T = 1;
  bool enabled = true;
};

inline double well_separation(double t, const WellSchedule& ws) {
  if (!ws.enabled) return ws.dthetaT;
  return std::min((ws.dthetaT - ws.dtheta0) * t / ws.T, ws.dthetaT);
}

template <class T>
struct Well3T {
  T U = 0, d1 = 0, d2 = 0;
};
using Well3 = Well3T<double>;

// U(theta) = 2 (theta - dtheta)^2 (theta + dtheta)^2 = 2 (theta^2 - dtheta^2)^2.
template <class T = double>
Well3T<T> double_well(T theta, T dtheta) {
  const T d2 = dtheta * dtheta;
  const T g = theta * theta - d2;
  Well3T<T> w;
  w.U = 2 * g * g;
  w.d1 = 8 * theta * g;
  w.d2 = 8 * (3 * theta * theta - d2);
  return w;
}

// M_eps = gamma int [ U(theta)/eps + eps/2 |grad theta|^2 ] dV at the current
// well separation.
template <typename ThetaVec>
double modica_mortola(const Mesh& mesh, const std::vector<std::array<QpGeom, 4>>& geo,
                      const ThetaVec& theta, double gamma, double epsilon, double dtheta) {
  double acc = 0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& en = mesh.elements[e];
    for (int q = 0; q < 4; ++q) {
      const QpGeom& g = geo[e][q];
      double th = 0;
      Vec2 gth = Vec2::Zero();
      for (int a = 0; a < 4; ++a) {
        th += g.N[a] * theta[en[a]];
        gth += g.grad[a] * theta[en[a]];
      }
      acc += g.wdetJ * (double_well(th, dtheta).U / epsilon + 0.5 * epsilon * gth.squaredNorm());
    }
  }
  return gamma * acc;
}

template <typename ThetaVec>
double modica_mortola(const Mesh& mesh, const ThetaVec& theta, double gamma, double epsilon,
                      double dtheta) {
  return modica_mortola(mesh, precompute_qp_geometry(mesh), theta, gamma, epsilon, dtheta);
}

struct Kinetics {
  double kappa = 1;  // mobility
};

struct KineticEval {
  double psi = 0;
  Vec2 flux = Vec2::Zero();
};

inline KineticEval kinetic_flux(const Vec2& grad_mu, const Kinetics& kin) {
  return {0.5 * kin.kappa * grad_mu.squaredNorm(), kin.kappa * grad_mu};
}

}  // namespace vtorch
