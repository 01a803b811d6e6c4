#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "vtorch/core.hpp"

namespace vtorch {

// Structured grid of bilinear quadrilaterals on [0,width] x [0,height].
// Nodes are numbered row-major from (0,0); elements counter-clockwise.
struct Mesh {
  double width = 0, height = 0, h = 0;
  int nx = 0, ny = 0;
  std::vector<Vec2> node_coords;
  std::vector<std::array<int, 4>> elements;

  int n_nodes() const { return static_cast<int>(node_coords.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int node_index(int i, int j) const { return j * (nx + 1) + i; }
  double hx() const { return width / nx; }
  double hy() const { return height / ny; }
  double area() const { return width * height; }
  double perimeter() const { return 2 * (width + height); }
};

inline Mesh build_rect_mesh(double width, double height, double h) {
  if (!(width > 0) || !(height > 0) || !(h > 0))
    throw NonConformingSize("mesh dimensions and element size must be positive");
  const double rx = width / h, ry = height / h;
  const double nxr = std::round(rx), nyr = std::round(ry);
  if (std::abs(rx - nxr) > 1e-9 || std::abs(ry - nyr) > 1e-9 || nxr < 1 || nyr < 1)
    throw NonConformingSize("width/h and height/h must be integers (got " +
                            std::to_string(rx) + " x " + std::to_string(ry) + ")");
  Mesh m;
  m.width = width;
  m.height = height;
  m.h = h;
  m.nx = static_cast<int>(nxr);
  m.ny = static_cast<int>(nyr);
  m.node_coords.reserve((m.nx + 1) * (m.ny + 1));
  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i)
      m.node_coords.emplace_back(i * width / m.nx, j * height / m.ny);
  m.elements.reserve(m.nx * m.ny);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      m.elements.push_back({m.node_index(i, j), m.node_index(i + 1, j),
                            m.node_index(i + 1, j + 1), m.node_index(i, j + 1)});
  return m;
}

struct QuadratureRule {
  std::array<Vec2, 4> points;
  std::array<double, 4> weights;
};

// 2x2 Gauss rule on the reference square; exact for bilinear products.
inline const QuadratureRule& quadrature_rule() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    const double g = 1.0 / std::sqrt(3.0);
    r.points = {Vec2(-g, -g), Vec2(g, -g), Vec2(g, g), Vec2(-g, g)};
    r.weights = {1.0, 1.0, 1.0, 1.0};
    return r;
  }();
  return rule;
}

struct ShapeEval {
  std::array<double, 4> N;
  std::array<Vec2, 4> dN;  // derivatives with respect to the local coordinates
};

inline ShapeEval shape_eval(double xi, double eta) {
  // Caller keeps (xi, eta) inside the reference square.
  static constexpr double xs[4] = {-1, 1, 1, -1};
  static constexpr double es[4] = {-1, -1, 1, 1};
  ShapeEval s;
  for (int a = 0; a < 4; ++a) {
    s.N[a] = 0.25 * (1 + xs[a] * xi) * (1 + es[a] * eta);
    s.dN[a] = Vec2(0.25 * xs[a] * (1 + es[a] * eta), 0.25 * es[a] * (1 + xs[a] * xi));
  }
  return s;
}

inline Vec2 map_to_physical(const Mesh& m, int e, double xi, double eta) {
  const ShapeEval s = shape_eval(xi, eta);
  Vec2 x = Vec2::Zero();
  for (int a = 0; a < 4; ++a) x += s.N[a] * m.node_coords[m.elements[e][a]];
  return x;
}

inline Mat2 jacobian(const Mesh& m, int e, double xi, double eta) {
  const ShapeEval s = shape_eval(xi, eta);
  Mat2 J = Mat2::Zero();
  for (int a = 0; a < 4; ++a) J += m.node_coords[m.elements[e][a]] * s.dN[a].transpose();
  return J;
}

// Per-quadrature-point geometry reused by every assembly loop.
struct QpGeom {
  double wdetJ = 0;
  Vec2 x = Vec2::Zero();
  std::array<double, 4> N{};
  std::array<Vec2, 4> grad{};  // shape gradients in physical coordinates
};

inline std::vector<std::array<QpGeom, 4>> precompute_qp_geometry(const Mesh& m) {
  const QuadratureRule& qr = quadrature_rule();
  std::vector<std::array<QpGeom, 4>> geo(m.n_elements());
  for (int e = 0; e < m.n_elements(); ++e) {
    for (int q = 0; q < 4; ++q) {
      const ShapeEval s = shape_eval(qr.points[q].x(), qr.points[q].y());
      Mat2 J = Mat2::Zero();
      Vec2 x = Vec2::Zero();
      for (int a = 0; a < 4; ++a) {
        const Vec2& xa = m.node_coords[m.elements[e][a]];
        J += xa * s.dN[a].transpose();
        x += s.N[a] * xa;
      }
      const double detJ = J.determinant();
      QpGeom& g = geo[e][q];
      g.wdetJ = qr.weights[q] * detJ;
      g.x = x;
      g.N = s.N;
      const Mat2 Jit = J.inverse().transpose();
      for (int a = 0; a < 4; ++a) g.grad[a] = Jit * s.dN[a];
    }
  }
  return geo;
}

// Node predicates with an absolute geometric tolerance in mm.
struct BoundarySelector {
  std::function<bool(const Vec2&)> pred;
  double tol = 0;
};

inline double boundary_tol(const Mesh& m) { return 1e-6 * m.h; }

inline BoundarySelector x_equals(double v, double tol) {
  return {[=](const Vec2& p) { return std::abs(p.x() - v) <= tol; }, tol};
}

inline BoundarySelector y_equals(double v, double tol) {
  return {[=](const Vec2& p) { return std::abs(p.y() - v) <= tol; }, tol};
}

inline BoundarySelector near_point(double x, double y, double tol) {
  return {[=](const Vec2& p) {
            return std::abs(p.x() - x) <= tol && std::abs(p.y() - y) <= tol;
          },
          tol};
}

// Segment of the vertical line x = v with y in [lo, hi].
inline BoundarySelector segment_x(double v, double lo, double hi, double tol) {
  return {[=](const Vec2& p) {
            return std::abs(p.x() - v) <= tol && p.y() >= lo - tol && p.y() <= hi + tol;
          },
          tol};
}

// Segment of the horizontal line y = v with x in [lo, hi].
inline BoundarySelector segment_y(double v, double lo, double hi, double tol) {
  return {[=](const Vec2& p) {
            return std::abs(p.y() - v) <= tol && p.x() >= lo - tol && p.x() <= hi + tol;
          },
          tol};
}

inline std::vector<int> select_boundary_nodes(const Mesh& m, const BoundarySelector& sel) {
  std::vector<int> out;
  auto test = [&](int i, int j) {
    const int n = m.node_index(i, j);
    if (sel.pred(m.node_coords[n])) out.push_back(n);
  };
  for (int i = 0; i <= m.nx; ++i) {
    test(i, 0);
    if (m.ny > 0) test(i, m.ny);
  }
  for (int j = 1; j < m.ny; ++j) {
    test(0, j);
    if (m.nx > 0) test(m.nx, j);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw EmptySelection("boundary predicate matched no node");
  return out;
}

// Boundary edges (consecutive node pairs along a side) whose endpoints both
// satisfy the predicate. Used to turn traction bands into edge lists.
inline std::vector<std::array<int, 2>> select_boundary_edges(const Mesh& m,
                                                             const BoundarySelector& sel) {
  std::vector<std::array<int, 2>> out;
  auto test = [&](int n0, int n1) {
    if (sel.pred(m.node_coords[n0]) && sel.pred(m.node_coords[n1]))
      out.push_back({n0, n1});
  };
  for (int i = 0; i < m.nx; ++i) {
    test(m.node_index(i, 0), m.node_index(i + 1, 0));
    test(m.node_index(i, m.ny), m.node_index(i + 1, m.ny));
  }
  for (int j = 0; j < m.ny; ++j) {
    test(m.node_index(0, j), m.node_index(0, j + 1));
    test(m.node_index(m.nx, j), m.node_index(m.nx, j + 1));
  }
  if (out.empty()) throw EmptySelection("boundary predicate matched no edge");
  return out;
}

}  // namespace vtorch
