#pragma once
// Independent oracles and small mesh builders shared by the test binaries. Nothing here
// calls into meshgen or the VEM kernels, so the tests compare two separate derivations.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "steklov/mesh.hpp"

namespace testing {

using steklov::BoundaryEdge;
using steklov::BoundaryMarker;
using steklov::Index;
using steklov::Point2;
using steklov::PolygonalMesh;

inline const double kSqrt2 = std::sqrt(2.0);

inline std::vector<Point2> unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

inline BoundaryMarker top_edge(Point2 a, Point2 b) {
  return a.y == 1.0 && b.y == 1.0 ? BoundaryMarker::Gamma0 : BoundaryMarker::Gamma1;
}
inline BoundaryMarker everywhere(Point2, Point2) { return BoundaryMarker::Gamma0; }

inline PolygonalMesh single_cell(std::vector<Point2> poly, steklov::MarkerRule rule = top_edge) {
  std::vector<Index> cyc(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) cyc[i] = static_cast<Index>(i);
  return steklov::build_mesh(std::move(poly), {cyc}, rule);
}

// n x m axis-aligned grid on [x0, x0+w] x [y0, y0+h], vertex (i, j) at index j (n + 1) + i
inline PolygonalMesh quad_grid(int n, int m, steklov::MarkerRule rule = top_edge, double w = 1.0, double h = 1.0) {
  std::vector<Point2> v;
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= n; ++i) v.push_back({i == n ? w : w * i / n, j == m ? h : h * j / m});
  std::vector<std::vector<Index>> cells;
  const auto id = [n](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return steklov::build_mesh(std::move(v), std::move(cells), rule);
}

// Same vertices and topology with every coordinate multiplied by s.
inline PolygonalMesh scaled(const PolygonalMesh& mesh, double s) {
  std::vector<Point2> v;
  for (Point2 p : mesh.vertices()) v.push_back(s * p);
  return steklov::build_mesh(v, mesh.cells(), mesh.boundary_edges());
}

// Adds a flat-angle vertex at distance t from the first endpoint of one domain-boundary
// edge of every cell that touches the boundary; the split boundary edge keeps its marker.
inline PolygonalMesh with_tiny_boundary_edges(const PolygonalMesh& mesh, double t) {
  std::vector<Point2> v = mesh.vertices();
  auto cells = mesh.cells();
  std::vector<BoundaryEdge> boundary;
  std::vector<bool> done(cells.size(), false);
  for (const auto& be : mesh.boundary_edges()) {
    // owning cell: the one whose cycle walks be.v[0] -> be.v[1]
    std::size_t owner = cells.size();
    std::size_t pos = 0;
    for (std::size_t c = 0; c < cells.size() && owner == cells.size(); ++c) {
      const auto& cyc = cells[c];
      for (std::size_t k = 0; k < cyc.size(); ++k)
        if (cyc[k] == be.v[0] && cyc[(k + 1) % cyc.size()] == be.v[1]) {
          owner = c;
          pos = k;
        }
    }
    if (owner == cells.size() || done[owner]) {
      boundary.push_back(be);
      continue;
    }
    done[owner] = true;
    const Point2 a = v[static_cast<std::size_t>(be.v[0])], b = v[static_cast<std::size_t>(be.v[1])];
    const Point2 p = a + (t / steklov::distance(a, b)) * (b - a);
    const auto id = static_cast<Index>(v.size());
    v.push_back(p);
    auto& cyc = cells[owner];
    cyc.insert(cyc.begin() + static_cast<std::ptrdiff_t>(pos) + 1, id);
    boundary.push_back({{be.v[0], id}, be.marker});
    boundary.push_back({{id, be.v[1]}, be.marker});
  }
  return steklov::build_mesh(std::move(v), std::move(cells), std::move(boundary));
}

// Linear finite element stiffness of a triangle from the cotangent formula.
inline Eigen::Matrix3d p1_stiffness(Point2 a, Point2 b, Point2 c) {
  const std::array<Point2, 3> p{a, b, c};
  Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, l = (i + 2) % 3;
    // angle at l is opposite edge (i, j)
    const Point2 u = p[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(l)];
    const Point2 w = p[static_cast<std::size_t>(j)] - p[static_cast<std::size_t>(l)];
    const double cot = steklov::dot(u, w) / std::abs(steklov::cross(u, w));
    k(i, j) -= 0.5 * cot;
    k(j, i) -= 0.5 * cot;
    k(i, i) += 0.5 * cot;
    k(j, j) += 0.5 * cot;
  }
  return k;
}

// Projection onto affine functions from its defining conditions, integrated with 5-point
// Gauss-Legendre on every edge: |K| grad p = int_{dK} w n, int_{dK} p = int_{dK} w.
// Returns (c0, c1, c2) with p = c0 + c1 x + c2 y.
inline Eigen::Vector3d projector_by_quadrature(const std::vector<Point2>& poly, const Eigen::VectorXd& w) {
  static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const std::size_t n = poly.size();
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) area += 0.5 * steklov::cross(poly[i], poly[(i + 1) % n]);
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(1, 1) = area;
  m(2, 2) = area;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % n];
    const double len = steklov::distance(a, b);
    const Point2 nrm{(b.y - a.y) / len, -(b.x - a.x) / len};
    for (int q = 0; q < 5; ++q) {
      const double s = 0.5 * (xg[q] + 1.0), wq = 0.5 * wg[q] * len;
      const Point2 x = a + s * (b - a);
      const double wx = (1.0 - s) * w(static_cast<Eigen::Index>(i)) + s * w(static_cast<Eigen::Index>((i + 1) % n));
      rhs(1) += wq * wx * nrm.x;
      rhs(2) += wq * wx * nrm.y;
      rhs(0) += wq * wx;
      m(0, 0) += wq;
      m(0, 1) += wq * x.x;
      m(0, 2) += wq * x.y;
    }
  }
  return m.fullPivLu().solve(rhs);
}

// Largest inscribed disk of the kernel by brute force: r(c) = min over edges of the signed
// distance from c to the edge line (inside positive), maximised over a grid and then over a
// shrinking local grid around the best point.
inline double kernel_radius_grid_search(const std::vector<Point2>& poly, double step = 1e-2) {
  const auto radius_at = [&](Point2 c) {
    double r = 1e300;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
      r = std::min(r, steklov::cross(b - a, c - a) / steklov::distance(a, b));
    }
    return r;
  };
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (Point2 p : poly) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  Point2 best{x0, y0};
  double rbest = radius_at(best);
  for (double x = x0; x <= x1; x += step)
    for (double y = y0; y <= y1; y += step)
      if (const double r = radius_at({x, y}); r > rbest) {
        rbest = r;
        best = {x, y};
      }
  for (double h = step; h > 1e-7; h *= 0.5) {
    const Point2 c = best;
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j)
        if (const double r = radius_at(c + Point2{i * h / 4, j * h / 4}); r > rbest) {
          rbest = r;
          best = c + Point2{i * h / 4, j * h / 4};
        }
  }
  return rbest;
}

// Nonzero spectrum of Ahat^-1 B from a general (non-symmetric) dense eigensolve.
inline std::vector<double> lambdas_by_general_eigensolve(const Eigen::MatrixXd& ahat, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd t = ahat.fullPivLu().solve(b);
  Eigen::EigenSolver<Eigen::MatrixXd> es(t);
  std::vector<double> out;
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double mu = es.eigenvalues()(i).real();
    if (mu > 1e-10 * top) out.push_back(1.0 / mu - 1.0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing
