#include <cmath>

#include "steklov/vem.hpp"

namespace steklov {

void validate(const StabilizationSpec& spec) {
  if (!(spec.alpha >= 0.25 && spec.alpha <= 2.0))
    throw Error(Errc::InvalidArgument, "stabilization exponent alpha must lie in [0.25, 2]");
}

double element_size(const ElementGeometry& geom, ElementSize size) {
  return size == ElementSize::Diameter ? geom.diameter : std::sqrt(geom.area);
}

ProjectorMaps local_projector(const ElementGeometry& geom) {
  const auto n = static_cast<Eigen::Index>(geom.size());
  if (!(geom.area > 1e-14 * geom.diameter * geom.diameter))
    throw Error(Errc::DegenerateElement, "element area below 1e-14 h_K^2");

  ProjectorMaps maps;
  maps.G.setZero(2, n);
  maps.mean_row.setZero(n);
  // grad(Pi w) = |K|^-1 int_dK w n ds, exact by the trapezoid rule on each edge
  for (const auto& e : geom.edges) {
    const double half = 0.5 * e.length;
    maps.G(0, e.i) += half * e.normal.x;
    maps.G(1, e.i) += half * e.normal.y;
    maps.G(0, e.j) += half * e.normal.x;
    maps.G(1, e.j) += half * e.normal.y;
    maps.mean_row(e.i) += half;
    maps.mean_row(e.j) += half;
  }
  maps.G /= geom.area;
  maps.mean_row /= geom.boundary_length;

  // Pi w(x) = mean(w) + grad(Pi w) . (x - x_dK) so the projection keeps the boundary mean
  Eigen::MatrixXd X(n, 2);
  for (Eigen::Index v = 0; v < n; ++v) {
    const Point2 d = geom.vertices[static_cast<std::size_t>(v)] - geom.boundary_centroid;
    X(v, 0) = d.x;
    X(v, 1) = d.y;
  }
  maps.P = Eigen::VectorXd::Ones(n) * maps.mean_row + X * maps.G;
  return maps;
}

Eigen::MatrixXd stability_matrix(const ElementGeometry& geom, const StabilizationSpec& spec) {
  const auto n = static_cast<Eigen::Index>(geom.size());
  const double scale = std::pow(element_size(geom, spec.size), spec.alpha);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : geom.edges) {
    if (!(e.length > 0.0)) throw Error(Errc::ZeroLengthEdge, "stabilization on a zero-length edge");
    const double w = scale / e.length;
    S(e.i, e.i) += w;
    S(e.j, e.j) += w;
    S(e.i, e.j) -= w;
    S(e.j, e.i) -= w;
  }
  return S;
}

LocalOperators local_operators(const ElementGeometry& geom, const StabilizationSpec& spec) {
  LocalOperators ops;
  ops.proj = local_projector(geom);
  ops.S = stability_matrix(geom, spec);
  const auto n = static_cast<Eigen::Index>(geom.size());
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n) - ops.proj.P;
  ops.A = geom.area * ops.proj.G.transpose() * ops.proj.G + R.transpose() * ops.S * R;
  ops.A = 0.5 * (ops.A + ops.A.transpose()).eval();
  return ops;
}

Eigen::MatrixXd local_stiffness(const ElementGeometry& geom, const StabilizationSpec& spec) {
  return local_operators(geom, spec).A;
}

Eigen::Matrix2d boundary_mass_edge(double length) {
  if (!(length > 0.0)) throw Error(Errc::ZeroLengthEdge, "boundary mass on a zero-length edge");
  Eigen::Matrix2d m;
  m << 2.0, 1.0, 1.0, 2.0;
  return (length / 6.0) * m;
}

double local_form(const LocalOperators& ops, double area, const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  const Eigen::VectorXd rw = w - ops.proj.P * w, rv = v - ops.proj.P * v;
  return area * (ops.proj.G * w).dot(ops.proj.G * v) + rw.dot(ops.S * rv);
}

double triple_norm(const PolygonalMesh& mesh, const Eigen::VectorXd& dofs, const StabilizationSpec& spec) {
  if (dofs.size() != static_cast<Eigen::Index>(mesh.num_vertices()))
    throw Error(Errc::InvalidArgument, "dof vector length differs from vertex count");
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& g = mesh.geometry(static_cast<Index>(c));
    const auto maps = local_projector(g);
    const auto S = stability_matrix(g, spec);
    Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
    for (std::size_t v = 0; v < g.size(); ++v) w(static_cast<Eigen::Index>(v)) = dofs(g.global_ids[v]);
    const double mean = maps.mean_row.dot(w);
    const Eigen::VectorXd osc = w.array() - mean;
    sum += g.area * (maps.G * w).squaredNorm() + osc.dot(S * osc);
  }
  return std::sqrt(sum);
}

}  // namespace steklov
