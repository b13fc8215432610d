#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/SparseCholesky>

#include "steklov/meshgen.hpp"
#include "steklov/vem.hpp"
#include "support.hpp"

using namespace steklov;
using testing::kSqrt2;

namespace {

const StabilizationSpec kDiameter{1.0, ElementSize::Diameter};

Eigen::VectorXd interpolate(const ElementGeometry& g, double a, double b, double c) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) w(static_cast<Eigen::Index>(i)) = a + b * g.vertices[i].x + c * g.vertices[i].y;
  return w;
}

Eigen::VectorXd interpolate(const PolygonalMesh& m, double a, double b, double c) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(m.num_vertices()));
  for (std::size_t i = 0; i < m.num_vertices(); ++i) w(static_cast<Eigen::Index>(i)) = a + b * m.vertices()[i].x + c * m.vertices()[i].y;
  return w;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

bool bitwise_equal(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.nonZeros() != b.nonZeros()) return false;
  const auto n = static_cast<std::size_t>(a.nonZeros());
  return std::equal(a.valuePtr(), a.valuePtr() + n, b.valuePtr()) &&
         std::equal(a.innerIndexPtr(), a.innerIndexPtr() + n, b.innerIndexPtr()) &&
         std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr());
}

std::vector<PolygonalMesh> sample_meshes() {
  return {generate(Family::T1, 8), generate(Family::T2, 4), generate(Family::T5, 8),
          generate(Family::T6L, 16, 2), testing::with_tiny_boundary_edges(testing::quad_grid(6, 6), 1e-8)};
}

}  // namespace

TEST_CASE("projector on the unit square") {
  const auto g = compute_element_geometry(testing::unit_square());
  const auto p = local_projector(g);
  const Eigen::Vector4d w(0, 1, 1, 0);
  const Eigen::Vector2d grad = p.G * w;
  CHECK(grad(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(grad(1)) < 1e-15);
  CHECK(p.mean_row.dot(w) == doctest::Approx(0.5));
  CHECK((p.P * w - w).norm() < 1e-14);
  const Eigen::Vector4d c = Eigen::Vector4d::Constant(2.5);
  CHECK((p.G * c).norm() < 1e-15);
  CHECK((p.P * c - c).norm() < 1e-14);
}

TEST_CASE("projector reproduces affine functions on every generated cell") {
  for (const auto& mesh : sample_meshes())
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
      const auto& g = mesh.geometry(static_cast<Index>(k));
      const auto p = local_projector(g);
      const auto w = interpolate(g, 0.3, -1.7, 2.2);
      const Eigen::Vector2d grad = p.G * w;
      CHECK(std::abs(grad(0) + 1.7) < 1e-13);
      CHECK(std::abs(grad(1) - 2.2) < 1e-13);
      CHECK((p.P * w - w).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("projector matches a quadrature oracle on perturbed hexagons") {
  const auto mesh = generate(Family::T2, 3);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const auto& g = mesh.geometry(static_cast<Index>(k));
    Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
    for (auto& x : w) x = u(rng);
    const auto coef = testing::projector_by_quadrature(g.vertices, w);
    const auto p = local_projector(g);
    const Eigen::Vector2d grad = p.G * w;
    CHECK(std::abs(grad(0) - coef(1)) < 1e-12);
    CHECK(std::abs(grad(1) - coef(2)) < 1e-12);
    const Eigen::VectorXd pv = p.P * w;
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(std::abs(pv(static_cast<Eigen::Index>(i)) - (coef(0) + coef(1) * g.vertices[i].x + coef(2) * g.vertices[i].y)) < 1e-12);
  }
}

TEST_CASE("degenerate element is rejected") {
  ElementGeometry g = compute_element_geometry(testing::unit_square());
  g.area = 1e-20;
  CHECK_THROWS_AS(local_projector(g), Error);
}

TEST_CASE("stability matrix on the unit square") {
  const auto g = compute_element_geometry(testing::unit_square());
  Eigen::Matrix4d lap;
  lap << 2, -1, 0, -1, -1, 2, -1, 0, 0, -1, 2, -1, -1, 0, -1, 2;
  CHECK((stability_matrix(g, kDiameter) - kSqrt2 * lap).norm() < 1e-14);
  CHECK((stability_matrix(g, {}) - lap).norm() < 1e-14);
  CHECK((stability_matrix(g, {2.0, ElementSize::Diameter}) - 2.0 * lap).norm() < 1e-13);
  CHECK(element_size(g, ElementSize::Diameter) == doctest::Approx(kSqrt2));
  CHECK(element_size(g, ElementSize::SqrtArea) == doctest::Approx(1.0));
}

TEST_CASE("stability matrix with a 1e-8 edge stays PSD") {
  const double t = 1e-8;
  const auto g = compute_element_geometry(std::vector<Point2>{{0, 0}, {t, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto s = stability_matrix(g, {});
  // edge 0 -> 1 carries weight h / t
  CHECK(s(0, 1) == doctest::Approx(-1.0 / t).epsilon(1e-6));
  CHECK(min_eigenvalue(s) >= -1e-10 * s.norm());
  CHECK((s * Eigen::VectorXd::Ones(5)).norm() < 1e-10 * s.norm());
}

TEST_CASE("local stiffness on the unit square against the closed form") {
  // affine dofs are orthogonal to the checkerboard c, so (I - P) = c c^T / 4 and
  // A = gx gx^T + gy gy^T + h c c^T
  const auto g = compute_element_geometry(testing::unit_square());
  const Eigen::Vector4d gx(-0.5, 0.5, 0.5, -0.5), gy(-0.5, -0.5, 0.5, 0.5), c(1, -1, 1, -1);
  for (auto [spec, h] : {std::pair{StabilizationSpec{}, 1.0}, std::pair{kDiameter, kSqrt2}}) {
    const Eigen::Matrix4d expected = gx * gx.transpose() + gy * gy.transpose() + h * c * c.transpose();
    CHECK((local_stiffness(g, spec) - expected).norm() < 1e-14);
  }
}

TEST_CASE("triangles reduce to linear finite elements for every alpha") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point2> tri{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
    if (std::abs(signed_area(tri)) < 0.05) continue;
    if (signed_area(tri) < 0) std::swap(tri[1], tri[2]);
    const auto g = compute_element_geometry(tri);
    const Eigen::Matrix3d ref = testing::p1_stiffness(g.vertices[0], g.vertices[1], g.vertices[2]);
    for (double alpha : {0.5, 0.75, 1.0, 1.25, 1.5})
      for (auto size : {ElementSize::SqrtArea, ElementSize::Diameter})
        CHECK((local_stiffness(g, {alpha, size}) - ref).norm() <= 1e-12 * ref.norm());
  }
}

TEST_CASE("patch test, symmetry, kernel") {
  for (const auto& mesh : sample_meshes())
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
      const auto& g = mesh.geometry(static_cast<Index>(k));
      const auto ops = local_operators(g, {});
      const auto& a = ops.A;
      const auto p = interpolate(g, 1.0, 0.4, -0.9), q = interpolate(g, -2.0, 1.3, 0.6);
      const double pp = g.area * (0.16 + 0.81), pq = g.area * (0.4 * 1.3 - 0.9 * 0.6);
      CHECK(local_form(ops, g.area, p, p) == doctest::Approx(pp).epsilon(1e-12));
      CHECK(local_form(ops, g.area, p, q) == doctest::Approx(pq).epsilon(1e-12));
      // the assembled matrix carries O(h/|e|) entries, so only a norm-relative bound holds
      CHECK(std::abs(p.dot(a * p) - pp) <= 1e-12 * a.norm() * p.squaredNorm());
      CHECK((a - a.transpose()).norm() <= 1e-14 * a.norm());
      CHECK((a * Eigen::VectorXd::Ones(a.rows())).norm() <= 1e-12 * a.norm());
      // kernel is span{1}: second eigenvalue strictly positive
      const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
      CHECK(ev(0) >= -1e-10 * a.norm());
      CHECK(ev(1) > 1e-10 * a.norm());
    }
}

TEST_CASE("boundary edge mass") {
  const auto m1 = boundary_mass_edge(1.0);
  CHECK(m1(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(m1(0, 1) == doctest::Approx(1.0 / 6));
  const auto m2 = boundary_mass_edge(2.0);
  CHECK(m2(1, 1) == doctest::Approx(2.0 / 3));
  CHECK(m2(1, 0) == doctest::Approx(1.0 / 3));
  CHECK(m2.sum() == doctest::Approx(2.0));
  CHECK_THROWS_AS(boundary_mass_edge(0.0), Error);
}

TEST_CASE("triple norm") {
  const auto mesh = testing::single_cell(testing::unit_square());
  const auto x = interpolate(mesh, 0.0, 1.0, 0.0);
  // |K| |grad x|^2 = 1 plus h * (1 + 0 + 1 + 0) from the edge differences of x - 1/2
  CHECK(triple_norm(mesh, x, kDiameter) == doctest::Approx(std::sqrt(1.0 + 2.0 * kSqrt2)).epsilon(1e-14));
  CHECK(triple_norm(mesh, x, {}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(triple_norm(mesh, Eigen::VectorXd::Constant(4, 7.0), {}) == doctest::Approx(0.0));
  const auto big = generate(Family::T2, 4);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(big.num_vertices()), -1.0, 2.0).array().sin();
  CHECK(triple_norm(big, -3.0 * v, {}) == doctest::Approx(3.0 * triple_norm(big, v, {})).epsilon(1e-13));
}

TEST_CASE("single cell assembly") {
  const auto mesh = testing::single_cell(testing::unit_square());
  const auto sys = assemble_global(mesh, {});
  CHECK((Eigen::MatrixXd(sys.A) - local_stiffness(mesh.geometry(0), {})).norm() < 1e-15);
  Eigen::Matrix4d b = Eigen::Matrix4d::Zero();
  b.block<2, 2>(2, 2) << 1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3;
  CHECK((Eigen::MatrixXd(sys.B) - b).norm() < 1e-15);
  CHECK(sys.gamma0_dofs == std::vector<Index>{2, 3});
  CHECK(sys.n_dofs == 4);
}

TEST_CASE("global constants") {
  for (const auto& mesh : sample_meshes()) {
    const auto sys = assemble_global(mesh, {});
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(sys.n_dofs);
    CHECK((sys.A * one).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(one.dot(sys.B * one) == doctest::Approx(mesh.gamma0_length()).epsilon(1e-13));
  }
}

TEST_CASE("serial, parallel and reversed assembly agree") {
  for (const auto& mesh : sample_meshes()) {
    const auto par = assemble_global(mesh, {});
    const auto ser = assemble_global(mesh, {}, {ExecutionMode::Serial, false});
    CHECK(bitwise_equal(par.A, ser.A));
    CHECK(bitwise_equal(par.B, ser.B));
    CHECK(bitwise_equal(par.Ahat, ser.Ahat));
    const auto rev = assemble_global(mesh, {}, {ExecutionMode::Serial, true});
    CHECK(Eigen::MatrixXd(rev.A - ser.A).cwiseAbs().maxCoeff() <= 1e-13 * Eigen::MatrixXd(ser.A).cwiseAbs().maxCoeff());
  }
}

TEST_CASE("Ahat is SPD on every family") {
  for (auto f : {Family::T1, Family::T2, Family::T3, Family::T4, Family::T5, Family::T6, Family::T6L})
    for (int n : {8, 16}) {
      CAPTURE(to_string(f));
      CAPTURE(n);
      const auto sys = assemble_global(generate(f, n, f == Family::T6L ? 2 : 0), {});
      Eigen::SimplicialLLT<SparseMatrix> llt(sys.Ahat);
      CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("scaling the domain leaves A unchanged and scales B") {
  const auto mesh = generate(Family::T5, 8);
  for (double s : {0.5, 2.0}) {
    const auto a = assemble_global(mesh, {});
    const auto b = assemble_global(testing::scaled(mesh, s), {});
    const double scale = Eigen::MatrixXd(a.A).cwiseAbs().maxCoeff();
    CHECK(Eigen::MatrixXd(a.A - b.A).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK(Eigen::MatrixXd(s * a.B - b.B).cwiseAbs().maxCoeff() <= 1e-14 * s);
  }
}

TEST_CASE("validation of alpha") {
  CHECK_THROWS_AS(validate({0.1}), Error);
  CHECK_THROWS_AS(validate({2.5}), Error);
  CHECK_NOTHROW(validate({0.25}));
  CHECK_NOTHROW(validate({2.0}));
}

TEST_CASE("coordinate dump") {
  const auto sys = assemble_global(testing::single_cell(testing::unit_square()), {});
  std::ostringstream out;
  write_coo(out, sys.B);
  CHECK(out.str() == "2 2 0.33333333333333331\n3 2 0.16666666666666666\n2 3 0.16666666666666666\n3 3 0.33333333333333331\n");
}
