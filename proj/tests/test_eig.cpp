#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "steklov/analysis.hpp"
#include "steklov/eig.hpp"
#include "steklov/meshgen.hpp"
#include "support.hpp"

using namespace steklov;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::InvalidArgument;
}

// every mesh here stays below the dense oracle's 2000-dof limit
std::vector<PolygonalMesh> small_meshes() {
  return {testing::single_cell(testing::unit_square()),
          testing::quad_grid(5, 3),
          generate(Family::T1, 8),
          generate(Family::T2, 6),
          generate(Family::T3, 8),
          generate(Family::T4, 8),
          generate(Family::T5, 8),
          generate(Family::T6, 16),
          generate(Family::T6L, 16, 2),
          testing::with_tiny_boundary_edges(testing::quad_grid(8, 8), 1e-8),
          // the top right corner keeps a single 1e-8 Gamma0 edge: one mode near lambda = 4e15
          testing::with_tiny_boundary_edges(generate(Family::T2, 4), 1e-8)};
}

}  // namespace

TEST_CASE("single square cell has exactly one positive eigenvalue") {
  const auto sys = assemble_global(testing::single_cell(testing::unit_square()), {});
  CHECK(available_modes(sys) == 1);
  const auto r = solve_steklov(sys, 1);
  REQUIRE(r.lambdas.size() == 1);
  CHECK(r.zero_mode_detected);
  const auto oracle = testing::lambdas_by_general_eigensolve(Eigen::MatrixXd(sys.Ahat), Eigen::MatrixXd(sys.B));
  REQUIRE(oracle.size() == 2);
  CHECK(std::abs(oracle[0]) < 1e-10);
  CHECK(r.lambdas[0] == doctest::Approx(oracle[1]).epsilon(1e-10));
  const auto d = dense_reference_solve(sys);
  REQUIRE(d.lambdas.size() == 1);
  CHECK(d.lambdas[0] == doctest::Approx(r.lambdas[0]).epsilon(1e-12));
  CHECK(code_of([&] { solve_steklov(sys, 2); }) == Errc::KTooLarge);
}

TEST_CASE("reduced solve agrees with the dense oracle") {
  for (const auto& mesh : small_meshes()) {
    const auto sys = assemble_global(mesh, {});
    CAPTURE(sys.n_dofs);
    const Index m = static_cast<Index>(sys.gamma0_dofs.size());
    CHECK(available_modes(sys) == m - 1);
    const auto d = dense_reference_solve(sys);
    // rank of B: m nonzero mu, one of them the constant mode
    CHECK(d.lambdas.size() == static_cast<std::size_t>(m - 1));
    const auto r = solve_steklov(sys, m - 1);
    REQUIRE(r.lambdas.size() == d.lambdas.size());
    for (std::size_t i = 0; i < r.lambdas.size(); ++i) CHECK(r.lambdas[i] == doctest::Approx(d.lambdas[i]).epsilon(1e-9));
  }
}

TEST_CASE("eigenpair invariants") {
  for (const auto& mesh : small_meshes()) {
    const auto sys = assemble_global(mesh, {});
    const int k = available_modes(sys);
    const auto r = solve_steklov(sys, k);
    const double ahat_max = Eigen::MatrixXd(sys.Ahat).cwiseAbs().maxCoeff();
    CHECK(r.zero_mode_detected);
    REQUIRE(r.lambdas.size() == static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const auto ui = r.vectors.col(i);
      CHECK(r.lambdas[static_cast<std::size_t>(i)] > 0.0);
      if (i > 0) CHECK(r.lambdas[static_cast<std::size_t>(i)] >= r.lambdas[static_cast<std::size_t>(i - 1)]);
      CHECK(r.mus[static_cast<std::size_t>(i)] == doctest::Approx(1.0 / (1.0 + r.lambdas[static_cast<std::size_t>(i)])));
      const Eigen::VectorXd res = sys.A * ui - r.lambdas[static_cast<std::size_t>(i)] * (sys.B * ui);
      CHECK(res.norm() <= 1e-8 * (1.0 + r.lambdas[static_cast<std::size_t>(i)]) * ui.norm());
      CHECK(r.residuals[static_cast<std::size_t>(i)] <= 1e-8 * (1.0 + r.lambdas[static_cast<std::size_t>(i)]));
      // normalization holds to the roundoff of Ahat, whose entries reach h/|e|
      CHECK(std::abs(ui.dot(sys.Ahat * ui) - 1.0) <= 1e-13 * (1.0 + ahat_max * ui.squaredNorm()));
      for (int j = 0; j < i; ++j) {
        if (std::abs(r.lambdas[static_cast<std::size_t>(i)] - r.lambdas[static_cast<std::size_t>(j)]) <
            1e-8 * r.lambdas[static_cast<std::size_t>(i)])
          continue;
        const auto uj = r.vectors.col(j);
        const double bij = ui.dot(sys.B * uj) / std::sqrt(ui.dot(sys.B * ui) * uj.dot(sys.B * uj));
        CHECK(std::abs(bij) < 1e-8);
      }
    }
  }
}

TEST_CASE("serial and parallel solves are bitwise identical") {
  const auto sys = assemble_global(generate(Family::T2, 8), {});
  const auto a = solve_steklov(sys, 6);
  const auto b = solve_steklov(sys, 6, ExecutionMode::Serial);
  CHECK(a.lambdas == b.lambdas);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("eigenvalues scale like 1/s with the domain") {
  for (const auto& mesh : {generate(Family::T2, 4), generate(Family::T5, 8)}) {
    const auto base = solve_steklov(assemble_global(mesh, {}), 6);
    for (double s : {0.5, 2.0}) {
      const auto r = solve_steklov(assemble_global(testing::scaled(mesh, s), {}), 6);
      for (std::size_t i = 0; i < 6; ++i) CHECK(r.lambdas[i] == doctest::Approx(base.lambdas[i] / s).epsilon(1e-10));
    }
  }
}

TEST_CASE("errors") {
  const auto sys = assemble_global(generate(Family::T2, 4), {});
  CHECK(code_of([&] { solve_steklov(sys, available_modes(sys) + 1); }) == Errc::KTooLarge);
  CHECK(code_of([&] { solve_steklov(sys, 0); }) == Errc::InvalidArgument);
  const auto big = assemble_global(generate(Family::T6, 64), {});
  CHECK(code_of([&] { dense_reference_solve(big); }) == Errc::TooLarge);
}

TEST_CASE("eigenfunction field") {
  const auto mesh = generate(Family::T2, 4);
  const auto sys = assemble_global(mesh, {});
  auto r = solve_steklov(sys, 3);
  const auto f = eigenfunction_field(r, mesh, 1);
  CHECK(f.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(f.maxCoeff() == doctest::Approx(1.0));
  CHECK(f.maxCoeff() - f.minCoeff() > 1e-6);
  r.vectors.col(1) *= -1.0;
  CHECK(eigenfunction_field(r, mesh, 1) == f);
  CHECK(code_of([&] { eigenfunction_field(r, mesh, 3); }) == Errc::IndexOutOfRange);
  CHECK(code_of([&] { eigenfunction_field(r, mesh, -1); }) == Errc::IndexOutOfRange);
}

TEST_CASE("first square mode traces cos(pi x) on the top edge") {
  const auto mesh = testing::quad_grid(32, 32);
  const auto sys = assemble_global(mesh, {});
  const auto r = solve_steklov(sys, 1);
  const auto f = eigenfunction_field(r, mesh, 0);
  Eigen::VectorXd a(static_cast<Eigen::Index>(sys.gamma0_dofs.size())), b(a.size());
  for (std::size_t i = 0; i < sys.gamma0_dofs.size(); ++i) {
    const Index v = sys.gamma0_dofs[i];
    a(static_cast<Eigen::Index>(i)) = f(v);
    b(static_cast<Eigen::Index>(i)) = std::cos(std::numbers::pi * mesh.vertices()[static_cast<std::size_t>(v)].x);
  }
  const Eigen::VectorXd ac = a.array() - a.mean(), bc = b.array() - b.mean();
  CHECK(std::abs(ac.dot(bc)) / (ac.norm() * bc.norm()) >= 0.999);
  CHECK(r.lambdas[0] == doctest::Approx(exact_square_eigenvalue(1)).epsilon(1e-2));
}
