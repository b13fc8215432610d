#pragma once

#include <vector>

#include <Eigen/Dense>

#include "steklov/mesh.hpp"
#include "steklov/vem.hpp"

namespace steklov {

/// Positive discrete Steklov eigenpairs, ascending. Eigenvectors are columns of `vectors`,
/// normalized so that u^T Ahat u = 1.
struct EigenResult {
  std::vector<double> lambdas;
  std::vector<double> mus;  // 1 / (1 + lambda)
  Eigen::MatrixXd vectors;
  bool zero_mode_detected = false;
  std::vector<double> residuals;  // ||A u - lambda B u|| / ||u||
};

/// Number of positive eigenvalues the system can deliver: |Gamma0 dofs| - 1.
Index available_modes(const GlobalSystem& system);

/// Nonzero spectrum of Ahat^-1 B through the |Gamma0|-sized reduced problem
/// C = R P Ahat^-1 P^T R^T (B restricted to Gamma0 = R^T R). The constant mode (lambda = 0)
/// is dropped. Requires 1 <= k <= available_modes(system); the sparse solves for the
/// columns of P Ahat^-1 P^T run in parallel unless `mode` is Serial.
EigenResult solve_steklov(const GlobalSystem& system, int k, ExecutionMode mode = ExecutionMode::Parallel);

/// Dense generalized symmetric-definite eigensolve of B u = mu Ahat u; returns every finite
/// mode except the constant one. Modes whose mu is too small to resolve there (a tiny Gamma0
/// mass) are taken from the dense Dirichlet-to-Neumann pencil instead. Test oracle, limited to
/// 2000 dofs.
EigenResult dense_reference_solve(const GlobalSystem& system);

/// i-th eigenvector as a vertex field, scaled to max |.| = 1 with its largest-magnitude
/// entry positive (first such entry on ties).
Eigen::VectorXd eigenfunction_field(const EigenResult& result, const PolygonalMesh& mesh, int i);

}  // namespace steklov
