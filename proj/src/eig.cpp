#include "steklov/eig.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include <Eigen/SparseCholesky>

namespace steklov {

namespace {

constexpr double kZeroLambdaTol = 1e-8;
constexpr double kConstantOverlap = 0.99;

// Floor 1e-8; raised to the roundoff level of A relative to the Gamma0 mass, which a
// 1e-8 edge (A entries ~ h/|e|) pushes well past the floor.
double zero_lambda_tol(const GlobalSystem& sys) {
  double a_max = 0.0;
  for (Eigen::Index col = 0; col < sys.A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(sys.A, col); it; ++it) a_max = std::max(a_max, std::abs(it.value()));
  double b_diag = 0.0;
  for (Index v : sys.gamma0_dofs) b_diag += sys.B.coeff(v, v);
  if (sys.gamma0_dofs.empty() || b_diag <= 0.0) return kZeroLambdaTol;
  b_diag /= static_cast<double>(sys.gamma0_dofs.size());
  return std::max(kZeroLambdaTol, 1e3 * std::numeric_limits<double>::epsilon() * a_max / b_diag);
}

// u^T M u with an extended-precision accumulator; entries of A reach h/|e| on tiny edges and
// the double sum would cancel away the digits of smooth modes.
long double quadratic_form(const SparseMatrix& m, const Eigen::VectorXd& u) {
  long double sum = 0.0L;
  for (Eigen::Index col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it)
      sum += static_cast<long double>(it.value()) * u(it.row()) * u(it.col());
  return sum;
}

// Rayleigh quotient of a computed eigenvector; its error is quadratic in the vector error.
double rayleigh_lambda(const GlobalSystem& sys, const Eigen::VectorXd& u) {
  return static_cast<double>(quadratic_form(sys.A, u) / quadratic_form(sys.B, u));
}

double residual(const GlobalSystem& sys, const Eigen::VectorXd& u, double lambda) {
  const Eigen::VectorXd r = sys.A * u - lambda * (sys.B * u);
  return r.norm() / u.norm();
}

// Largest `count` eigenpairs of the Dirichlet-to-Neumann pencil S s = lambda M s on Gamma0
// (S the Schur complement of A onto the Gamma0 dofs), lifted to full vectors, ascending.
// Used for modes whose mu = 1 / (1 + lambda) is below what the reduced m x m solve resolves.
std::vector<Eigen::VectorXd> dtn_top_modes(const GlobalSystem& sys, Eigen::Index count) {
  const auto m = static_cast<Eigen::Index>(sys.gamma0_dofs.size());
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(sys.n_dofs), -1);
  for (Eigen::Index i = 0; i < m; ++i) slot[static_cast<std::size_t>(sys.gamma0_dofs[static_cast<std::size_t>(i)])] = i;
  std::vector<Index> interior;
  std::vector<Eigen::Index> islot(static_cast<std::size_t>(sys.n_dofs), -1);
  for (Index v = 0; v < sys.n_dofs; ++v)
    if (slot[static_cast<std::size_t>(v)] < 0) {
      islot[static_cast<std::size_t>(v)] = static_cast<Eigen::Index>(interior.size());
      interior.push_back(v);
    }
  const auto ni = static_cast<Eigen::Index>(interior.size());

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m), M = Eigen::MatrixXd::Zero(m, m), Aig = Eigen::MatrixXd::Zero(ni, m);
  std::vector<Eigen::Triplet<double>> aii;
  for (Eigen::Index col = 0; col < sys.A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(sys.A, col); it; ++it) {
      const auto gr = slot[static_cast<std::size_t>(it.row())], gc = slot[static_cast<std::size_t>(it.col())];
      const auto ir = islot[static_cast<std::size_t>(it.row())], ic = islot[static_cast<std::size_t>(it.col())];
      if (gr >= 0 && gc >= 0) S(gr, gc) += it.value();
      else if (ir >= 0 && ic >= 0) aii.emplace_back(ir, ic, it.value());
      else if (ir >= 0) Aig(ir, gc) += it.value();
    }
  for (Eigen::Index col = 0; col < sys.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(sys.B, col); it; ++it)
      M(slot[static_cast<std::size_t>(it.row())], slot[static_cast<std::size_t>(it.col())]) += it.value();

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(ni, m);
  if (ni > 0) {
    SparseMatrix Aii(ni, ni);
    Aii.setFromTriplets(aii.begin(), aii.end());
    Eigen::SimplicialLLT<SparseMatrix> chol(Aii);
    if (chol.info() != Eigen::Success) throw Error(Errc::NotSPD, "interior stiffness block is not SPD");
    X = chol.solve(Aig);
    S -= Aig.transpose() * X;
  }
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dtn(S, M);
  if (dtn.info() != Eigen::Success) throw Error(Errc::RankDeficientGamma0Mass, "Gamma0 mass block is not SPD");

  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index q = m - count; q < m; ++q) {
    const Eigen::VectorXd sg = dtn.eigenvectors().col(q);
    const Eigen::VectorXd si = -X * sg;
    Eigen::VectorXd u(sys.n_dofs);
    for (Eigen::Index i = 0; i < m; ++i) u(sys.gamma0_dofs[static_cast<std::size_t>(i)]) = sg(i);
    for (Eigen::Index i = 0; i < ni; ++i) u(interior[static_cast<std::size_t>(i)]) = si(i);
    out.push_back(u / std::sqrt(u.dot(sys.Ahat * u)));
  }
  return out;
}

}  // namespace

Index available_modes(const GlobalSystem& system) {
  return std::max<Index>(0, static_cast<Index>(system.gamma0_dofs.size()) - 1);
}

EigenResult solve_steklov(const GlobalSystem& sys, int k, ExecutionMode mode) {
  const auto m = static_cast<Eigen::Index>(sys.gamma0_dofs.size());
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");
  if (k > available_modes(sys))
    throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + " exceeds the " + std::to_string(available_modes(sys)) +
                                     " positive modes carried by the Gamma0 dofs");

  Eigen::SimplicialLLT<SparseMatrix> chol(sys.Ahat);
  if (chol.info() != Eigen::Success) throw Error(Errc::NotSPD, "Cholesky factorization of A + B failed");

  // Gamma0 block of B
  std::vector<Eigen::Index> local(static_cast<std::size_t>(sys.n_dofs), -1);
  for (Eigen::Index i = 0; i < m; ++i) local[static_cast<std::size_t>(sys.gamma0_dofs[static_cast<std::size_t>(i)])] = i;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index col = 0; col < sys.B.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(sys.B, col); it; ++it) {
      const auto li = local[static_cast<std::size_t>(it.row())], lj = local[static_cast<std::size_t>(it.col())];
      if (li < 0 || lj < 0) throw Error(Errc::RankDeficientGamma0Mass, "boundary mass outside Gamma0 dofs");
      M(li, lj) += it.value();
    }
  }
  Eigen::LLT<Eigen::MatrixXd> mass(M);
  if (mass.info() != Eigen::Success) throw Error(Errc::RankDeficientGamma0Mass, "Gamma0 mass block is not SPD");
  const Eigen::MatrixXd L = mass.matrixL();

  // columns of P Ahat^-1 P^T
  Eigen::MatrixXd Gm(m, m);
  std::exception_ptr failure;
  const auto solve_column = [&](Eigen::Index j) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.n_dofs);
    rhs(sys.gamma0_dofs[static_cast<std::size_t>(j)]) = 1.0;
    const Eigen::VectorXd x = chol.solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i) Gm(i, j) = x(sys.gamma0_dofs[static_cast<std::size_t>(i)]);
  };
  if (mode == ExecutionMode::Serial) {
    for (Eigen::Index j = 0; j < m; ++j) solve_column(j);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (Eigen::Index j = 0; j < m; ++j) {
      try {
        solve_column(j);
      } catch (...) {
#pragma omp critical(steklov_eig_error)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  Gm = 0.5 * (Gm + Gm.transpose()).eval();

  Eigen::MatrixXd C = L.transpose() * Gm * L;
  C = 0.5 * (C + C.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw Error(Errc::NotSPD, "reduced eigenproblem did not converge");

  // largest mu first (smallest lambda)
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::reverse(order.begin(), order.end());

  EigenResult result;
  const Eigen::VectorXd r1 = L.transpose() * Eigen::VectorXd::Ones(m);  // R 1
  std::size_t first = 0;
  {
    const Eigen::Index top = order.front();
    const double mu = es.eigenvalues()(top);
    const double lambda = 1.0 / mu - 1.0;
    const Eigen::VectorXd s = es.eigenvectors().col(top);
    const double overlap = std::abs(r1.dot(s)) / (r1.norm() * s.norm());
    if (lambda <= zero_lambda_tol(sys) && overlap > kConstantOverlap) {
      result.zero_mode_detected = true;
      first = 1;
    }
  }
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(k), order.size() - first);
  // mu below 1e-8 mu_max sits under the eps * mu_max error of the m x m eigensolve
  const double mu_max = es.eigenvalues().maxCoeff();
  std::size_t resolved = 0;
  while (resolved < order.size() && es.eigenvalues()(order[resolved]) > 1e-8 * mu_max) ++resolved;
  std::vector<Eigen::VectorXd> tail;
  if (first + count > resolved)
    tail = dtn_top_modes(sys, static_cast<Eigen::Index>(order.size() - resolved));
  result.vectors.resize(sys.n_dofs, static_cast<Eigen::Index>(count));
  for (std::size_t q = 0; q < count; ++q) {
    if (first + q >= resolved) {
      const Eigen::VectorXd& u = tail[first + q - resolved];
      const double lambda = rayleigh_lambda(sys, u);
      result.lambdas.push_back(lambda);
      result.mus.push_back(1.0 / (1.0 + lambda));
      result.residuals.push_back(residual(sys, u, lambda));
      result.vectors.col(static_cast<Eigen::Index>(q)) = u;
      continue;
    }
    const Eigen::Index idx = order[first + q];
    const double mu = es.eigenvalues()(idx);
    const Eigen::VectorXd s = es.eigenvectors().col(idx);
    const Eigen::VectorXd reduced = L * s;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.n_dofs);
    for (Eigen::Index i = 0; i < m; ++i) rhs(sys.gamma0_dofs[static_cast<std::size_t>(i)]) = reduced(i);
    // u = mu^-1 Ahat^-1 P^T R^T s has u^T Ahat u = |s|^2 / mu
    Eigen::VectorXd u = chol.solve(rhs) / mu;
    u *= std::sqrt(mu) / s.norm();
    const double lambda = rayleigh_lambda(sys, u);
    result.lambdas.push_back(lambda);
    result.mus.push_back(1.0 / (1.0 + lambda));
    result.residuals.push_back(residual(sys, u, lambda));
    result.vectors.col(static_cast<Eigen::Index>(q)) = u;
  }
  return result;
}

EigenResult dense_reference_solve(const GlobalSystem& sys) {
  if (sys.n_dofs > 2000) throw Error(Errc::TooLarge, "dense reference solve is limited to 2000 dofs");
  const Eigen::MatrixXd Ahat = Eigen::MatrixXd(sys.Ahat);
  const Eigen::MatrixXd B = Eigen::MatrixXd(sys.B);
  // B u = mu Ahat u with Ahat SPD (Cholesky congruence inside the solver)
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(B, Ahat);
  if (ges.info() != Eigen::Success) throw Error(Errc::NotSPD, "dense generalized eigensolve failed");

  const Eigen::VectorXd& mus = ges.eigenvalues();
  const double mu_max = mus.maxCoeff();
  const auto m = static_cast<Eigen::Index>(sys.gamma0_dofs.size());
  // mu below 1e-8 mu_max is not resolved against the eps * mu_max error of this pencil
  std::vector<Eigen::VectorXd> modes;
  for (Eigen::Index i = mus.size() - 1; i >= 0 && static_cast<Eigen::Index>(modes.size()) < m; --i)
    if (mus(i) > 1e-8 * mu_max) modes.push_back(ges.eigenvectors().col(i));

  if (static_cast<Eigen::Index>(modes.size()) < m) {
    // The remaining nonzero mu carry huge lambda (tiny Gamma0 masses). They are the top of the
    // Dirichlet-to-Neumann pencil S s = lambda M s on the Gamma0 dofs, where they are resolved.
    std::vector<char> on_gamma(static_cast<std::size_t>(sys.n_dofs), 0);
    for (Index v : sys.gamma0_dofs) on_gamma[static_cast<std::size_t>(v)] = 1;
    std::vector<Index> interior;
    for (Index v = 0; v < sys.n_dofs; ++v)
      if (!on_gamma[static_cast<std::size_t>(v)]) interior.push_back(v);
    const Eigen::MatrixXd A = Eigen::MatrixXd(sys.A);
    const auto ni = static_cast<Eigen::Index>(interior.size());
    Eigen::MatrixXd Aii(ni, ni), Aig(ni, m), S(m, m), M(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        S(i, j) = A(sys.gamma0_dofs[static_cast<std::size_t>(i)], sys.gamma0_dofs[static_cast<std::size_t>(j)]);
        M(i, j) = B(sys.gamma0_dofs[static_cast<std::size_t>(i)], sys.gamma0_dofs[static_cast<std::size_t>(j)]);
      }
    for (Eigen::Index i = 0; i < ni; ++i) {
      for (Eigen::Index j = 0; j < ni; ++j) Aii(i, j) = A(interior[static_cast<std::size_t>(i)], interior[static_cast<std::size_t>(j)]);
      for (Eigen::Index j = 0; j < m; ++j) Aig(i, j) = A(interior[static_cast<std::size_t>(i)], sys.gamma0_dofs[static_cast<std::size_t>(j)]);
    }
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(ni, m);
    if (ni > 0) {
      Eigen::LLT<Eigen::MatrixXd> llt(Aii);
      if (llt.info() != Eigen::Success) throw Error(Errc::NotSPD, "interior stiffness block is not SPD");
      X = llt.solve(Aig);
      S -= Aig.transpose() * X;
    }
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dtn(S, M);
    if (dtn.info() != Eigen::Success) throw Error(Errc::RankDeficientGamma0Mass, "Gamma0 mass block is not SPD");
    for (Eigen::Index q = m - 1; static_cast<Eigen::Index>(modes.size()) < m; --q) {
      const Eigen::VectorXd s = dtn.eigenvectors().col(q);
      Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.n_dofs);
      const Eigen::VectorXd ui = -X * s;
      for (Eigen::Index i = 0; i < m; ++i) u(sys.gamma0_dofs[static_cast<std::size_t>(i)]) = s(i);
      for (Eigen::Index i = 0; i < ni; ++i) u(interior[static_cast<std::size_t>(i)]) = ui(i);
      modes.push_back(u);
    }
  }

  EigenResult result;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.n_dofs);
  const Eigen::VectorXd b1 = sys.B * ones;
  const double norm1 = std::sqrt(ones.dot(b1));
  const double zero_tol = zero_lambda_tol(sys);
  std::vector<std::pair<double, Eigen::VectorXd>> kept;
  for (std::size_t q = 0; q < modes.size(); ++q) {
    Eigen::VectorXd u = modes[q];
    u /= std::sqrt(u.dot(sys.Ahat * u));
    const double lambda = rayleigh_lambda(sys, u);
    if (q == 0 && lambda <= zero_tol) {
      const double overlap = std::abs(b1.dot(u)) / (norm1 * std::sqrt(u.dot(sys.B * u)));
      if (overlap > kConstantOverlap) {
        result.zero_mode_detected = true;
        continue;
      }
    }
    kept.emplace_back(lambda, std::move(u));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  result.vectors.resize(sys.n_dofs, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t q = 0; q < kept.size(); ++q) {
    result.lambdas.push_back(kept[q].first);
    result.mus.push_back(1.0 / (1.0 + kept[q].first));
    result.residuals.push_back(residual(sys, kept[q].second, kept[q].first));
    result.vectors.col(static_cast<Eigen::Index>(q)) = kept[q].second;
  }
  return result;
}

Eigen::VectorXd eigenfunction_field(const EigenResult& result, const PolygonalMesh& mesh, int i) {
  if (i < 0 || i >= static_cast<int>(result.lambdas.size()))
    throw Error(Errc::IndexOutOfRange, "eigenpair index " + std::to_string(i) + " out of range");
  Eigen::VectorXd u = result.vectors.col(i);
  if (u.size() != static_cast<Eigen::Index>(mesh.num_vertices()))
    throw Error(Errc::InvalidArgument, "eigenvector length differs from the mesh vertex count");
  Eigen::Index arg = 0;
  for (Eigen::Index v = 1; v < u.size(); ++v)
    if (std::abs(u(v)) > std::abs(u(arg))) arg = v;
  const double peak = u(arg);
  return u / peak;
}

}  // namespace steklov
