#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steklov/meshgen.hpp"
#include "steklov/vem.hpp"

namespace steklov {

/// Sloshing eigenvalue of the unit square with Gamma0 on top: n pi tanh(n pi).
double exact_square_eigenvalue(int n);

/// Least-squares slope of log(error) against log(h) over all levels.
double fit_order(std::span<const double> hs, std::span<const double> errors);

/// log(e_i / e_{i+1}) / log(h_i / h_{i+1}) for consecutive levels.
std::vector<double> pairwise_orders(std::span<const double> hs, std::span<const double> errors);

/// Fit of values ~ lambda_star + C h^alpha.
struct Extrapolation {
  double lambda_star = 0.0;
  double C = 0.0;
  double alpha = 0.0;  // NaN when undefined (degenerate data)
  bool fallback = false;  // Gauss-Newton failed; closed-form three-point values reported
  bool monotone = true;
};

/// Three-finest-level closed form refined by Gauss-Newton until the relative update
/// drops below 1e-10. Needs at least 3 levels.
Extrapolation extrapolate(std::span<const double> hs, std::span<const double> values);

/// Reference value of the first L-shape eigenvalue used for the corner-refinement study.
inline constexpr double kLShapeReferenceLambda1 = 0.77445049080;

struct StudyLevel {
  int n = 0;       // N, or the refinement level for corner-refinement studies
  double h_max = 0.0;
  std::size_t n_dofs = 0;
  std::vector<double> lambdas;
  bool failed = false;
  std::string failure;
};

enum class ReferenceKind { Exact, Extrapolated, Fixed, None };

struct ConvergenceStudy {
  Family family = Family::T2;
  StabilizationSpec spec;
  int k = 0;
  std::vector<StudyLevel> levels;  // decreasing h_max
  ReferenceKind reference_kind = ReferenceKind::None;
  std::vector<double> references;           // per eigenvalue
  std::vector<std::vector<double>> errors;  // [level][eigenvalue]
  std::vector<double> orders;               // per eigenvalue; empty with fewer than 2 levels
  std::vector<std::vector<double>> pairwise;  // [eigenvalue][level pair]
  std::vector<Extrapolation> extrapolated;  // per eigenvalue, when no exact values exist
  bool refinement_study = false;

  bool ok() const;
};

struct StudyOptions {
  ExecutionMode mode = ExecutionMode::Parallel;
  /// Stop at the first failing level (default) or record it and continue.
  bool keep_going = false;
};

/// For each N: generate, assemble, solve k pairs; then attach references (exact on the
/// square, extrapolated otherwise), errors and fitted orders. Orders on the square are
/// least-squares slopes of the errors; elsewhere the fitted exponent alpha of the
/// extrapolation. Ns must be strictly increasing.
ConvergenceStudy run_study(Family family, std::span<const int> ns, const StabilizationSpec& spec, int k,
                           const StudyOptions& options = {});

/// Corner-refinement study on the L-shape: level 0 is the uniform mesh at N, level l applies
/// refinements 1..l. Errors are measured against kLShapeReferenceLambda1 for lambda_1.
ConvergenceStudy run_refinement_study(int n, int max_level, const StabilizationSpec& spec, int k,
                                      const StudyOptions& options = {});

/// Markdown table: N | h | dofs | lambda_h1..k, then Order and Exact/Extrap rows.
/// Eigenvalues at 4 decimals, orders at 2.
void write_study_markdown(std::ostream& out, const ConvergenceStudy& study);

/// CSV with header row; eigenvalues at full precision.
void write_study_csv(std::ostream& out, const ConvergenceStudy& study);

}  // namespace steklov
