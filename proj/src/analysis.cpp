#include "steklov/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "steklov/eig.hpp"

namespace steklov {

double exact_square_eigenvalue(int n) {
  if (n < 1) throw Error(Errc::InvalidN, "eigenvalue index must be >= 1");
  const double t = n * std::numbers::pi;
  return t * std::tanh(t);
}

namespace {

void check_levels(std::span<const double> hs, std::span<const double> ys, std::size_t min_levels) {
  if (hs.size() != ys.size()) throw Error(Errc::InvalidArgument, "h and value lists differ in length");
  if (hs.size() < min_levels)
    throw Error(Errc::InsufficientLevels, "need at least " + std::to_string(min_levels) + " levels");
  for (double h : hs)
    if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "mesh sizes must be positive");
}

}  // namespace

double fit_order(std::span<const double> hs, std::span<const double> errors) {
  check_levels(hs, errors, 2);
  for (double e : errors)
    if (!(e > 0.0)) throw Error(Errc::NonPositiveError, "errors must be positive to fit an order");
  const auto n = static_cast<double>(hs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    mx += std::log(hs[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double dx = std::log(hs[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw Error(Errc::InvalidArgument, "all mesh sizes are equal");
  return sxy / sxx;
}

std::vector<double> pairwise_orders(std::span<const double> hs, std::span<const double> errors) {
  check_levels(hs, errors, 2);
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < hs.size(); ++i)
    out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
  return out;
}

Extrapolation extrapolate(std::span<const double> hs_in, std::span<const double> values_in) {
  check_levels(hs_in, values_in, 3);
  // coarse to fine
  std::vector<std::size_t> idx(hs_in.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return hs_in[a] > hs_in[b]; });
  std::vector<double> h, v;
  for (auto i : idx) {
    h.push_back(hs_in[i]);
    v.push_back(values_in[i]);
  }
  const std::size_t n = h.size();

  Extrapolation out;
  for (std::size_t i = 0; i + 2 < n; ++i)
    if ((v[i] - v[i + 1]) * (v[i + 1] - v[i + 2]) < 0.0) out.monotone = false;

  // closed form on the three finest levels
  const double h1 = h[n - 3], h2 = h[n - 2], h3 = h[n - 1];
  const double d1 = v[n - 3] - v[n - 2], d2 = v[n - 2] - v[n - 1];
  if (!(d1 * d2 > 0.0) || d1 == d2) {
    out.lambda_star = v[n - 1];
    out.C = 0.0;
    out.alpha = std::numeric_limits<double>::quiet_NaN();
    out.fallback = true;
    return out;
  }
  double alpha = std::log(d1 / d2) / std::log(h1 / h2);
  double C = d2 / (std::pow(h2, alpha) - std::pow(h3, alpha));
  double lam = v[n - 1] - C * std::pow(h3, alpha);
  const Extrapolation closed{lam, C, alpha, true, out.monotone};

  const auto sse = [&](double l, double c, double a) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = l + c * std::pow(h[i], a) - v[i];
      s += r * r;
    }
    return s;
  };

  bool converged = false;
  double current = sse(lam, C, alpha);
  for (int iter = 0; iter < 200 && std::isfinite(current); ++iter) {
    Eigen::MatrixXd J(static_cast<Eigen::Index>(n), 3);
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double ha = std::pow(h[i], alpha);
      const auto row = static_cast<Eigen::Index>(i);
      J(row, 0) = 1.0;
      J(row, 1) = ha;
      J(row, 2) = C * ha * std::log(h[i]);
      r(row) = lam + C * ha - v[i];
    }
    const Eigen::Vector3d step = -J.colPivHouseholderQr().solve(r);
    if (!step.allFinite()) break;
    // step halving keeps Gauss-Newton monotone on the residual
    double t = 1.0;
    double trial = sse(lam + step(0), C + step(1), alpha + step(2));
    while (trial > current && t > 1e-6) {
      t *= 0.5;
      trial = sse(lam + t * step(0), C + t * step(1), alpha + t * step(2));
    }
    if (trial > current) {
      converged = current <= 1e-30 * std::max(1.0, std::abs(lam));
      break;
    }
    lam += t * step(0);
    C += t * step(1);
    alpha += t * step(2);
    current = trial;
    const double rel = (t * step).norm() / std::max(Eigen::Vector3d(lam, C, alpha).norm(), 1e-300);
    if (rel < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(lam) || !std::isfinite(alpha) || alpha <= 0.0) return closed;
  out.lambda_star = lam;
  out.C = C;
  out.alpha = alpha;
  return out;
}

bool ConvergenceStudy::ok() const {
  return std::none_of(levels.begin(), levels.end(), [](const StudyLevel& l) { return l.failed; });
}

namespace {

StudyLevel solve_level(const PolygonalMesh& mesh, int n, const StabilizationSpec& spec, int k, ExecutionMode mode) {
  StudyLevel level;
  level.n = n;
  level.h_max = mesh.h_max();
  level.n_dofs = mesh.num_vertices();
  const auto sys = assemble_global(mesh, spec, {mode, false});
  level.lambdas = solve_steklov(sys, k, mode).lambdas;
  return level;
}

template <class MeshAt>
std::vector<StudyLevel> solve_levels(std::span<const int> ns, const StabilizationSpec& spec, int k,
                                     const StudyOptions& options, const char* label, MeshAt&& mesh_at) {
  std::vector<StudyLevel> levels;
  for (int n : ns) {
    try {
      levels.push_back(solve_level(mesh_at(n), n, spec, k, options.mode));
    } catch (const Error& e) {
      if (!options.keep_going)
        throw Error(e.code(), std::string(label) + "=" + std::to_string(n) + ": " + e.what());
      StudyLevel failed;
      failed.n = n;
      failed.failed = true;
      failed.failure = e.what();
      levels.push_back(std::move(failed));
    }
  }
  return levels;
}

void finish_study(ConvergenceStudy& study) {
  const auto k = static_cast<std::size_t>(study.k);
  std::vector<const StudyLevel*> good;
  for (const auto& l : study.levels)
    if (!l.failed) good.push_back(&l);

  const auto column = [&](std::size_t i) {
    std::vector<double> hs, ys;
    for (const auto* l : good) {
      hs.push_back(l->h_max);
      ys.push_back(l->lambdas[i]);
    }
    return std::pair{hs, ys};
  };

  study.references.assign(k, std::numeric_limits<double>::quiet_NaN());
  if (study.refinement_study) {
    study.reference_kind = ReferenceKind::Fixed;
    study.references[0] = kLShapeReferenceLambda1;
  } else if (domain_of(study.family).shape == DomainShape::UnitSquare) {
    study.reference_kind = ReferenceKind::Exact;
    for (std::size_t i = 0; i < k; ++i) study.references[i] = exact_square_eigenvalue(static_cast<int>(i) + 1);
  } else if (good.size() >= 3) {
    study.reference_kind = ReferenceKind::Extrapolated;
    for (std::size_t i = 0; i < k; ++i) {
      const auto [hs, ys] = column(i);
      study.extrapolated.push_back(extrapolate(hs, ys));
      study.references[i] = study.extrapolated.back().lambda_star;
    }
  }

  study.errors.clear();
  for (const auto& l : study.levels) {
    std::vector<double> row(k, std::numeric_limits<double>::quiet_NaN());
    if (!l.failed)
      for (std::size_t i = 0; i < k; ++i) row[i] = std::abs(l.lambdas[i] - study.references[i]);
    study.errors.push_back(std::move(row));
  }

  if (study.refinement_study || good.size() < 2) return;
  for (std::size_t i = 0; i < k; ++i) {
    if (study.reference_kind == ReferenceKind::Exact) {
      std::vector<double> hs, es;
      for (std::size_t l = 0; l < study.levels.size(); ++l) {
        if (study.levels[l].failed) continue;
        hs.push_back(study.levels[l].h_max);
        es.push_back(study.errors[l][i]);
      }
      study.orders.push_back(fit_order(hs, es));
      study.pairwise.push_back(pairwise_orders(hs, es));
    } else if (study.reference_kind == ReferenceKind::Extrapolated) {
      study.orders.push_back(study.extrapolated[i].alpha);
    }
  }
}

}  // namespace

ConvergenceStudy run_study(Family family, std::span<const int> ns, const StabilizationSpec& spec, int k,
                           const StudyOptions& options) {
  validate(spec);
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  if (ns.empty()) throw Error(Errc::InsufficientLevels, "no refinement levels given");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw Error(Errc::InvalidArgument, "Ns must be strictly increasing");
  if (family == Family::T6L) throw Error(Errc::InvalidArgument, "use run_refinement_study for t6l");

  ConvergenceStudy study;
  study.family = family;
  study.spec = spec;
  study.k = k;
  study.levels = solve_levels(ns, spec, k, options, "N", [&](int n) { return generate(family, n); });
  finish_study(study);
  return study;
}

ConvergenceStudy run_refinement_study(int n, int max_level, const StabilizationSpec& spec, int k,
                                      const StudyOptions& options) {
  validate(spec);
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  if (max_level < 0) throw Error(Errc::InvalidArgument, "refinement level must be >= 0");
  ConvergenceStudy study;
  study.family = Family::T6L;
  study.spec = spec;
  study.k = k;
  study.refinement_study = true;

  std::vector<int> ls(static_cast<std::size_t>(max_level) + 1);
  std::iota(ls.begin(), ls.end(), 0);
  PolygonalMesh mesh = gen_lshape_uniform(n);
  int built = 0;
  study.levels = solve_levels(ls, spec, k, options, "level", [&](int l) -> const PolygonalMesh& {
    for (; built < l; ++built) mesh = refine_lshape_corner(mesh, built + 1, n);
    return mesh;
  });
  finish_study(study);
  return study;
}

namespace {

std::string fmt(const char* spec, double v) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

const char* reference_label(const ConvergenceStudy& s) {
  switch (s.reference_kind) {
    case ReferenceKind::Exact: return "Exact";
    case ReferenceKind::Extrapolated: return "Extrap.";
    case ReferenceKind::Fixed: return "ref.";
    case ReferenceKind::None: return nullptr;
  }
  return nullptr;
}

}  // namespace

void write_study_markdown(std::ostream& out, const ConvergenceStudy& s) {
  const char* first = s.refinement_study ? "level" : "N";
  out << "| " << first << " | h | dofs |";
  for (int i = 1; i <= s.k; ++i) out << " lambda_h" << i << " |";
  out << "\n|---|---|---|";
  for (int i = 0; i < s.k; ++i) out << "---|";
  out << '\n';
  for (const auto& l : s.levels) {
    if (l.failed) {
      out << "| " << l.n << " | FAILED | " << l.failure << " |\n";
      continue;
    }
    out << "| " << l.n << " | " << fmt("%.6g", l.h_max) << " | " << l.n_dofs << " |";
    for (double v : l.lambdas) out << ' ' << fmt("%.4f", v) << " |";
    out << '\n';
  }
  if (!s.orders.empty()) {
    out << "| Order | | |";
    for (double o : s.orders) out << ' ' << fmt("%.2f", o) << " |";
    out << '\n';
  }
  if (const char* label = reference_label(s)) {
    out << "| " << label << " | | |";
    for (double r : s.references) out << ' ' << fmt(s.refinement_study ? "%.11f" : "%.4f", r) << " |";
    out << '\n';
  }
  if (s.refinement_study) {
    out << "\n| level | dofs | lambda_h1 | error |\n|---|---|---|---|\n";
    for (std::size_t l = 0; l < s.levels.size(); ++l) {
      const auto& lv = s.levels[l];
      if (lv.failed) continue;
      out << "| " << lv.n << " | " << lv.n_dofs << " | " << fmt("%.11f", lv.lambdas[0]) << " | "
          << fmt("%.11f", s.errors[l][0]) << " |\n";
    }
  }
}

void write_study_csv(std::ostream& out, const ConvergenceStudy& s) {
  out << (s.refinement_study ? "level" : "N") << ",h,dofs";
  for (int i = 1; i <= s.k; ++i) out << ",lambda_" << i;
  out << '\n';
  for (const auto& l : s.levels) {
    if (l.failed) {
      out << l.n << ",FAILED,";
      for (int i = 0; i < s.k; ++i) out << ',';
      out << '\n';
      continue;
    }
    out << l.n << ',' << fmt("%.6g", l.h_max) << ',' << l.n_dofs;
    for (double v : l.lambdas) out << ',' << fmt("%.17g", v);
    out << '\n';
  }
  if (!s.orders.empty()) {
    out << "order,,";
    for (double o : s.orders) out << ',' << fmt("%.17g", o);
    out << '\n';
  }
  if (reference_label(s)) {
    out << (s.reference_kind == ReferenceKind::Exact          ? "exact"
            : s.reference_kind == ReferenceKind::Extrapolated ? "extrap"
                                                              : "ref")
        << ",,";
    for (double r : s.references) out << ',' << fmt("%.17g", r);
    out << '\n';
  }
}

}  // namespace steklov
