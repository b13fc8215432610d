#include <algorithm>
#include <cmath>
#include <limits>

#include "steklov/mesh.hpp"

namespace steklov {

namespace {

// Half-plane n.x <= d with unit outward normal n.
struct HalfPlane {
  Point2 n;
  double d;
};

}  // namespace

std::optional<KernelDisk> kernel_chebyshev_disk(std::span<const Point2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return std::nullopt;
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) h = std::max(h, distance(polygon[i], polygon[j]));

  // Shift to the first vertex so the LP is solved on O(h) numbers.
  const Point2 o = polygon[0];
  std::vector<HalfPlane> planes;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = polygon[i] - o, b = polygon[(i + 1) % n] - o;
    const Point2 d = b - a;
    const double len = norm(d);
    const Point2 nrm{d.y / len, -d.x / len};
    const HalfPlane hp{nrm, dot(nrm, a)};
    // collinear edges give the same constraint
    const bool dup = std::any_of(planes.begin(), planes.end(), [&](const HalfPlane& q) {
      return std::abs(q.n.x - hp.n.x) < 1e-12 && std::abs(q.n.y - hp.n.y) < 1e-12 && std::abs(q.d - hp.d) < 1e-12 * h;
    });
    if (!dup) planes.push_back(hp);
  }

  // maximize r subject to n_e.c + r <= d_e; the optimum sits on a vertex of the
  // (c, r) polytope, i.e. where three constraints are active.
  const double feas_tol = 1e-12 * h;
  const std::size_t m = planes.size();
  bool found = false;
  KernelDisk best{{}, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        const HalfPlane& p = planes[i];
        const HalfPlane& q = planes[j];
        const HalfPlane& s = planes[k];
        // rows [nx ny 1]; Cramer's rule
        const double det = p.n.x * (q.n.y - s.n.y) - p.n.y * (q.n.x - s.n.x) + (q.n.x * s.n.y - q.n.y * s.n.x);
        if (std::abs(det) < 1e-12) continue;
        const double dx = p.d * (q.n.y - s.n.y) - p.n.y * (q.d - s.d) + (q.d * s.n.y - q.n.y * s.d);
        const double dy = p.n.x * (q.d - s.d) - p.d * (q.n.x - s.n.x) + (q.n.x * s.d - q.d * s.n.x);
        const double dr = p.n.x * (q.n.y * s.d - q.d * s.n.y) - p.n.y * (q.n.x * s.d - q.d * s.n.x) +
                          p.d * (q.n.x * s.n.y - q.n.y * s.n.x);
        const Point2 c{dx / det, dy / det};
        const double r = dr / det;
        if (found && r <= best.radius + feas_tol) continue;
        const bool feasible = std::all_of(planes.begin(), planes.end(),
                                          [&](const HalfPlane& hp) { return dot(hp.n, c) + r <= hp.d + feas_tol; });
        if (!feasible) continue;
        best = {c, r};
        found = true;
      }
    }
  }
  if (!found || best.radius <= feas_tol) return std::nullopt;
  best.center = best.center + o;
  return best;
}

double star_shaped_ratio(const PolygonalMesh& mesh, Index cell) {
  const auto& g = element_geometry(mesh, cell);
  const auto disk = kernel_chebyshev_disk(g.vertices);
  if (!disk) throw Error(Errc::EmptyKernel, "cell " + std::to_string(cell) + " is not star-shaped");
  return disk->radius / g.diameter;
}

MeshQualityReport quality_report(const PolygonalMesh& mesh, double gamma) {
  MeshQualityReport report;
  report.cells.resize(mesh.num_cells());
  report.min_star_ratio = std::numeric_limits<double>::infinity();
  report.min_edge_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& g = mesh.geometry(static_cast<Index>(c));
    auto& q = report.cells[c];
    q.min_edge_ratio = g.min_edge_length() / g.diameter;
    if (const auto disk = kernel_chebyshev_disk(g.vertices)) {
      q.star_ratio = disk->radius / g.diameter;
      q.below_gamma = *q.star_ratio < gamma;
      report.min_star_ratio = std::min(report.min_star_ratio, *q.star_ratio);
    } else {
      q.empty_kernel = true;
    }
    report.min_edge_ratio = std::min(report.min_edge_ratio, q.min_edge_ratio);
    if (q.empty_kernel || q.below_gamma) report.flagged.push_back(static_cast<Index>(c));
  }
  return report;
}

}  // namespace steklov
