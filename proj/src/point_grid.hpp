#pragma once

// Uniform bucket grid over a point cloud, used for on-segment vertex lookups
// (hanging-node detection and insertion).

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "steklov/mesh.hpp"

namespace steklov::detail {

class PointGrid {
public:
  explicit PointGrid(std::span<const Point2> points) : points_(points) {
    if (points.empty()) return;
    lo_ = hi_ = points.front();
    for (const auto& p : points) {
      lo_.x = std::min(lo_.x, p.x);
      lo_.y = std::min(lo_.y, p.y);
      hi_.x = std::max(hi_.x, p.x);
      hi_.y = std::max(hi_.y, p.y);
    }
    const auto side = static_cast<double>(std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(points.size()))));
    const double span = std::max({hi_.x - lo_.x, hi_.y - lo_.y, 1e-300});
    cell_ = span / side;
    nx_ = static_cast<long>((hi_.x - lo_.x) / cell_) + 1;
    ny_ = static_cast<long>((hi_.y - lo_.y) / cell_) + 1;
    buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
    for (std::size_t i = 0; i < points.size(); ++i)
      buckets_[bucket(cx(points[i].x), cy(points[i].y))].push_back(static_cast<Index>(i));
  }

  /// Indices of points strictly inside segment (a, b), ordered by distance from a.
  /// A point is on the segment if its distance to the supporting line is below
  /// `rel_tol * |b - a|` and its parameter lies in (0, 1) away from both endpoints.
  std::vector<Index> on_segment(Point2 a, Point2 b, double rel_tol = 1e-10) const {
    std::vector<std::pair<double, Index>> hits;
    if (points_.empty()) return {};
    const Point2 d = b - a;
    const double len2 = dot(d, d);
    const double len = std::sqrt(len2);
    const double pad = rel_tol * len;
    const long i0 = cx(std::min(a.x, b.x) - pad), i1 = cx(std::max(a.x, b.x) + pad);
    const long j0 = cy(std::min(a.y, b.y) - pad), j1 = cy(std::max(a.y, b.y) + pad);
    for (long j = j0; j <= j1; ++j) {
      for (long i = i0; i <= i1; ++i) {
        for (Index k : buckets_[bucket(i, j)]) {
          const Point2 p = points_[static_cast<std::size_t>(k)];
          if (p == a || p == b) continue;
          const double t = dot(p - a, d) / len2;
          // points coincident with an endpoint up to round-off are not interior
          if (t <= 1e-14 || t >= 1.0 - 1e-14) continue;
          if (std::abs(cross(d, p - a)) / len > pad) continue;
          hits.emplace_back(t, k);
        }
      }
    }
    std::sort(hits.begin(), hits.end());
    std::vector<Index> out;
    out.reserve(hits.size());
    for (const auto& h : hits) out.push_back(h.second);
    return out;
  }

private:
  long clampi(long v, long n) const { return std::clamp(v, 0L, n - 1); }
  long cx(double x) const { return clampi(static_cast<long>(std::floor((x - lo_.x) / cell_)), nx_); }
  long cy(double y) const { return clampi(static_cast<long>(std::floor((y - lo_.y) / cell_)), ny_); }
  std::size_t bucket(long i, long j) const { return static_cast<std::size_t>(j * nx_ + i); }

  std::span<const Point2> points_;
  Point2 lo_, hi_;
  double cell_ = 1.0;
  long nx_ = 1, ny_ = 1;
  std::vector<std::vector<Index>> buckets_;
};

}  // namespace steklov::detail
