#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "point_grid.hpp"
#include "steklov/mesh.hpp"

namespace steklov::detail {

/// Collects vertices (merging coincident points) and cell cycles, then inserts every
/// vertex lying inside a cell edge into that cell's cycle so the result is conforming.
class MeshBuilder {
public:
  static constexpr double kMergeTol = 1e-12;
  static constexpr double kBucket = 1e-11;

  Index add_vertex(Point2 p) {
    const long kx = std::lround(p.x / kBucket), ky = std::lround(p.y / kBucket);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = lookup_.find(key(kx + dx, ky + dy));
        if (it == lookup_.end()) continue;
        for (Index v : it->second)
          if (distance(vertices_[static_cast<std::size_t>(v)], p) <= kMergeTol) return v;
      }
    }
    const auto id = static_cast<Index>(vertices_.size());
    vertices_.push_back(p);
    lookup_[key(kx, ky)].push_back(id);
    return id;
  }

  void add_cell(std::vector<Index> cycle) { cells_.push_back(std::move(cycle)); }

  const std::vector<Point2>& vertices() const { return vertices_; }

  void absorb_hanging_nodes() {
    PointGrid grid(vertices_);
    for (auto& cyc : cells_) {
      std::vector<Index> out;
      out.reserve(cyc.size());
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        const Index a = cyc[i], b = cyc[(i + 1) % cyc.size()];
        out.push_back(a);
        for (Index m : grid.on_segment(vertices_[static_cast<std::size_t>(a)], vertices_[static_cast<std::size_t>(b)]))
          out.push_back(m);
      }
      cyc = std::move(out);
    }
  }

  PolygonalMesh finish(const MarkerRule& rule) {
    absorb_hanging_nodes();
    return build_mesh(std::move(vertices_), std::move(cells_), rule);
  }

private:
  static long long key(long x, long y) { return (static_cast<long long>(x) << 32) ^ static_cast<long long>(y & 0xffffffffL); }

  std::vector<Point2> vertices_;
  std::vector<std::vector<Index>> cells_;
  std::unordered_map<long long, std::vector<Index>> lookup_;
};

}  // namespace steklov::detail
