#include "steklov/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "point_grid.hpp"

namespace steklov {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonSimplePolygon: return "NonSimplePolygon";
    case Errc::NonConforming: return "NonConforming";
    case Errc::ZeroLengthEdge: return "ZeroLengthEdge";
    case Errc::UnmarkedBoundaryEdge: return "UnmarkedBoundaryEdge";
    case Errc::EmptyGamma0: return "EmptyGamma0";
    case Errc::InvalidIndex: return "InvalidIndex";
    case Errc::EmptyKernel: return "EmptyKernel";
    case Errc::InvalidN: return "InvalidN";
    case Errc::NotAQuadPatch: return "NotAQuadPatch";
    case Errc::DegenerateElement: return "DegenerateElement";
    case Errc::NotSPD: return "NotSPD";
    case Errc::RankDeficientGamma0Mass: return "RankDeficientGamma0Mass";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::TooLarge: return "TooLarge";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::InsufficientLevels: return "InsufficientLevels";
    case Errc::NonPositiveError: return "NonPositiveError";
    case Errc::FitDiverged: return "FitDiverged";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::uint64_t edge_key(Index a, Index b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

std::string cell_msg(std::size_t c, std::string_view what) {
  std::ostringstream os;
  os << "cell " << c << ": " << what;
  return os.str();
}

int orientation(Point2 a, Point2 b, Point2 c, double tol) {
  const double v = cross(b - a, c - a);
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

bool on_closed_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d, double tol) {
  const int o1 = orientation(a, b, c, tol), o2 = orientation(a, b, d, tol);
  const int o3 = orientation(c, d, a, tol), o4 = orientation(c, d, b, tol);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_closed_segment(a, b, c)) return true;
  if (o2 == 0 && on_closed_segment(a, b, d)) return true;
  if (o3 == 0 && on_closed_segment(c, d, a)) return true;
  if (o4 == 0 && on_closed_segment(c, d, b)) return true;
  return false;
}

void check_simple(std::span<const Point2> poly, double h, std::size_t c) {
  const std::size_t n = poly.size();
  const double tol = 1e-14 * h * h;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % n], nb = poly[(i + 2) % n];
    // consecutive edges folding back onto each other
    if (std::abs(cross(b - a, nb - b)) <= tol && dot(b - a, nb - b) < 0.0)
      throw Error(Errc::NonSimplePolygon, cell_msg(c, "edge folds back"));
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (segments_touch(a, b, poly[j], poly[(j + 1) % n], tol))
        throw Error(Errc::NonSimplePolygon, cell_msg(c, "self-intersecting cycle"));
    }
  }
}

}  // namespace

double signed_area(std::span<const Point2> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

double ElementGeometry::min_edge_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : edges) m = std::min(m, e.length);
  return m;
}

ElementGeometry compute_element_geometry(std::span<const Point2> vertices, std::span<const Index> ids) {
  ElementGeometry g;
  const std::size_t n = vertices.size();
  g.vertices.assign(vertices.begin(), vertices.end());
  if (ids.size() == n) {
    g.global_ids.assign(ids.begin(), ids.end());
  } else {
    g.global_ids.resize(n);
    std::iota(g.global_ids.begin(), g.global_ids.end(), Index{0});
  }
  // centroid relative to the first vertex keeps the shoelace sums well conditioned
  const Point2 o = vertices[0];
  double twice_area = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = vertices[i] - o, q = vertices[(i + 1) % n] - o;
    const double w = cross(p, q);
    twice_area += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  g.area = 0.5 * twice_area;
  g.centroid = o + (1.0 / (3.0 * twice_area)) * Point2{cx, cy};

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.diameter = std::max(g.diameter, distance(vertices[i], vertices[j]));

  g.edges.resize(n);
  Point2 bc{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Point2 d = vertices[j] - vertices[i];
    auto& e = g.edges[i];
    e.i = static_cast<Index>(i);
    e.j = static_cast<Index>(j);
    e.length = norm(d);
    e.normal = Point2{d.y / e.length, -d.x / e.length};
    g.boundary_length += e.length;
    bc = bc + (0.5 * e.length) * (vertices[i] + vertices[j]);
  }
  g.boundary_centroid = (1.0 / g.boundary_length) * bc;
  return g;
}

double PolygonalMesh::total_area() const {
  double a = 0.0;
  for (const auto& g : geometry_) a += g.area;
  return a;
}

double PolygonalMesh::gamma0_length() const {
  double l = 0.0;
  for (const auto& e : boundary_)
    if (e.marker == BoundaryMarker::Gamma0) l += distance(vertices_[e.v[0]], vertices_[e.v[1]]);
  return l;
}

double PolygonalMesh::h_max() const {
  double h = 0.0;
  for (const auto& g : geometry_) h = std::max(h, g.diameter);
  return h;
}

std::vector<Index> PolygonalMesh::gamma0_vertices() const {
  std::vector<Index> ids;
  for (const auto& e : boundary_) {
    if (e.marker != BoundaryMarker::Gamma0) continue;
    ids.push_back(e.v[0]);
    ids.push_back(e.v[1]);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

const ElementGeometry& element_geometry(const PolygonalMesh& mesh, Index cell) {
  if (cell < 0 || static_cast<std::size_t>(cell) >= mesh.num_cells())
    throw Error(Errc::InvalidIndex, "cell index out of range");
  return mesh.geometry(cell);
}

PolygonalMesh build_mesh(std::vector<Point2> vertices, std::vector<std::vector<Index>> cells,
                         std::vector<BoundaryEdge> boundary) {
  if (vertices.empty() || cells.empty()) throw Error(Errc::InvalidArgument, "empty mesh input");
  for (const auto& p : vertices)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(Errc::InvalidArgument, "non-finite vertex coordinate");

  const auto nv = static_cast<Index>(vertices.size());
  std::vector<char> used(vertices.size(), 0);
  std::vector<ElementGeometry> geometry;
  geometry.reserve(cells.size());
  std::vector<Point2> poly;

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cyc = cells[c];
    if (cyc.size() < 3) throw Error(Errc::NonSimplePolygon, cell_msg(c, "fewer than 3 vertices"));
    for (Index v : cyc)
      if (v < 0 || v >= nv) throw Error(Errc::InvalidIndex, cell_msg(c, "vertex index out of range"));
    {
      auto sorted = cyc;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(Errc::NonSimplePolygon, cell_msg(c, "repeated vertex in cycle"));
    }
    poly.clear();
    for (Index v : cyc) poly.push_back(vertices[static_cast<std::size_t>(v)]);
    const double area = signed_area(poly);
    if (area < 0.0) {
      std::reverse(cyc.begin(), cyc.end());
      std::reverse(poly.begin(), poly.end());
    }
    double h = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
      for (std::size_t j = i + 1; j < poly.size(); ++j) h = std::max(h, distance(poly[i], poly[j]));
    for (std::size_t i = 0; i < poly.size(); ++i)
      if (distance(poly[i], poly[(i + 1) % poly.size()]) < 1e-14 * h)
        throw Error(Errc::ZeroLengthEdge, cell_msg(c, "edge shorter than 1e-14 h_K"));
    if (!(std::abs(area) > 1e-14 * h * h)) throw Error(Errc::NonSimplePolygon, cell_msg(c, "zero signed area"));
    check_simple(poly, h, c);
    for (Index v : cyc) used[static_cast<std::size_t>(v)] = 1;
    geometry.push_back(compute_element_geometry(poly, cyc));
  }
  for (std::size_t v = 0; v < used.size(); ++v)
    if (!used[v]) throw Error(Errc::NonConforming, "vertex " + std::to_string(v) + " belongs to no cell");

  // edge -> uses; an interior edge is used twice with opposite orientation
  struct Use {
    Index a, b;
    int count = 0;
  };
  std::unordered_map<std::uint64_t, Use> edges;
  edges.reserve(cells.size() * 6);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cyc = cells[c];
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const Index a = cyc[i], b = cyc[(i + 1) % cyc.size()];
      auto [it, fresh] = edges.try_emplace(edge_key(a, b), Use{a, b, 0});
      auto& use = it->second;
      if (!fresh && (use.count >= 2 || use.a == a))
        throw Error(Errc::NonConforming, cell_msg(c, "edge shared by overlapping cells"));
      ++use.count;
    }
  }

  detail::PointGrid grid(vertices);
  double boundary_twice_area = 0.0;
  std::unordered_map<std::uint64_t, std::array<Index, 2>> open_edges;
  for (const auto& [key, use] : edges) {
    if (use.count != 1) continue;
    const Point2 a = vertices[static_cast<std::size_t>(use.a)], b = vertices[static_cast<std::size_t>(use.b)];
    if (!grid.on_segment(a, b).empty())
      throw Error(Errc::NonConforming, "vertex lies inside edge (" + std::to_string(use.a) + "," +
                                           std::to_string(use.b) + ") of only one cell");
    boundary_twice_area += cross(a, b);
    open_edges.emplace(key, std::array<Index, 2>{use.a, use.b});
  }
  double total = 0.0;
  for (const auto& g : geometry) total += g.area;
  if (std::abs(0.5 * boundary_twice_area - total) > 1e-10 * total)
    throw Error(Errc::NonConforming, "cells overlap or leave gaps");

  std::vector<BoundaryEdge> oriented;
  oriented.reserve(open_edges.size());
  bool has_gamma0 = false;
  for (const auto& be : boundary) {
    const auto key = edge_key(be.v[0], be.v[1]);
    if (be.v[0] < 0 || be.v[0] >= nv || be.v[1] < 0 || be.v[1] >= nv)
      throw Error(Errc::InvalidIndex, "boundary edge index out of range");
    auto it = open_edges.find(key);
    if (it == open_edges.end()) {
      const bool interior = edges.count(key) != 0;
      throw Error(Errc::NonConforming, "listed boundary edge (" + std::to_string(be.v[0]) + "," +
                                           std::to_string(be.v[1]) + ") " +
                                           (interior ? "is interior or repeated" : "is not a cell edge"));
    }
    oriented.push_back(BoundaryEdge{it->second, be.marker});
    has_gamma0 = has_gamma0 || be.marker == BoundaryMarker::Gamma0;
    open_edges.erase(it);
  }
  if (!open_edges.empty()) {
    const auto& e = open_edges.begin()->second;
    throw Error(Errc::UnmarkedBoundaryEdge,
                "edge (" + std::to_string(e[0]) + "," + std::to_string(e[1]) + ") has no marker");
  }
  if (!has_gamma0) throw Error(Errc::EmptyGamma0, "no Gamma0 boundary edge");

  std::sort(oriented.begin(), oriented.end(), [](const BoundaryEdge& l, const BoundaryEdge& r) { return l.v < r.v; });

  PolygonalMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.cells_ = std::move(cells);
  mesh.boundary_ = std::move(oriented);
  mesh.geometry_ = std::move(geometry);
  return mesh;
}

PolygonalMesh build_mesh(std::vector<Point2> vertices, std::vector<std::vector<Index>> cells, const MarkerRule& rule) {
  // detect edges used once, orient via the CCW cycle, then validate through the explicit path
  std::unordered_map<std::uint64_t, std::pair<std::array<Index, 2>, int>> count;
  for (const auto& cyc : cells) {
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const Index a = cyc[i], b = cyc[(i + 1) % cyc.size()];
      if (a < 0 || b < 0 || a >= static_cast<Index>(vertices.size()) || b >= static_cast<Index>(vertices.size()))
        throw Error(Errc::InvalidIndex, "vertex index out of range");
      auto& entry = count[edge_key(a, b)];
      entry.first = {a, b};
      ++entry.second;
    }
  }
  std::vector<BoundaryEdge> boundary;
  for (const auto& [key, entry] : count) {
    if (entry.second != 1) continue;
    const auto [a, b] = entry.first;
    boundary.push_back({{a, b}, rule(vertices[static_cast<std::size_t>(a)], vertices[static_cast<std::size_t>(b)])});
  }
  std::sort(boundary.begin(), boundary.end(), [](const BoundaryEdge& l, const BoundaryEdge& r) { return l.v < r.v; });
  return build_mesh(std::move(vertices), std::move(cells), std::move(boundary));
}

}  // namespace steklov
