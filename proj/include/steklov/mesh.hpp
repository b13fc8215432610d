#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "steklov/error.hpp"

namespace steklov {

using Index = std::int32_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

enum class BoundaryMarker { Gamma0, Gamma1 };

struct BoundaryEdge {
  std::array<Index, 2> v;  // oriented as traversed by the owning (CCW) cell
  BoundaryMarker marker = BoundaryMarker::Gamma1;
};

/// Marks a boundary edge given its endpoints; used when boundary edges are detected
/// rather than listed.
using MarkerRule = std::function<BoundaryMarker(Point2, Point2)>;

struct EdgeGeometry {
  Index i = 0;  // local endpoint indices, edge runs i -> j in CCW order
  Index j = 0;
  double length = 0.0;
  Point2 normal;  // outward unit normal
};

/// Cached per-cell geometry. Vertex and edge arrays follow the cell's CCW cycle;
/// edge e joins local vertices e and e+1 (mod n).
struct ElementGeometry {
  std::vector<Index> global_ids;
  std::vector<Point2> vertices;
  std::vector<EdgeGeometry> edges;
  double area = 0.0;
  double diameter = 0.0;
  Point2 centroid;
  double boundary_length = 0.0;
  Point2 boundary_centroid;

  std::size_t size() const { return vertices.size(); }
  double min_edge_length() const;
};

/// Conforming polygonal mesh with Gamma0/Gamma1 boundary markers. Immutable once built;
/// every cell cycle is stored counter-clockwise.
class PolygonalMesh {
public:
  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::vector<Index>>& cells() const { return cells_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  const ElementGeometry& geometry(Index cell) const { return geometry_.at(static_cast<std::size_t>(cell)); }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }

  double total_area() const;
  double gamma0_length() const;
  /// Largest element diameter.
  double h_max() const;
  /// Sorted vertex indices touching at least one Gamma0 edge.
  std::vector<Index> gamma0_vertices() const;

private:
  friend PolygonalMesh build_mesh(std::vector<Point2>, std::vector<std::vector<Index>>,
                                  std::vector<BoundaryEdge>);
  std::vector<Point2> vertices_;
  std::vector<std::vector<Index>> cells_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<ElementGeometry> geometry_;
};

/// Validates and builds a mesh from an explicit boundary-edge list. Cycles with negative
/// signed area are reversed. Throws Error with NonSimplePolygon, NonConforming,
/// ZeroLengthEdge, UnmarkedBoundaryEdge, EmptyGamma0 or InvalidIndex.
PolygonalMesh build_mesh(std::vector<Point2> vertices, std::vector<std::vector<Index>> cells,
                         std::vector<BoundaryEdge> boundary);

/// Same, but boundary edges are detected (edges used by exactly one cell) and marked by `rule`.
PolygonalMesh build_mesh(std::vector<Point2> vertices, std::vector<std::vector<Index>> cells,
                         const MarkerRule& rule);

/// Geometry of one cell; area by the shoelace formula, diameter as the largest vertex distance.
const ElementGeometry& element_geometry(const PolygonalMesh& mesh, Index cell);

ElementGeometry compute_element_geometry(std::span<const Point2> vertices,
                                         std::span<const Index> ids = {});

double signed_area(std::span<const Point2> polygon);

// ---------------------------------------------------------------------------
// Quality diagnostics

/// Radius of the largest disk inside the kernel of a CCW polygon, with its center.
struct KernelDisk {
  Point2 center;
  double radius = 0.0;
};

/// Chebyshev center of the intersection of the inner half-planes of all edges.
/// Returns std::nullopt when that intersection has empty interior.
std::optional<KernelDisk> kernel_chebyshev_disk(std::span<const Point2> polygon);

/// rho(K)/h_K for one cell. Throws Error(EmptyKernel) for non star-shaped cells.
double star_shaped_ratio(const PolygonalMesh& mesh, Index cell);

struct CellQuality {
  std::optional<double> star_ratio;  // empty when the kernel is empty
  double min_edge_ratio = 0.0;
  bool empty_kernel = false;
  bool below_gamma = false;
};

struct MeshQualityReport {
  std::vector<CellQuality> cells;
  double min_star_ratio = 0.0;  // over cells with a non-empty kernel
  double min_edge_ratio = 0.0;
  std::vector<Index> flagged;   // empty kernel or star ratio below gamma
};

MeshQualityReport quality_report(const PolygonalMesh& mesh, double gamma = 0.0);

}  // namespace steklov
