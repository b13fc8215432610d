#pragma once

#include <string>
#include <string_view>

#include "steklov/mesh.hpp"

namespace steklov {

enum class DomainShape { UnitSquare, RotatedT, LShape };
enum class Gamma0Rule { TopEdge, FullBoundary };

struct DomainSpec {
  DomainShape shape = DomainShape::UnitSquare;
  Gamma0Rule gamma0 = Gamma0Rule::TopEdge;
};

/// Mesh families. T1/T2 live on the unit square (Gamma0 = top edge), T3-T5 on the
/// rotated T and T6/T6L on the L-shape (Gamma0 = whole boundary).
enum class Family { T1, T2, T3, T4, T5, T6, T6L };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);  // "t1".."t6", "t6l"; throws InvalidArgument
std::string_view to_string(DomainShape s);
DomainShape parse_domain(std::string_view name);  // "square", "rotated-t" / "tee", "lshape"
DomainSpec domain_of(Family f);
double domain_area(DomainShape s);

/// Marker rule for a domain: TopEdge marks edges with both endpoints on y = 1.
MarkerRule marker_rule(const DomainSpec& domain);

/// Unit square glued at y = 0.6: N columns above, N + 1 below; interface vertices of each
/// side become flat-angle vertices of the other side's cells. Requires N >= 2.
PolygonalMesh gen_square_glued(int n);

/// N x N squares, each split into four triangles around its centre; every triangle edge of length h_e gets one
/// extra vertex at distance h_e^2 from its lexicographically smaller endpoint, turning each
/// triangle into a hexagon. Requires N >= 2 (at N = 1 the inserted points leave the edges).
PolygonalMesh gen_square_perturbed_triangles(int n);

/// Rotated T, two structured halves glued at x = 0. Left half: quads at resolution N.
/// Right half at resolution round(5N/4) - 1: quads (variant 3), triangles with edge midpoints
/// (variant 4) or triangles with edge points at distance h_e^2 (variant 5). Requires N >= 4.
PolygonalMesh gen_rotated_t(int n, int variant);

/// Uniform square grid of the L-shape with step 1/N. Requires N >= 2 and even.
PolygonalMesh gen_lshape_uniform(int n);

struct RefineReport {
  int refined_cells = 0;
  int non_quad_cells = 0;  // refined cells with more than 4 corners (fanned split)
};

/// One corner-refinement step: every cell whose centroid lies in
/// R_level = {|x - 1/2| <= (6/N) 2^(1-level), |y - 1/2| <= (6/N) 2^(1-level)} is split by
/// joining its centroid to the midpoints of its corner-to-corner edges. Neighbours gain the
/// new midpoints as flat-angle vertices; boundary markers are inherited.
PolygonalMesh refine_lshape_corner(const PolygonalMesh& mesh, int level, int n, RefineReport* report = nullptr);

/// T6 mesh at N followed by corner refinements 1..levels.
PolygonalMesh gen_lshape_corner_refined(int n, int levels);

/// Dispatch by family; `level` is only used by T6L.
PolygonalMesh generate(Family family, int n, int level = 0);

}  // namespace steklov
