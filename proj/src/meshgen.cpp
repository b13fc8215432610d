#include "steklov/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "mesh_builder.hpp"

namespace steklov {

namespace {

using detail::MeshBuilder;

enum class CellStyle { Quad, TriangleMidpoint, TrianglePerturbed, CrossedPerturbed };

// a + (b - a) * i / n with exact endpoints
double lerp_exact(double a, double b, int i, int n) {
  if (i == 0) return a;
  if (i == n) return b;
  return a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
}

// Node coordinates of consecutive intervals [breaks[k], breaks[k+1]] split into pieces[k] parts.
std::vector<double> subdivide(const std::vector<double>& breaks, const std::vector<int>& pieces) {
  std::vector<double> nodes{breaks.front()};
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    for (int i = 1; i <= pieces[k]; ++i) nodes.push_back(lerp_exact(breaks[k], breaks[k + 1], i, pieces[k]));
  return nodes;
}

bool lex_less(Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

Point2 edge_point(Point2 a, Point2 b, CellStyle style) {
  if (style == CellStyle::TriangleMidpoint) return 0.5 * (a + b);
  // distance h_e^2 from the lexicographically smaller endpoint: s + h_e (t - s)
  const Point2 s = lex_less(a, b) ? a : b;
  const Point2 t = lex_less(a, b) ? b : a;
  const double he = distance(s, t);
  return s + he * (t - s);
}

void add_triangle_hexagon(MeshBuilder& mb, Point2 a, Point2 b, Point2 c, CellStyle style) {
  const Index ia = mb.add_vertex(a), ib = mb.add_vertex(b), ic = mb.add_vertex(c);
  const Index iab = mb.add_vertex(edge_point(a, b, style));
  const Index ibc = mb.add_vertex(edge_point(b, c, style));
  const Index ica = mb.add_vertex(edge_point(c, a, style));
  mb.add_cell({ia, iab, ib, ibc, ic, ica});
}

// Tensor grid over xs x ys; a cell is emitted when `inside(center)` holds.
void add_grid(MeshBuilder& mb, const std::vector<double>& xs, const std::vector<double>& ys,
              const std::function<bool(Point2)>& inside, CellStyle style) {
  for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const Point2 p00{xs[i], ys[j]}, p10{xs[i + 1], ys[j]}, p11{xs[i + 1], ys[j + 1]}, p01{xs[i], ys[j + 1]};
      if (!inside(0.5 * (p00 + p11))) continue;
      if (style == CellStyle::Quad) {
        mb.add_cell({mb.add_vertex(p00), mb.add_vertex(p10), mb.add_vertex(p11), mb.add_vertex(p01)});
      } else if (style == CellStyle::CrossedPerturbed) {
        // four triangles around the square's centre
        const Point2 c = 0.5 * (p00 + p11);
        add_triangle_hexagon(mb, p00, p10, c, CellStyle::TrianglePerturbed);
        add_triangle_hexagon(mb, p10, p11, c, CellStyle::TrianglePerturbed);
        add_triangle_hexagon(mb, p11, p01, c, CellStyle::TrianglePerturbed);
        add_triangle_hexagon(mb, p01, p00, c, CellStyle::TrianglePerturbed);
      } else {
        add_triangle_hexagon(mb, p00, p10, p11, style);
        add_triangle_hexagon(mb, p00, p11, p01, style);
      }
    }
  }
}

int ceil_div(int num, int den) { return (num + den - 1) / den; }

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::T1: return "t1";
    case Family::T2: return "t2";
    case Family::T3: return "t3";
    case Family::T4: return "t4";
    case Family::T5: return "t5";
    case Family::T6: return "t6";
    case Family::T6L: return "t6l";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::T1, Family::T2, Family::T3, Family::T4, Family::T5, Family::T6, Family::T6L})
    if (to_string(f) == name) return f;
  throw Error(Errc::InvalidArgument, "unknown mesh family '" + std::string(name) + "'");
}

std::string_view to_string(DomainShape s) {
  switch (s) {
    case DomainShape::UnitSquare: return "square";
    case DomainShape::RotatedT: return "rotated-t";
    case DomainShape::LShape: return "lshape";
  }
  return "?";
}

DomainShape parse_domain(std::string_view name) {
  if (name == "square") return DomainShape::UnitSquare;
  if (name == "rotated-t" || name == "tee") return DomainShape::RotatedT;
  if (name == "lshape") return DomainShape::LShape;
  throw Error(Errc::InvalidArgument, "unknown domain '" + std::string(name) + "'");
}

DomainSpec domain_of(Family f) {
  switch (f) {
    case Family::T1:
    case Family::T2: return {DomainShape::UnitSquare, Gamma0Rule::TopEdge};
    case Family::T3:
    case Family::T4:
    case Family::T5: return {DomainShape::RotatedT, Gamma0Rule::FullBoundary};
    case Family::T6:
    case Family::T6L: return {DomainShape::LShape, Gamma0Rule::FullBoundary};
  }
  return {};
}

double domain_area(DomainShape s) {
  switch (s) {
    case DomainShape::UnitSquare: return 1.0;
    case DomainShape::RotatedT: return 1.0;
    case DomainShape::LShape: return 0.75;
  }
  return 0.0;
}

MarkerRule marker_rule(const DomainSpec& domain) {
  if (domain.gamma0 == Gamma0Rule::FullBoundary) return [](Point2, Point2) { return BoundaryMarker::Gamma0; };
  return [](Point2 a, Point2 b) { return a.y == 1.0 && b.y == 1.0 ? BoundaryMarker::Gamma0 : BoundaryMarker::Gamma1; };
}

PolygonalMesh gen_square_glued(int n) {
  if (n < 2) throw Error(Errc::InvalidN, "T1 needs N >= 2");
  MeshBuilder mb;
  const auto all = [](Point2) { return true; };
  // above y = 0.6: N columns, ceil(0.4 N) rows
  add_grid(mb, subdivide({0.0, 1.0}, {n}), subdivide({0.6, 1.0}, {ceil_div(2 * n, 5)}), all, CellStyle::Quad);
  // below: N + 1 columns, ceil(0.6 (N + 1)) rows
  add_grid(mb, subdivide({0.0, 1.0}, {n + 1}), subdivide({0.0, 0.6}, {ceil_div(3 * (n + 1), 5)}), all,
           CellStyle::Quad);
  return mb.finish(marker_rule({DomainShape::UnitSquare, Gamma0Rule::TopEdge}));
}

PolygonalMesh gen_square_perturbed_triangles(int n) {
  if (n < 2) throw Error(Errc::InvalidN, "T2 needs N >= 2");
  MeshBuilder mb;
  const auto nodes = subdivide({0.0, 1.0}, {n});
  add_grid(mb, nodes, nodes, [](Point2) { return true; }, CellStyle::CrossedPerturbed);
  return mb.finish(marker_rule({DomainShape::UnitSquare, Gamma0Rule::TopEdge}));
}

PolygonalMesh gen_rotated_t(int n, int variant) {
  if (n < 4) throw Error(Errc::InvalidN, "rotated-T families need N >= 4");
  if (variant < 3 || variant > 5) throw Error(Errc::InvalidArgument, "rotated-T variant must be 3, 4 or 5");
  // pieces for lengths 1/4, 1/2 and 1 at resolution r
  const auto quarter = [](int r) { return ceil_div(r, 4); };
  const auto half = [](int r) { return ceil_div(r, 2); };

  MeshBuilder mb;
  const int nl = n;
  const auto left_in = [](Point2 c) { return (c.y < 0.0) || (c.x > -0.25); };
  add_grid(mb, subdivide({-0.5, -0.25, 0.0}, {quarter(nl), quarter(nl)}), subdivide({-0.5, 0.0, 1.0}, {half(nl), nl}),
           left_in, CellStyle::Quad);

  // right half about 5/4 finer; the -1 keeps the two interface node sets incommensurate
  const int nr = (5 * n + 2) / 4 - 1;
  const CellStyle right_style = variant == 3   ? CellStyle::Quad
                                : variant == 4 ? CellStyle::TriangleMidpoint
                                               : CellStyle::TrianglePerturbed;
  const auto right_in = [](Point2 c) { return (c.y < 0.0) || (c.x < 0.25); };
  add_grid(mb, subdivide({0.0, 0.25, 0.5}, {quarter(nr), quarter(nr)}), subdivide({-0.5, 0.0, 1.0}, {half(nr), nr}),
           right_in, right_style);
  return mb.finish(marker_rule({DomainShape::RotatedT, Gamma0Rule::FullBoundary}));
}

PolygonalMesh gen_lshape_uniform(int n) {
  if (n < 2 || n % 2 != 0) throw Error(Errc::InvalidN, "T6 needs an even N >= 2");
  MeshBuilder mb;
  const auto nodes = subdivide({0.0, 1.0}, {n});
  add_grid(mb, nodes, nodes, [](Point2 c) { return c.x < 0.5 || c.y < 0.5; }, CellStyle::Quad);
  return mb.finish(marker_rule({DomainShape::LShape, Gamma0Rule::FullBoundary}));
}

PolygonalMesh refine_lshape_corner(const PolygonalMesh& mesh, int level, int n, RefineReport* report) {
  if (level < 1) throw Error(Errc::InvalidArgument, "refinement level must be >= 1");
  if (n < 2) throw Error(Errc::InvalidN, "N must be >= 2");
  const double radius = 6.0 / n * std::ldexp(1.0, 1 - level);
  RefineReport local;

  MeshBuilder mb;
  for (const auto& p : mesh.vertices()) mb.add_vertex(p);
  const auto& verts = mesh.vertices();

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& cyc = mesh.cells()[c];
    const auto& g = mesh.geometry(static_cast<Index>(c));
    const Point2 bary = g.centroid;
    if (std::abs(bary.x - 0.5) > radius || std::abs(bary.y - 0.5) > radius) {
      mb.add_cell(cyc);
      continue;
    }
    ++local.refined_cells;

    // corners: vertices with a non-flat interior angle
    const std::size_t nv = cyc.size();
    std::vector<std::size_t> corners;
    for (std::size_t i = 0; i < nv; ++i) {
      const Point2 p = verts[static_cast<std::size_t>(cyc[(i + nv - 1) % nv])];
      const Point2 v = verts[static_cast<std::size_t>(cyc[i])];
      const Point2 q = verts[static_cast<std::size_t>(cyc[(i + 1) % nv])];
      const Point2 u = v - p, w = q - v;
      const bool flat = std::abs(cross(u, w)) <= 1e-12 * norm(u) * norm(w) && dot(u, w) > 0.0;
      if (!flat) corners.push_back(i);
    }
    if (corners.size() > 4) ++local.non_quad_cells;

    const Index center = mb.add_vertex(bary);
    const std::size_t k = corners.size();
    // midpoint of each corner-to-corner edge, as a position in an expanded local cycle
    std::vector<std::vector<Index>> chains(k);  // chain i: corner i .. corner i+1 (inclusive), with midpoint
    std::vector<std::size_t> mid_pos(k);
    for (std::size_t e = 0; e < k; ++e) {
      const std::size_t from = corners[e], to = corners[(e + 1) % k];
      std::vector<Index> chain;
      for (std::size_t i = from;; i = (i + 1) % nv) {
        chain.push_back(cyc[i]);
        if (i == to) break;
      }
      const Point2 a = verts[static_cast<std::size_t>(chain.front())];
      const Point2 b = verts[static_cast<std::size_t>(chain.back())];
      const Point2 m = 0.5 * (a + b);
      const double tm = distance(a, m);
      // insert the midpoint (reusing an existing flat vertex if it is already there)
      std::size_t pos = 1;
      while (pos + 1 < chain.size() && distance(a, verts[static_cast<std::size_t>(chain[pos])]) < tm - MeshBuilder::kMergeTol)
        ++pos;
      const Index mid = mb.add_vertex(m);
      if (chain[pos] != mid) chain.insert(chain.begin() + static_cast<std::ptrdiff_t>(pos), mid);
      mid_pos[e] = pos;
      chains[e] = std::move(chain);
    }
    // sub-cell around corner e+1: center, mid_e, .., corner e+1, .., mid_{e+1}
    for (std::size_t e = 0; e < k; ++e) {
      const auto& first = chains[e];
      const auto& second = chains[(e + 1) % k];
      std::vector<Index> sub{center};
      for (std::size_t i = mid_pos[e]; i < first.size(); ++i) sub.push_back(first[i]);
      for (std::size_t i = 1; i <= mid_pos[(e + 1) % k]; ++i) sub.push_back(second[i]);
      mb.add_cell(std::move(sub));
    }
  }

  // inherit markers from the parent boundary edge containing the new edge
  std::vector<std::pair<Point2, Point2>> gamma0_segments;
  for (const auto& be : mesh.boundary_edges())
    if (be.marker == BoundaryMarker::Gamma0)
      gamma0_segments.emplace_back(verts[static_cast<std::size_t>(be.v[0])], verts[static_cast<std::size_t>(be.v[1])]);
  const auto inherit = [segs = std::move(gamma0_segments)](Point2 a, Point2 b) {
    const Point2 m = 0.5 * (a + b);
    for (const auto& [p, q] : segs) {
      const Point2 d = q - p;
      const double len = norm(d);
      const double t = dot(m - p, d) / (len * len);
      if (t > 0.0 && t < 1.0 && std::abs(cross(d, m - p)) <= 1e-10 * len * len) return BoundaryMarker::Gamma0;
    }
    return BoundaryMarker::Gamma1;
  };
  if (report) *report = local;
  return mb.finish(inherit);
}

PolygonalMesh gen_lshape_corner_refined(int n, int levels) {
  auto mesh = gen_lshape_uniform(n);
  for (int l = 1; l <= levels; ++l) mesh = refine_lshape_corner(mesh, l, n);
  return mesh;
}

PolygonalMesh generate(Family family, int n, int level) {
  switch (family) {
    case Family::T1: return gen_square_glued(n);
    case Family::T2: return gen_square_perturbed_triangles(n);
    case Family::T3: return gen_rotated_t(n, 3);
    case Family::T4: return gen_rotated_t(n, 4);
    case Family::T5: return gen_rotated_t(n, 5);
    case Family::T6: return gen_lshape_uniform(n);
    case Family::T6L: return gen_lshape_corner_refined(n, level);
  }
  throw Error(Errc::InvalidArgument, "unknown family");
}

}  // namespace steklov
