#include "steklov/vtk.hpp"

#include <ostream>

namespace steklov {

void write_vtk(std::ostream& out, const PolygonalMesh& mesh, const std::vector<PointField>& fields) {
  const auto nv = mesh.num_vertices();
  const auto& cells = mesh.cells();
  const auto old = out.precision(17);

  out << "# vtk DataFile Version 3.0\n"
      << "steklov eigenfunctions\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const auto& p : mesh.vertices()) out << p.x << ' ' << p.y << " 0\n";

  std::size_t total = 0;
  for (const auto& c : cells) total += c.size() + 1;
  out << "CELLS " << cells.size() << ' ' << total << '\n';
  for (const auto& c : cells) {
    out << c.size();
    for (Index v : c) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << cells.size() << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) out << "7\n";  // VTK_POLYGON

  if (!fields.empty()) {
    out << "POINT_DATA " << nv << '\n';
    for (const auto& [name, values] : fields) {
      if (values.size() != static_cast<Eigen::Index>(nv))
        throw Error(Errc::InvalidArgument, "field '" + name + "' does not match the vertex count");
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < values.size(); ++i) out << values(i) << '\n';
    }
  }
  out.precision(old);
}

}  // namespace steklov
