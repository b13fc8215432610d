#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "steklov/mesh.hpp"

namespace steklov {

using PointField = std::pair<std::string, Eigen::VectorXd>;

/// Legacy VTK 3.0 ASCII unstructured grid: one POLYGON cell per mesh cell, z = 0, and one
/// POINT_DATA scalar array per field.
void write_vtk(std::ostream& out, const PolygonalMesh& mesh, const std::vector<PointField>& fields);

}  // namespace steklov
