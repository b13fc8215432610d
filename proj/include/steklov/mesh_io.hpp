#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "steklov/mesh.hpp"

namespace steklov {

// JSON mesh schema:
//   { "vertices": [[x, y], ...],
//     "cells":    [[i0, i1, ...], ...],
//     "boundary": [[i, j, "gamma0" | "gamma1"], ...] }
// Indices are 0-based. Readers validate through build_mesh and rethrow its errors.

PolygonalMesh read_mesh_json(std::istream& in);
PolygonalMesh read_mesh_json(const std::filesystem::path& path);
PolygonalMesh parse_mesh_json(const std::string& text);

void write_mesh_json(std::ostream& out, const PolygonalMesh& mesh);
void write_mesh_json(const std::filesystem::path& path, const PolygonalMesh& mesh);

}  // namespace steklov
