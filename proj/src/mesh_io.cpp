#include "steklov/mesh_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace steklov {

using nlohmann::json;

namespace {

PolygonalMesh from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("cells") || !doc.contains("boundary"))
    throw Error(Errc::InvalidArgument, "mesh JSON needs \"vertices\", \"cells\" and \"boundary\"");

  std::vector<Point2> vertices;
  for (const auto& v : doc.at("vertices")) {
    if (!v.is_array() || v.size() != 2) throw Error(Errc::InvalidArgument, "vertex must be [x, y]");
    vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  std::vector<std::vector<Index>> cells;
  for (const auto& c : doc.at("cells")) cells.push_back(c.get<std::vector<Index>>());

  std::vector<BoundaryEdge> boundary;
  for (const auto& b : doc.at("boundary")) {
    if (!b.is_array() || b.size() != 3) throw Error(Errc::InvalidArgument, "boundary entry must be [i, j, marker]");
    const auto tag = b[2].get<std::string>();
    BoundaryMarker marker;
    if (tag == "gamma0")
      marker = BoundaryMarker::Gamma0;
    else if (tag == "gamma1")
      marker = BoundaryMarker::Gamma1;
    else
      throw Error(Errc::UnmarkedBoundaryEdge, "unknown boundary marker \"" + tag + "\"");
    boundary.push_back({{b[0].get<Index>(), b[1].get<Index>()}, marker});
  }
  return build_mesh(std::move(vertices), std::move(cells), std::move(boundary));
}

}  // namespace

PolygonalMesh parse_mesh_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed mesh JSON: ") + e.what());
  }
  try {
    return from_json(doc);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed mesh JSON: ") + e.what());
  }
}

PolygonalMesh read_mesh_json(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mesh_json(buf.str());
}

PolygonalMesh read_mesh_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return read_mesh_json(in);
}

void write_mesh_json(std::ostream& out, const PolygonalMesh& mesh) {
  json doc;
  auto& vs = doc["vertices"] = json::array();
  for (const auto& p : mesh.vertices()) vs.push_back({p.x, p.y});
  doc["cells"] = mesh.cells();
  auto& bs = doc["boundary"] = json::array();
  for (const auto& e : mesh.boundary_edges())
    bs.push_back({e.v[0], e.v[1], e.marker == BoundaryMarker::Gamma0 ? "gamma0" : "gamma1"});
  out << doc.dump() << '\n';
}

void write_mesh_json(const std::filesystem::path& path, const PolygonalMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  write_mesh_json(out, mesh);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

}  // namespace steklov
