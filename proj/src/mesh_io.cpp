#include "dbound/mesh_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dbound/numeric.hpp"

namespace dbound {

namespace {

long parse_obj_index(const std::string& token, std::size_t vertex_count, std::size_t line_no) {
  const std::string head = token.substr(0, token.find('/'));
  long idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stol(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw MeshError("obj line " + std::to_string(line_no) + ": bad face index '" + token + "'");
  }
  if (idx < 0) idx += static_cast<long>(vertex_count) + 1;
  if (idx < 1) throw MeshError("obj line " + std::to_string(line_no) + ": face index out of range");
  return idx - 1;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

RawMesh read_obj(std::istream& in) {
  RawMesh mesh;
  mesh.dimension = 3;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw MeshError("obj line " + std::to_string(line_no) + ": bad vertex");
      mesh.vertices.emplace_back(x, y, z, 0.0);
    } else if (tag == "f") {
      std::vector<Index> poly;
      std::string tok;
      while (ss >> tok) poly.push_back(static_cast<Index>(parse_obj_index(tok, mesh.vertices.size(), line_no)));
      if (poly.size() < 3) throw MeshError("obj line " + std::to_string(line_no) + ": face needs 3 vertices");
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) mesh.triangles.push_back({poly[0], poly[i], poly[i + 1]});
    }
  }
  return mesh;
}

void write_obj(std::ostream& out, const RawMesh& mesh) {
  if (mesh.dimension != 3) throw MeshError("OBJ export needs a 3D mesh; use .mesh.json");
  for (const auto& v : mesh.vertices) out << "v " << fmt12(v[0]) << ' ' << fmt12(v[1]) << ' ' << fmt12(v[2]) << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

RawMesh read_mesh_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw MeshError(std::string("mesh document: ") + e.what());
  }
  RawMesh mesh;
  try {
    mesh.dimension = doc.at("dimension").get<int>();
    if (mesh.dimension != 3 && mesh.dimension != 4) throw MeshError("mesh dimension must be 3 or 4");
    for (const auto& row : doc.at("vertices")) {
      if (row.size() != static_cast<std::size_t>(mesh.dimension)) throw MeshError("vertex arity does not match dimension");
      Vec v = Vec::Zero();
      for (int i = 0; i < mesh.dimension; ++i) v[i] = row.at(i).get<double>();
      mesh.vertices.push_back(v);
    }
    for (const auto& row : doc.at("triangles")) {
      if (row.size() != 3) throw MeshError("triangle rows need 3 indices");
      mesh.triangles.push_back({row[0].get<Index>(), row[1].get<Index>(), row[2].get<Index>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw MeshError(std::string("mesh document: ") + e.what());
  }
  return mesh;
}

void write_mesh_json(std::ostream& out, const RawMesh& mesh) {
  nlohmann::json doc;
  doc["dimension"] = mesh.dimension;
  auto& verts = doc["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices) {
    auto row = nlohmann::json::array();
    for (int i = 0; i < mesh.dimension; ++i) row.push_back(round12(v[i]));
    verts.push_back(std::move(row));
  }
  auto& tris = doc["triangles"] = nlohmann::json::array();
  for (const auto& t : mesh.triangles) tris.push_back({t[0], t[1], t[2]});
  out << doc.dump() << '\n';
}

RawMesh read_mesh_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path.string());
  if (ends_with(path.string(), ".obj")) return read_obj(in);
  return read_mesh_json(in);
}

void write_mesh_file(const std::filesystem::path& path, const RawMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write " + path.string());
  if (ends_with(path.string(), ".obj"))
    write_obj(out, mesh);
  else
    write_mesh_json(out, mesh);
}

}  // namespace dbound
