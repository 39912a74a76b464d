#pragma once

#include <filesystem>
#include <iosfwd>

#include "dbound/mesh.hpp"

namespace dbound {

/// Wavefront OBJ: `v x y z` and `f` records (1-based, negative indices
/// allowed, `i/j/k` tokens accepted). Polygons are fan-triangulated.
RawMesh read_obj(std::istream& in);
void write_obj(std::ostream& out, const RawMesh& mesh);

/// `{dimension, vertices, triangles}` with 0-based indices.
RawMesh read_mesh_json(std::istream& in);
void write_mesh_json(std::ostream& out, const RawMesh& mesh);

/// Dispatches on extension (.obj or .mesh.json / .json).
RawMesh read_mesh_file(const std::filesystem::path& path);
void write_mesh_file(const std::filesystem::path& path, const RawMesh& mesh);

}  // namespace dbound
