#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "geocode/mesh.hpp"

namespace geocode::geom {

/// Wavefront OBJ text: every `v` line (6 decimals) first, then one `g <part>`
/// block per part in first-occurrence order holding that part's `f` lines.
std::string write_obj(const LabeledMesh& m);

/// Parses OBJ text. `g` groups become part labels; faces before any group get
/// the part "default". Polygons are fan-triangulated. Throws ParseError.
LabeledMesh read_obj(std::string_view text);

void save_obj(const LabeledMesh& m, const std::filesystem::path& path);
LabeledMesh load_obj(const std::filesystem::path& path);

/// Whole-file helpers shared by the I/O code. Throw IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace geocode::geom
