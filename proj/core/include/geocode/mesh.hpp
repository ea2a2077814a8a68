#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "geocode/curve.hpp"

namespace geocode::geom {

using Face = std::array<std::uint32_t, 3>;

/// Triangle mesh with one semantic part label per face. Labels are stored as
/// indices into `parts`, kept in first-use order.
struct LabeledMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<std::uint32_t> face_part;
  std::vector<std::string> parts;

  std::size_t vertex_count() const noexcept { return vertices.size(); }
  std::size_t face_count() const noexcept { return faces.size(); }
  bool empty() const noexcept { return faces.empty(); }

  const std::string& part_of(std::size_t face) const { return parts.at(face_part.at(face)); }

  /// Index of `name` in the part table, appending it when new.
  std::uint32_t intern_part(std::string_view name);

  /// Sub-mesh made of the faces labeled `name` (vertices compacted in first
  /// reference order).
  LabeledMesh extract_part(std::string_view name) const;

  friend bool operator==(const LabeledMesh&, const LabeledMesh&) = default;
};

/// Faces with area at or below this are considered degenerate.
inline constexpr double kMinFaceArea = 1e-12;

/// Throws GeometryError on out-of-range indices, zero-area faces or label
/// table inconsistencies.
void check_mesh(const LabeledMesh& m);

double face_area(const LabeledMesh& m, std::size_t f);
double surface_area(const LabeledMesh& m);
/// Divergence-theorem volume; positive for closed outward-oriented meshes.
double signed_volume(const LabeledMesh& m);
/// True when every undirected edge is shared by exactly two faces.
bool is_closed(const LabeledMesh& m);

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool valid() const { return (min.array() <= max.array()).all(); }
  Vec3 extent() const { return valid() ? Vec3(max - min) : Vec3::Zero(); }
  double diagonal() const { return extent().norm(); }
};

Aabb bounds(const LabeledMesh& m);
Aabb bounds(std::span<const Vec3> points);

/// Connected components by shared vertices; returns one component id per
/// face, ids numbered in order of first face.
std::vector<std::uint32_t> face_components(const LabeledMesh& m, std::size_t* count = nullptr);

/// Axis aligned box with outward faces.
LabeledMesh make_box(const Vec3& min, const Vec3& max, std::string_view part);

/// Sweeps `profile` along `path`. The cross-section at arc fraction t is the
/// profile scaled by scale(t) in the path's rotation-minimizing frame.
/// Produces profile_samples * path_samples ring vertices, two cap centers,
/// and a closed, outward-oriented surface.
LabeledMesh sweep(const ProfileCurve& profile, const PathCurve& path, const ScaleFunction& scale,
                  int profile_samples, int path_samples, std::string_view part);

inline constexpr int kDefaultProfileSamples = 16;
inline constexpr int kDefaultPathSamples = 32;

/// Input plus its reflection about the plane (point, unit normal), with the
/// reflected faces' winding flipped.
LabeledMesh mirror(const LabeledMesh& m, const Vec3& plane_point, const Vec3& plane_normal);

/// Reflection of a single point about a plane.
Vec3 reflect_point(const Vec3& p, const Vec3& plane_point, const Vec3& unit_normal);

/// k copies rotated by 2*pi*j/k about the axis (point, unit direction).
LabeledMesh rotational_replicate(const LabeledMesh& m, const Vec3& axis_point, const Vec3& axis_dir, int k);

/// Concatenation without welding.
LabeledMesh join(std::span<const LabeledMesh> parts);

/// Rigidly moves `element` so `local_anchor` lands on `target`. With
/// fit_width the element is first scaled about the anchor along the
/// anchor's tangent so its extent along that axis equals fit_width.
LabeledMesh attach(const LabeledMesh& element, const Frame& local_anchor, const Frame& target,
                   std::optional<double> fit_width = std::nullopt);

/// Relabels every face with `part`.
LabeledMesh tag_part(const LabeledMesh& m, std::string_view part);

}  // namespace geocode::geom
