#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "geocode/mesh.hpp"

namespace geocode::metrics {

using Vec2 = Eigen::Vector2d;

struct StabilityOptions {
  /// Contact distance as a fraction of the bounding-box diagonal.
  double contact_fraction = 1e-3;
  /// Support band as a fraction of the shape height above its lowest point.
  double support_fraction = 0.02;
  /// Required center-of-mass margin as a fraction of the diagonal.
  double margin_fraction = 0.01;
};

struct Components {
  /// Merged component id per face, numbered in order of first face.
  std::vector<std::uint32_t> face_component;
  std::size_t count = 0;
};

/// Face-adjacency components merged when they touch: a vertex of one lies
/// within eps of a triangle of the other, or inside the other when that
/// component is closed.
Components connected_components(const geom::LabeledMesh& m, double eps);

struct StabilityReport {
  bool stable = false;
  /// Components not merged with the one owning the lowest vertex.
  std::size_t detached_components = 0;
  /// Signed distance from the ground projection of the center of mass to the
  /// support polygon boundary, positive inside.
  double com_margin = 0.0;
  double margin_tolerance = 0.0;
  std::size_t components = 0;
  geom::Vec3 center_of_mass = geom::Vec3::Zero();
  bool volume_weighted = false;
  std::vector<Vec2> support_polygon;
};

/// Static stand-in for a drop test: no detached parts and the center of mass
/// strictly over the support polygon with margin above the tolerance.
/// An empty mesh is reported unstable.
StabilityReport stability(const geom::LabeledMesh& m, const StabilityOptions& opts = {});

nlohmann::json to_json(const StabilityReport& r);

}  // namespace geocode::metrics
