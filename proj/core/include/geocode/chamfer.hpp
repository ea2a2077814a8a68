#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "geocode/mesh.hpp"
#include "geocode/point_cloud.hpp"

namespace geocode::metrics {

using geom::Vec3;

/// Squared Euclidean distance, summed x, y, z in that order. Every chamfer
/// path uses this so indexed and exhaustive results agree bit for bit.
inline double squared_distance(const Vec3& a, const Vec3& b) noexcept {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Immutable nearest-neighbor index (R-tree) over a point set.
class CloudIndex {
 public:
  /// Throws ValidationError on an empty set.
  explicit CloudIndex(std::vector<Vec3> points);
  ~CloudIndex();
  CloudIndex(CloudIndex&&) noexcept;
  CloudIndex& operator=(CloudIndex&&) noexcept;

  const std::vector<Vec3>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

  /// Squared distance from q to its nearest indexed point.
  double nearest_squared(const Vec3& q) const;

  /// Mean over `queries` of the squared nearest distance.
  double mean_nearest_squared(std::span<const Vec3> queries) const;

 private:
  struct Tree;
  std::vector<Vec3> points_;
  std::unique_ptr<Tree> tree_;
};

/// Bi-directional chamfer with squared distances:
/// mean_a min_b |a-b|^2 + mean_b min_a |a-b|^2.
/// Throws ValidationError when either set is empty.
double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);
double chamfer(const pc::PointCloud& a, const pc::PointCloud& b);
double chamfer(const CloudIndex& a, const CloudIndex& b);

/// O(n*m) reference implementation.
double chamfer_brute(std::span<const Vec3> a, std::span<const Vec3> b);

inline constexpr std::size_t kMeshChamferSamples = 10000;

/// Chamfer between area-uniform samples of the two meshes drawn with the
/// same seed.
double mesh_chamfer(const geom::LabeledMesh& ma, const geom::LabeledMesh& mb, std::size_t n = kMeshChamferSamples,
                    std::uint64_t seed = 0);

}  // namespace geocode::metrics
