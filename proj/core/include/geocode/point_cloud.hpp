#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geocode/mesh.hpp"

namespace geocode::pc {

using geom::Vec3;

enum class Provenance { fps, random };

std::string_view to_string(Provenance p) noexcept;
Provenance provenance_from_string(std::string_view s);

struct PointCloud {
  std::vector<Vec3> points;
  Provenance provenance = Provenance::random;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return points.size(); }
  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

/// Area-uniform samples. Every sample consumes exactly three uniform draws
/// (face, then two barycentric), so the stream does not depend on the mesh
/// and nearby meshes get nearby samples. Throws GeometryError on a zero-area
/// mesh, ValidationError on n == 0.
PointCloud surface_sample(const geom::LabeledMesh& m, std::size_t n, std::uint64_t seed);

/// Greedy farthest-point selection from `start`; ties go to the lower index.
/// Returns indices in selection order. Throws ValidationError unless
/// 1 <= k <= |points| and start < |points|.
std::vector<std::size_t> fps(std::span<const Vec3> points, std::size_t k, std::size_t start = 0);

/// The selected points as a cloud tagged fps.
PointCloud fps_cloud(const PointCloud& cloud, std::size_t k, std::size_t start = 0);

inline constexpr std::size_t kFpsPool = 16384;
inline constexpr std::size_t kFpsCount = 1500;
inline constexpr std::size_t kRandomCount = 1500;
inline constexpr std::size_t kRandomPick = 800;

struct TrainingClouds {
  PointCloud fps;     // FPS-1500 over a dense area-uniform pool
  PointCloud random;  // separate 1500 area-uniform samples
  std::vector<std::size_t> picks;  // 800 distinct indices into `random`
  PointCloud combined;             // fps followed by the picked points (2300)
};

TrainingClouds make_training_clouds(const geom::LabeledMesh& m, std::uint64_t seed);
PointCloud make_training_cloud(const geom::LabeledMesh& m, std::uint64_t seed);

/// Isotropic Gaussian jitter with standard deviation sigma (absolute units).
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, std::uint64_t seed);

/// Bounding-box diagonal of the points.
double extent(const PointCloud& cloud);

// Binary format: "PCXYZ001", then little-endian f32 x y z per point.
inline constexpr std::string_view kPcxyzMagic = "PCXYZ001";

std::string encode_pcxyz(const PointCloud& cloud);
/// Throws ParseError on a bad header or truncated payload.
PointCloud decode_pcxyz(std::string_view bytes);

/// Writes `path` and its JSON sidecar (same stem, ".json") holding count,
/// seed and provenance.
void save_pcxyz(const PointCloud& cloud, const std::filesystem::path& path);
/// Reads `path`; the sidecar is optional.
PointCloud load_pcxyz(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& pcxyz);

}  // namespace geocode::pc
