#include "geocode/point_cloud.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "geocode/error.hpp"
#include "geocode/obj_io.hpp"
#include "geocode/rng.hpp"

namespace geocode::pc {

std::string_view to_string(Provenance p) noexcept { return p == Provenance::fps ? "fps" : "random"; }

Provenance provenance_from_string(std::string_view s) {
  if (s == "fps") return Provenance::fps;
  if (s == "random") return Provenance::random;
  throw ParseError(fmt::format("unknown point cloud provenance '{}'", s));
}

PointCloud surface_sample(const geom::LabeledMesh& m, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("n", "sample count must be at least 1");
  std::vector<double> cumulative(m.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    total += geom::face_area(m, f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw GeometryError("cannot sample a mesh with zero surface area");

  PointCloud out;
  out.provenance = Provenance::random;
  out.seed = seed;
  out.points.reserve(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = rng.uniform() * total;
    const double u = rng.uniform();
    const double v = rng.uniform();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    std::size_t f = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
    if (f >= m.faces.size()) f = m.faces.size() - 1;
    // upper_bound never lands on a zero-area face.
    const auto& t = m.faces[f];
    const double s = std::sqrt(u);
    const double a = 1.0 - s;
    const double b = s * (1.0 - v);
    const double c = s * v;
    out.points.push_back(a * m.vertices[t[0]] + b * m.vertices[t[1]] + c * m.vertices[t[2]]);
  }
  return out;
}

std::vector<std::size_t> fps(std::span<const Vec3> points, std::size_t k, std::size_t start) {
  const std::size_t n = points.size();
  if (k < 1 || k > n) throw ValidationError("k", fmt::format("fps count {} outside [1, {}]", k, n));
  if (start >= n) throw ValidationError("start", fmt::format("fps start {} outside [0, {})", start, n));
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  std::size_t current = start;
  for (std::size_t step = 0; step < k; ++step) {
    chosen.push_back(current);
    const Vec3 c = points[current];
    best[current] = -1.0;
    std::size_t next = n;
    double far = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (best[i] < 0.0) continue;
      const double d = (points[i] - c).squaredNorm();
      if (d < best[i]) best[i] = d;
      if (best[i] > far) {
        far = best[i];
        next = i;
      }
    }
    if (next == n) break;
    current = next;
  }
  return chosen;
}

PointCloud fps_cloud(const PointCloud& cloud, std::size_t k, std::size_t start) {
  const auto idx = fps(cloud.points, k, start);
  PointCloud out;
  out.provenance = Provenance::fps;
  out.seed = cloud.seed;
  out.points.reserve(idx.size());
  for (auto i : idx) out.points.push_back(cloud.points[i]);
  return out;
}

TrainingClouds make_training_clouds(const geom::LabeledMesh& m, std::uint64_t seed) {
  TrainingClouds out;
  const auto pool = surface_sample(m, kFpsPool, derive_seed({seed, 1}));
  out.fps = fps_cloud(pool, kFpsCount, 0);
  out.fps.seed = seed;
  out.random = surface_sample(m, kRandomCount, derive_seed({seed, 2}));
  out.random.seed = seed;

  // Partial Fisher-Yates: the first kRandomPick slots are the picks.
  std::vector<std::size_t> order(kRandomCount);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed({seed, 3}));
  for (std::size_t i = 0; i < kRandomPick; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.index(kRandomCount - i));
    std::swap(order[i], order[j]);
  }
  out.picks.assign(order.begin(), order.begin() + kRandomPick);

  out.combined.provenance = Provenance::fps;
  out.combined.seed = seed;
  out.combined.points = out.fps.points;
  for (auto i : out.picks) out.combined.points.push_back(out.random.points[i]);
  return out;
}

PointCloud make_training_cloud(const geom::LabeledMesh& m, std::uint64_t seed) {
  return make_training_clouds(m, seed).combined;
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma", "noise level must be non-negative");
  PointCloud out = cloud;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (auto& p : out.points)
    for (int c = 0; c < 3; ++c) p[c] += sigma * rng.normal();
  return out;
}

double extent(const PointCloud& cloud) { return geom::bounds(std::span<const Vec3>(cloud.points)).diagonal(); }

namespace {

void put_f32(std::string& out, float f) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

float get_f32(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace

std::string encode_pcxyz(const PointCloud& cloud) {
  std::string out(kPcxyzMagic);
  out.reserve(kPcxyzMagic.size() + cloud.points.size() * 12);
  for (const auto& p : cloud.points)
    for (int c = 0; c < 3; ++c) put_f32(out, static_cast<float>(p[c]));
  return out;
}

PointCloud decode_pcxyz(std::string_view bytes) {
  if (bytes.size() < kPcxyzMagic.size() || bytes.substr(0, kPcxyzMagic.size()) != kPcxyzMagic)
    throw ParseError("not a PCXYZ001 point cloud");
  const auto payload = bytes.substr(kPcxyzMagic.size());
  if (payload.size() % 12 != 0) throw ParseError("truncated PCXYZ payload");
  PointCloud out;
  out.points.reserve(payload.size() / 12);
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t i = 0; i < payload.size(); i += 12)
    out.points.emplace_back(get_f32(p + i), get_f32(p + i + 4), get_f32(p + i + 8));
  for (const auto& q : out.points)
    if (!q.allFinite()) throw ParseError("PCXYZ payload holds non-finite coordinates");
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& pcxyz) {
  auto p = pcxyz;
  p.replace_extension(".json");
  return p;
}

void save_pcxyz(const PointCloud& cloud, const std::filesystem::path& path) {
  geom::write_file(path, encode_pcxyz(cloud));
  const nlohmann::json side{
      {"count", cloud.points.size()}, {"seed", cloud.seed}, {"provenance", std::string(to_string(cloud.provenance))}};
  geom::write_file(sidecar_path(path), side.dump(2) + "\n");
}

PointCloud load_pcxyz(const std::filesystem::path& path) {
  auto cloud = decode_pcxyz(geom::read_file(path));
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(geom::read_file(side));
      if (doc.contains("seed")) cloud.seed = doc["seed"].get<std::uint64_t>();
      if (doc.contains("provenance")) cloud.provenance = provenance_from_string(doc["provenance"].get<std::string>());
      if (doc.contains("count") && doc["count"].get<std::size_t>() != cloud.points.size())
        throw ParseError("sidecar count does not match " + path.string());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("bad sidecar " + side.string() + ": " + e.what());
    }
  }
  return cloud;
}

}  // namespace geocode::pc
