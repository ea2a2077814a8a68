#include "geocode/chamfer.hpp"

#include <algorithm>
#include <limits>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "geocode/error.hpp"

namespace geocode::metrics {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using Entry = std::pair<BPoint, std::uint32_t>;

struct CloudIndex::Tree {
  bgi::rtree<Entry, bgi::rstar<16>> rtree;
};

namespace {

BPoint to_bpoint(const Vec3& v) { return BPoint(v.x(), v.y(), v.z()); }

void require_nonempty(std::size_t n, const char* which) {
  if (n == 0) throw ValidationError(which, "point set is empty");
}

}  // namespace

CloudIndex::CloudIndex(std::vector<Vec3> points) : points_(std::move(points)), tree_(std::make_unique<Tree>()) {
  require_nonempty(points_.size(), "points");
  std::vector<Entry> entries;
  entries.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i)
    entries.emplace_back(to_bpoint(points_[i]), static_cast<std::uint32_t>(i));
  // Range constructor bulk-loads (packing), which is deterministic.
  tree_->rtree = bgi::rtree<Entry, bgi::rstar<16>>(entries);
}

CloudIndex::~CloudIndex() = default;
CloudIndex::CloudIndex(CloudIndex&&) noexcept = default;
CloudIndex& CloudIndex::operator=(CloudIndex&&) noexcept = default;

double CloudIndex::nearest_squared(const Vec3& q) const {
  double best = std::numeric_limits<double>::infinity();
  // The tree decides which point is nearest; the distance itself is
  // recomputed with squared_distance so it matches the brute force exactly.
  for (auto it = tree_->rtree.qbegin(bgi::nearest(to_bpoint(q), 1)); it != tree_->rtree.qend(); ++it)
    best = std::min(best, squared_distance(q, points_[it->second]));
  return best;
}

double CloudIndex::mean_nearest_squared(std::span<const Vec3> queries) const {
  require_nonempty(queries.size(), "queries");
  double sum = 0.0;
  for (const auto& q : queries) sum += nearest_squared(q);
  return sum / static_cast<double>(queries.size());
}

double chamfer(const CloudIndex& a, const CloudIndex& b) {
  return b.mean_nearest_squared(a.points()) + a.mean_nearest_squared(b.points());
}

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  require_nonempty(a.size(), "a");
  require_nonempty(b.size(), "b");
  const CloudIndex ia({a.begin(), a.end()});
  const CloudIndex ib({b.begin(), b.end()});
  return chamfer(ia, ib);
}

double chamfer(const pc::PointCloud& a, const pc::PointCloud& b) { return chamfer(a.points, b.points); }

double chamfer_brute(std::span<const Vec3> a, std::span<const Vec3> b) {
  require_nonempty(a.size(), "a");
  require_nonempty(b.size(), "b");
  auto one_side = [](std::span<const Vec3> from, std::span<const Vec3> to) {
    double sum = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, squared_distance(p, q));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return one_side(a, b) + one_side(b, a);
}

double mesh_chamfer(const geom::LabeledMesh& ma, const geom::LabeledMesh& mb, std::size_t n, std::uint64_t seed) {
  const auto a = pc::surface_sample(ma, n, seed);
  const auto b = pc::surface_sample(mb, n, seed);
  return chamfer(a, b);
}

}  // namespace geocode::metrics
