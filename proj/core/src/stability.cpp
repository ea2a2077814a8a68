#include "geocode/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <nlohmann/json.hpp>

namespace geocode::metrics {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using geom::LabeledMesh;
using geom::Vec3;

namespace {

using BPoint3 = bg::model::point<double, 3, bg::cs::cartesian>;
using BBox3 = bg::model::box<BPoint3>;
using TriEntry = std::pair<BBox3, std::uint32_t>;
using Point2 = bg::model::d2::point_xy<double>;

BPoint3 bp(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

// Closest point on triangle (a, b, c) to p, by Voronoi region (Ericson).
double point_triangle_squared(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.squaredNorm();
  const Vec3 bp_ = p - b;
  const double d3 = ab.dot(bp_), d4 = ac.dot(bp_);
  if (d3 >= 0.0 && d4 <= d3) return bp_.squaredNorm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + ab * (d1 / (d1 - d3)))).squaredNorm();
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.squaredNorm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + ac * (d2 / (d2 - d6)))).squaredNorm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + (c - b) * w)).squaredNorm();
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return (p - (a + ab * v + ac * w)).squaredNorm();
}

struct RawComponent {
  std::vector<std::uint32_t> faces;
  std::vector<std::uint32_t> vertices;
  geom::Aabb box;
  bool closed = false;
  bgi::rtree<TriEntry, bgi::quadratic<16>> tree;
};

bool faces_closed(const LabeledMesh& m, const std::vector<std::uint32_t>& faces) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (auto f : faces) {
    const auto& t = m.faces[f];
    for (int k = 0; k < 3; ++k) {
      auto a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edges[{a, b}];
    }
  }
  return !edges.empty() && std::all_of(edges.begin(), edges.end(), [](const auto& e) { return e.second == 2; });
}

bool boxes_near(const geom::Aabb& a, const geom::Aabb& b, double eps) {
  return ((a.min.array() - eps) <= b.max.array()).all() && ((b.min.array() - eps) <= a.max.array()).all();
}

bool in_box(const Vec3& p, const geom::Aabb& b, double eps) {
  return ((b.min.array() - eps) <= p.array()).all() && (p.array() <= (b.max.array() + eps)).all();
}

// Some vertex of `from` within eps of a triangle of `to`.
bool touches(const LabeledMesh& m, const RawComponent& from, const RawComponent& to, double eps) {
  const double eps2 = eps * eps;
  std::vector<TriEntry> hits;
  for (auto vi : from.vertices) {
    const Vec3& p = m.vertices[vi];
    if (!in_box(p, to.box, eps)) continue;
    hits.clear();
    const BBox3 q(bp(p - Vec3::Constant(eps)), bp(p + Vec3::Constant(eps)));
    to.tree.query(bgi::intersects(q), std::back_inserter(hits));
    for (const auto& h : hits) {
      const auto& t = m.faces[h.second];
      if (point_triangle_squared(p, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]) <= eps2) return true;
    }
  }
  return false;
}

// Generalized winding number of a closed surface around p.
double winding_number(const LabeledMesh& m, const RawComponent& c, const Vec3& p) {
  double total = 0.0;
  for (auto f : c.faces) {
    const auto& t = m.faces[f];
    const Vec3 a = m.vertices[t[0]] - p, b = m.vertices[t[1]] - p, cc = m.vertices[t[2]] - p;
    const double la = a.norm(), lb = b.norm(), lc = cc.norm();
    const double num = a.dot(b.cross(cc));
    const double den = la * lb * lc + a.dot(b) * lc + a.dot(cc) * lb + b.dot(cc) * la;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

bool contained(const LabeledMesh& m, const RawComponent& inner, const RawComponent& outer) {
  if (!outer.closed) return false;
  for (auto vi : inner.vertices) {
    const Vec3& p = m.vertices[vi];
    if (in_box(p, outer.box, 0.0) && winding_number(m, outer, p) > 0.5) return true;
  }
  return false;
}

struct Dsu {
  std::vector<std::size_t> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<RawComponent> raw_components(const LabeledMesh& m, std::vector<std::uint32_t>& face_raw) {
  std::size_t count = 0;
  face_raw = geom::face_components(m, &count);
  std::vector<RawComponent> comps(count);
  std::vector<std::int64_t> seen(m.vertices.size(), -1);
  for (std::uint32_t f = 0; f < m.faces.size(); ++f) {
    auto& c = comps[face_raw[f]];
    c.faces.push_back(f);
    for (auto vi : m.faces[f]) {
      if (seen[vi] != static_cast<std::int64_t>(face_raw[f])) {
        seen[vi] = face_raw[f];
        c.vertices.push_back(vi);
        c.box.extend(m.vertices[vi]);
      }
    }
  }
  for (auto& c : comps) {
    c.closed = faces_closed(m, c.faces);
    std::vector<TriEntry> entries;
    entries.reserve(c.faces.size());
    for (auto f : c.faces) {
      geom::Aabb b;
      for (auto vi : m.faces[f]) b.extend(m.vertices[vi]);
      entries.emplace_back(BBox3(bp(b.min), bp(b.max)), f);
    }
    c.tree = bgi::rtree<TriEntry, bgi::quadratic<16>>(entries);
  }
  return comps;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

Components merge_components(const std::vector<RawComponent>& comps, const std::vector<std::uint32_t>& face_raw,
                            const LabeledMesh& m, double eps) {
  Dsu dsu(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t j = i + 1; j < comps.size(); ++j) {
      if (dsu.find(i) == dsu.find(j) || !boxes_near(comps[i].box, comps[j].box, eps)) continue;
      if (touches(m, comps[i], comps[j], eps) || touches(m, comps[j], comps[i], eps) ||
          contained(m, comps[i], comps[j]) || contained(m, comps[j], comps[i]))
        dsu.unite(i, j);
    }
  }
  Components out;
  out.face_component.resize(m.faces.size());
  std::map<std::size_t, std::uint32_t> renumber;
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const auto root = dsu.find(face_raw[f]);
    const auto it = renumber.emplace(root, static_cast<std::uint32_t>(renumber.size()));
    out.face_component[f] = it.first->second;
  }
  out.count = renumber.size();
  return out;
}

}  // namespace

Components connected_components(const LabeledMesh& m, double eps) {
  std::vector<std::uint32_t> face_raw;
  const auto comps = raw_components(m, face_raw);
  return merge_components(comps, face_raw, m, eps);
}

StabilityReport stability(const LabeledMesh& m, const StabilityOptions& opts) {
  StabilityReport r;
  if (m.empty()) return r;
  const auto box = geom::bounds(m);
  const double diag = box.diagonal();
  r.margin_tolerance = opts.margin_fraction * diag;

  std::vector<std::uint32_t> face_raw;
  const auto raw = raw_components(m, face_raw);

  // Whatever did not merge with the grounded component is detached, so the
  // count is independent of which component is grounded.
  const auto comps = merge_components(raw, face_raw, m, opts.contact_fraction * diag);
  r.components = comps.count;
  r.detached_components = comps.count - 1;

  // Center of mass.
  const bool all_closed = std::all_of(raw.begin(), raw.end(), [](const auto& c) { return c.closed; });
  const double volume = geom::signed_volume(m);
  Vec3 com = Vec3::Zero();
  if (all_closed && volume > 0.0) {
    for (const auto& t : m.faces) {
      const Vec3& a = m.vertices[t[0]];
      const Vec3& b = m.vertices[t[1]];
      const Vec3& c = m.vertices[t[2]];
      com += (a.dot(b.cross(c)) / 6.0) * (a + b + c) / 4.0;
    }
    com /= volume;
    r.volume_weighted = true;
  } else {
    double area = 0.0;
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
      const auto& t = m.faces[f];
      const double w = geom::face_area(m, f);
      com += w * (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]) / 3.0;
      area += w;
    }
    com /= area;
  }
  r.center_of_mass = com;

  // Support polygon from the vertices near the ground.
  const double band = box.min.z() + opts.support_fraction * (box.max.z() - box.min.z());
  bg::model::multi_point<Point2> support;
  for (const auto& v : m.vertices)
    if (v.z() <= band) bg::append(support, Point2(v.x(), v.y()));
  bg::model::polygon<Point2> hull;
  bg::convex_hull(support, hull);
  const auto& ring = hull.outer();
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) r.support_polygon.emplace_back(ring[i].x(), ring[i].y());
  if (ring.size() == 1) r.support_polygon.emplace_back(ring[0].x(), ring[0].y());

  const Vec2 c2(com.x(), com.y());
  double dist = std::numeric_limits<double>::infinity();
  const auto& poly = r.support_polygon;
  if (poly.size() == 1) dist = (c2 - poly[0]).norm();
  for (std::size_t i = 0; i < poly.size() && poly.size() > 1; ++i)
    dist = std::min(dist, segment_distance(c2, poly[i], poly[(i + 1) % poly.size()]));
  const bool degenerate = poly.size() < 3 || std::abs(bg::area(hull)) <= 1e-12 * diag * diag;
  const bool inside = !degenerate && bg::within(Point2(c2.x(), c2.y()), hull);
  r.com_margin = inside ? dist : -dist;

  r.stable = r.detached_components == 0 && r.com_margin > r.margin_tolerance;
  return r;
}

nlohmann::json to_json(const StabilityReport& r) {
  nlohmann::json polygon = nlohmann::json::array();
  for (const auto& p : r.support_polygon) polygon.push_back({p.x(), p.y()});
  return {
      {"stable", r.stable},
      {"detached_components", r.detached_components},
      {"com_margin", r.com_margin},
      {"margin_tolerance", r.margin_tolerance},
      {"components", r.components},
      {"center_of_mass", {r.center_of_mass.x(), r.center_of_mass.y(), r.center_of_mass.z()}},
      {"volume_weighted", r.volume_weighted},
      {"support_polygon", std::move(polygon)},
  };
}

}  // namespace geocode::metrics
