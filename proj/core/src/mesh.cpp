#include "geocode/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include <Eigen/Geometry>

#include "geocode/error.hpp"

namespace geocode::geom {

std::uint32_t LabeledMesh::intern_part(std::string_view name) {
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i] == name) return static_cast<std::uint32_t>(i);
  parts.emplace_back(name);
  return static_cast<std::uint32_t>(parts.size() - 1);
}

LabeledMesh LabeledMesh::extract_part(std::string_view name) const {
  LabeledMesh out;
  std::vector<std::int64_t> remap(vertices.size(), -1);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (parts[face_part[f]] != name) continue;
    Face nf{};
    for (int c = 0; c < 3; ++c) {
      const auto v = faces[f][c];
      if (remap[v] < 0) {
        remap[v] = static_cast<std::int64_t>(out.vertices.size());
        out.vertices.push_back(vertices[v]);
      }
      nf[c] = static_cast<std::uint32_t>(remap[v]);
    }
    out.faces.push_back(nf);
    out.face_part.push_back(out.intern_part(name));
  }
  return out;
}

double face_area(const LabeledMesh& m, std::size_t f) {
  const auto& t = m.faces[f];
  return 0.5 * (m.vertices[t[1]] - m.vertices[t[0]]).cross(m.vertices[t[2]] - m.vertices[t[0]]).norm();
}

void check_mesh(const LabeledMesh& m) {
  if (m.face_part.size() != m.faces.size()) throw GeometryError("mesh: face_part length differs from face count");
  for (const auto& v : m.vertices)
    if (!v.allFinite()) throw GeometryError("mesh: non-finite vertex");
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    for (auto i : m.faces[f])
      if (i >= m.vertices.size()) throw GeometryError("mesh: face " + std::to_string(f) + " index out of range");
    if (m.face_part[f] >= m.parts.size()) throw GeometryError("mesh: face " + std::to_string(f) + " has no part");
    if (!(face_area(m, f) > kMinFaceArea)) throw GeometryError("mesh: face " + std::to_string(f) + " has zero area");
  }
}

double surface_area(const LabeledMesh& m) {
  double a = 0.0;
  for (std::size_t f = 0; f < m.faces.size(); ++f) a += face_area(m, f);
  return a;
}

double signed_volume(const LabeledMesh& m) {
  double v = 0.0;
  for (const auto& t : m.faces) v += m.vertices[t[0]].dot(m.vertices[t[1]].cross(m.vertices[t[2]]));
  return v / 6.0;
}

bool is_closed(const LabeledMesh& m) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(m.faces.size() * 3);
  for (const auto& t : m.faces)
    for (int c = 0; c < 3; ++c) {
      const auto a = t[c];
      const auto b = t[(c + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  if (edges.empty()) return false;
  std::sort(edges.begin(), edges.end());
  std::size_t i = 0;
  while (i < edges.size()) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    if (j - i != 2) return false;
    i = j;
  }
  return true;
}

Aabb bounds(const LabeledMesh& m) { return bounds(m.vertices); }

Aabb bounds(std::span<const Vec3> points) {
  Aabb b;
  for (const auto& p : points) b.extend(p);
  return b;
}

namespace {

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<std::uint32_t> face_components(const LabeledMesh& m, std::size_t* count) {
  std::vector<std::uint32_t> parent(m.vertices.size());
  std::iota(parent.begin(), parent.end(), 0u);
  for (const auto& t : m.faces) {
    const auto r0 = find_root(parent, t[0]);
    for (int c = 1; c < 3; ++c) {
      const auto r = find_root(parent, t[c]);
      if (r != r0) parent[r] = r0;
    }
  }
  std::vector<std::int64_t> id_of_root(m.vertices.size(), -1);
  std::vector<std::uint32_t> out(m.faces.size());
  std::uint32_t next = 0;
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const auto r = find_root(parent, m.faces[f][0]);
    if (id_of_root[r] < 0) id_of_root[r] = next++;
    out[f] = static_cast<std::uint32_t>(id_of_root[r]);
  }
  if (count) *count = next;
  return out;
}

LabeledMesh make_box(const Vec3& lo, const Vec3& hi, std::string_view part) {
  LabeledMesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  m.faces = {{0, 2, 1}, {1, 2, 3},   // z-
             {4, 5, 6}, {5, 7, 6},   // z+
             {0, 1, 4}, {1, 5, 4},   // y-
             {2, 6, 3}, {3, 6, 7},   // y+
             {0, 4, 2}, {2, 4, 6},   // x-
             {1, 3, 5}, {3, 7, 5}};  // x+
  const auto p = m.intern_part(part);
  m.face_part.assign(m.faces.size(), p);
  return m;
}

LabeledMesh sweep(const ProfileCurve& profile, const PathCurve& path, const ScaleFunction& scale,
                  int profile_samples, int path_samples, std::string_view part) {
  profile.check();
  if (profile_samples < 3) throw GeometryError("sweep: profile sample count must be at least 3");
  if (path_samples < 2) throw GeometryError("sweep: path sample count must be at least 2");
  if (path.empty()) throw GeometryError("sweep: degenerate path");

  const auto p_count = static_cast<std::uint32_t>(profile_samples);
  const auto q_count = static_cast<std::uint32_t>(path_samples);

  std::vector<Vec2> ring(p_count);
  Vec2 centroid = Vec2::Zero();
  for (std::uint32_t j = 0; j < p_count; ++j) {
    ring[j] = profile.eval_angle(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p_count));
    centroid += ring[j];
  }
  centroid /= static_cast<double>(p_count);

  LabeledMesh m;
  m.vertices.reserve(p_count * q_count + 2);
  Vec3 cap_start, cap_end;
  for (std::uint32_t i = 0; i < q_count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(q_count - 1);
    const Frame f = path.frame_at(t);
    const double s = scale(t);
    if (!(s > 0.0) || !std::isfinite(s)) throw GeometryError("sweep: scale must be positive");
    for (const auto& q : ring) m.vertices.push_back(f.origin + s * (q.x() * f.normal + q.y() * f.binormal));
    const Vec3 c = f.origin + s * (centroid.x() * f.normal + centroid.y() * f.binormal);
    if (i == 0) cap_start = c;
    if (i + 1 == q_count) cap_end = c;
  }
  const std::uint32_t c0 = p_count * q_count;
  const std::uint32_t c1 = c0 + 1;
  m.vertices.push_back(cap_start);
  m.vertices.push_back(cap_end);

  m.faces.reserve(2 * p_count * (q_count - 1) + 2 * p_count);
  for (std::uint32_t i = 0; i + 1 < q_count; ++i) {
    for (std::uint32_t j = 0; j < p_count; ++j) {
      const std::uint32_t jn = (j + 1) % p_count;
      const std::uint32_t a = i * p_count + j;
      const std::uint32_t b = i * p_count + jn;
      const std::uint32_t c = (i + 1) * p_count + jn;
      const std::uint32_t d = (i + 1) * p_count + j;
      m.faces.push_back({a, b, c});
      m.faces.push_back({a, c, d});
    }
  }
  const std::uint32_t last = (q_count - 1) * p_count;
  for (std::uint32_t j = 0; j < p_count; ++j) m.faces.push_back({c0, (j + 1) % p_count, j});
  for (std::uint32_t j = 0; j < p_count; ++j) m.faces.push_back({c1, last + j, last + (j + 1) % p_count});

  const auto label = m.intern_part(part);
  m.face_part.assign(m.faces.size(), label);
  return m;
}

Vec3 reflect_point(const Vec3& p, const Vec3& plane_point, const Vec3& n) {
  return p - (2.0 * (p - plane_point).dot(n)) * n;
}

LabeledMesh mirror(const LabeledMesh& m, const Vec3& plane_point, const Vec3& plane_normal) {
  if (std::abs(plane_normal.norm() - 1.0) > 1e-9) throw GeometryError("mirror: plane normal must be unit length");
  LabeledMesh out = m;
  const auto base = static_cast<std::uint32_t>(m.vertices.size());
  out.vertices.reserve(2 * m.vertices.size());
  for (const auto& p : m.vertices) out.vertices.push_back(reflect_point(p, plane_point, plane_normal));
  out.faces.reserve(2 * m.faces.size());
  for (const auto& t : m.faces) out.faces.push_back({t[0] + base, t[2] + base, t[1] + base});
  out.face_part.insert(out.face_part.end(), m.face_part.begin(), m.face_part.end());
  return out;
}

LabeledMesh rotational_replicate(const LabeledMesh& m, const Vec3& axis_point, const Vec3& axis_dir, int k) {
  if (k < 1) throw GeometryError("rotational replicate: count must be at least 1");
  if (std::abs(axis_dir.norm() - 1.0) > 1e-9) throw GeometryError("rotational replicate: axis must be unit length");
  LabeledMesh out = m;
  const auto n = static_cast<std::uint32_t>(m.vertices.size());
  for (int j = 1; j < k; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(k);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis_dir).toRotationMatrix();
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    for (const auto& p : m.vertices) out.vertices.push_back(axis_point + r * (p - axis_point));
    for (const auto& t : m.faces) out.faces.push_back({t[0] + base, t[1] + base, t[2] + base});
    out.face_part.insert(out.face_part.end(), m.face_part.begin(), m.face_part.end());
  }
  (void)n;
  return out;
}

LabeledMesh join(std::span<const LabeledMesh> parts) {
  if (parts.empty()) throw GeometryError("join: empty input list");
  if (parts.size() == 1) return parts.front();
  LabeledMesh out;
  std::size_t nv = 0, nf = 0;
  for (const auto& p : parts) {
    nv += p.vertices.size();
    nf += p.faces.size();
  }
  out.vertices.reserve(nv);
  out.faces.reserve(nf);
  out.face_part.reserve(nf);
  for (const auto& p : parts) {
    const auto base = static_cast<std::uint32_t>(out.vertices.size());
    std::vector<std::uint32_t> remap(p.parts.size());
    for (std::size_t i = 0; i < p.parts.size(); ++i) remap[i] = out.intern_part(p.parts[i]);
    out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
    for (const auto& t : p.faces) out.faces.push_back({t[0] + base, t[1] + base, t[2] + base});
    for (auto fp : p.face_part) out.face_part.push_back(remap[fp]);
  }
  return out;
}

LabeledMesh attach(const LabeledMesh& element, const Frame& local_anchor, const Frame& target,
                   std::optional<double> fit_width) {
  local_anchor.check();
  target.check();
  double k = 1.0;
  if (fit_width) {
    if (!(*fit_width > 0.0)) throw GeometryError("attach: fit width must be positive");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : element.vertices) {
      const double x = (p - local_anchor.origin).dot(local_anchor.tangent);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const double width = hi - lo;
    if (!(width > 1e-12)) throw GeometryError("attach: cannot fit an element with zero width");
    k = *fit_width / width;
  }
  LabeledMesh out = element;
  for (auto& p : out.vertices) {
    const Vec3 d = p - local_anchor.origin;
    const double a = k * d.dot(local_anchor.tangent);
    const double b = d.dot(local_anchor.normal);
    const double c = d.dot(local_anchor.binormal);
    p = target.origin + a * target.tangent + b * target.normal + c * target.binormal;
  }
  return out;
}

LabeledMesh tag_part(const LabeledMesh& m, std::string_view part) {
  LabeledMesh out = m;
  out.parts.assign(1, std::string(part));
  out.face_part.assign(out.faces.size(), 0);
  if (out.faces.empty()) out.parts.clear();
  return out;
}

}  // namespace geocode::geom
