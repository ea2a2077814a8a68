#include "geocode/curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "geocode/error.hpp"

namespace geocode::geom {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGlNodes = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                            0.9061798459386640};
constexpr std::array<double, 5> kGlWeights = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                              0.2369268850561891, 0.2369268850561891};

double segment_length(const BezierSegment& seg, double u0, double u1) {
  const double half = 0.5 * (u1 - u0);
  const double mid = 0.5 * (u1 + u0);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) sum += kGlWeights[i] * seg.derivative(mid + half * kGlNodes[i]).norm();
  return sum * half;
}

Vec3 initial_normal(const Vec3& t) {
  // World axis least aligned with the tangent, ties resolved x, y, z.
  Vec3 axis = Vec3::UnitX();
  double best = std::abs(t.x());
  if (std::abs(t.y()) < best) {
    best = std::abs(t.y());
    axis = Vec3::UnitY();
  }
  if (std::abs(t.z()) < best) axis = Vec3::UnitZ();
  return (axis - axis.dot(t) * t).normalized();
}

/// One double-reflection step carrying normal r from (x0, t0) to (x1, t1).
Vec3 reflect_step(const Vec3& x0, const Vec3& t0, const Vec3& r0, const Vec3& x1, const Vec3& t1) {
  Vec3 rl = r0;
  Vec3 tl = t0;
  const Vec3 v1 = x1 - x0;
  const double c1 = v1.dot(v1);
  if (c1 > 1e-30) {
    rl = r0 - (2.0 / c1) * v1.dot(r0) * v1;
    tl = t0 - (2.0 / c1) * v1.dot(t0) * v1;
  }
  const Vec3 v2 = t1 - tl;
  const double c2 = v2.dot(v2);
  Vec3 r1 = rl;
  if (c2 > 1e-30) r1 = rl - (2.0 / c2) * v2.dot(rl) * v2;
  return r1;
}

}  // namespace

Frame Frame::from_axes(const Vec3& origin, const Vec3& x_axis, const Vec3& y_hint) {
  const double lx = x_axis.norm();
  if (!(lx > 1e-12)) throw GeometryError("frame: zero-length x axis");
  Frame f;
  f.origin = origin;
  f.tangent = x_axis / lx;
  Vec3 n = y_hint - y_hint.dot(f.tangent) * f.tangent;
  const double ln = n.norm();
  if (!(ln > 1e-12)) throw GeometryError("frame: y hint parallel to x axis");
  f.normal = n / ln;
  f.binormal = f.tangent.cross(f.normal);
  return f;
}

void Frame::check(double tol) const {
  const bool unit = std::abs(tangent.norm() - 1.0) <= tol && std::abs(normal.norm() - 1.0) <= tol &&
                    std::abs(binormal.norm() - 1.0) <= tol;
  const bool ortho = std::abs(tangent.dot(normal)) <= tol && std::abs(tangent.dot(binormal)) <= tol &&
                     std::abs(normal.dot(binormal)) <= tol;
  if (!unit || !ortho) throw GeometryError("frame axes are not orthonormal");
  if ((tangent.cross(normal) - binormal).norm() > 10 * tol) throw GeometryError("frame is not right-handed");
}

Vec3 BezierSegment::eval(double u) const {
  const double v = 1.0 - u;
  return (v * v * v) * p[0] + (3.0 * u * v * v) * p[1] + (3.0 * u * u * v) * p[2] + (u * u * u) * p[3];
}

Vec3 BezierSegment::derivative(double u) const {
  const double v = 1.0 - u;
  return (3.0 * v * v) * (p[1] - p[0]) + (6.0 * u * v) * (p[2] - p[1]) + (3.0 * u * u) * (p[3] - p[2]);
}

BezierSegment BezierSegment::line(const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  return {{a, a + d / 3.0, a + (2.0 / 3.0) * d, b}};
}

PathCurve::PathCurve(std::vector<BezierSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw GeometryError("path curve has no segments");
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    if ((segments_[i].p[3] - segments_[i + 1].p[0]).norm() > 1e-9)
      throw GeometryError("path curve segments " + std::to_string(i) + " and " + std::to_string(i + 1) +
                          " do not meet");
  }
  for (const auto& seg : segments_)
    for (const auto& q : seg.p)
      if (!q.allFinite()) throw GeometryError("path curve has non-finite control points");

  const int k = kTableSteps;
  node_u_.reserve(segments_.size() * (k + 1));
  node_s_.reserve(segments_.size() * (k + 1));
  double s = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    for (int j = 0; j <= k; ++j) {
      const double local = static_cast<double>(j) / k;
      if (j > 0) s += segment_length(segments_[i], static_cast<double>(j - 1) / k, local);
      node_u_.push_back(static_cast<double>(i) + local);
      node_s_.push_back(s);
    }
  }
  length_ = s;
  if (!(length_ > 1e-12)) throw GeometryError("degenerate path curve (zero length)");

  // Rotation-minimizing normals at every table node. Joint nodes appear twice
  // (end of one segment, start of the next) so kinks rotate the frame once.
  node_normal_.resize(node_u_.size());
  Vec3 x_prev = eval_param(0.0);
  Vec3 t_prev = tangent_param(0.0);
  Vec3 r = initial_normal(t_prev);
  node_normal_[0] = r;
  for (std::size_t n = 1; n < node_u_.size(); ++n) {
    const std::size_t seg = n / (k + 1);
    const double local = static_cast<double>(n % (k + 1)) / k;
    const Vec3 x = segments_[seg].eval(local);
    Vec3 t = segments_[seg].derivative(local);
    t = t.norm() > 1e-15 ? Vec3(t.normalized()) : t_prev;
    r = reflect_step(x_prev, t_prev, r, x, t);
    r = (r - r.dot(t) * t).normalized();
    node_normal_[n] = r;
    x_prev = x;
    t_prev = t;
  }
}

PathCurve PathCurve::line(const Vec3& a, const Vec3& b) { return PathCurve({BezierSegment::line(a, b)}); }

Vec3 PathCurve::eval_param(double u) const {
  const auto n = static_cast<double>(segments_.size());
  u = std::clamp(u, 0.0, n);
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i >= segments_.size()) i = segments_.size() - 1;
  return segments_[i].eval(u - static_cast<double>(i));
}

Vec3 PathCurve::tangent_param(double u) const {
  const auto n = static_cast<double>(segments_.size());
  u = std::clamp(u, 0.0, n);
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i >= segments_.size()) i = segments_.size() - 1;
  const double local = u - static_cast<double>(i);
  Vec3 d = segments_[i].derivative(local);
  if (d.norm() > 1e-15) return d.normalized();
  // Coincident control points at an end: fall back to a secant.
  const double h = 1e-6;
  const Vec3 a = segments_[i].eval(std::max(0.0, local - h));
  const Vec3 b = segments_[i].eval(std::min(1.0, local + h));
  d = b - a;
  if (d.norm() <= 1e-300) throw GeometryError("path curve has a degenerate tangent");
  return d.normalized();
}

double PathCurve::arc_length_to(double u) const {
  if (segments_.empty()) return 0.0;
  const auto n = static_cast<double>(segments_.size());
  u = std::clamp(u, 0.0, n);
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i >= segments_.size()) i = segments_.size() - 1;
  const double local = u - static_cast<double>(i);
  const int j = std::min(kTableSteps - 1, static_cast<int>(std::floor(local * kTableSteps)));
  const std::size_t node = i * (kTableSteps + 1) + static_cast<std::size_t>(j);
  return node_s_[node] + segment_length(segments_[i], static_cast<double>(j) / kTableSteps, local);
}

double PathCurve::param_at(double t) const {
  if (segments_.empty()) throw GeometryError("empty path curve");
  if (!(t >= 0.0 && t <= 1.0)) throw GeometryError("curve position must lie in [0, 1]");
  if (t == 0.0) return 0.0;
  if (t == 1.0) return static_cast<double>(segments_.size());
  const double s = t * length_;
  // Last node with arc length <= s.
  auto it = std::upper_bound(node_s_.begin(), node_s_.end(), s);
  std::size_t node = static_cast<std::size_t>(std::distance(node_s_.begin(), it));
  node = node == 0 ? 0 : node - 1;
  if (node + 1 >= node_s_.size()) return node_u_.back();
  // Skip zero-length spans produced by duplicated joint nodes.
  while (node + 1 < node_u_.size() && node_u_[node + 1] == node_u_[node]) ++node;
  if (node + 1 >= node_u_.size()) return node_u_.back();
  const double u0 = node_u_[node];
  const double u1 = node_u_[node + 1];
  const double s0 = node_s_[node];
  const double s1 = node_s_[node + 1];
  const std::size_t seg = static_cast<std::size_t>(std::floor(u0));
  const double base = static_cast<double>(seg);
  double u = s1 > s0 ? u0 + (u1 - u0) * (s - s0) / (s1 - s0) : u0;
  for (int iter = 0; iter < 4; ++iter) {
    const double f = segment_length(segments_[seg], u0 - base, u - base) - (s - s0);
    const double speed = segments_[seg].derivative(u - base).norm();
    if (!(speed > 1e-300)) break;
    u = std::clamp(u - f / speed, u0, u1);
  }
  return u;
}

Vec3 PathCurve::point_at(double t) const { return eval_param(param_at(t)); }

Vec3 PathCurve::tangent_at(double t) const { return tangent_param(param_at(t)); }

Frame PathCurve::frame_at(double t) const {
  const double u = param_at(t);
  const std::size_t seg = std::min(segments_.size() - 1, static_cast<std::size_t>(std::floor(u)));
  const double local = u - static_cast<double>(seg);
  const int j = std::min(kTableSteps, static_cast<int>(std::floor(local * kTableSteps)));
  const std::size_t node = seg * (kTableSteps + 1) + static_cast<std::size_t>(j);

  const double node_local = static_cast<double>(j) / kTableSteps;
  const Vec3 xn = segments_[seg].eval(node_local);
  const Vec3 tn_raw = segments_[seg].derivative(node_local);
  Frame f;
  f.origin = eval_param(u);
  f.tangent = tangent_param(u);
  const Vec3 tn = tn_raw.norm() > 1e-15 ? Vec3(tn_raw.normalized()) : f.tangent;
  Vec3 r = reflect_step(xn, tn, node_normal_[node], f.origin, f.tangent);
  r = r - r.dot(f.tangent) * f.tangent;
  f.normal = r.normalized();
  f.binormal = f.tangent.cross(f.normal);
  return f;
}

void ProfileCurve::check() const {
  if (!(half_width > 0.0) || !(half_depth > 0.0)) throw GeometryError("profile extents must be positive");
  if (!(roundness >= 0.0 && roundness <= 1.0)) throw GeometryError("profile roundness must lie in [0, 1]");
}

Vec2 ProfileCurve::eval_angle(double theta) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Vec2 ellipse(half_width * c, half_depth * s);
  const Vec2 rect = ellipse / std::max(std::abs(c), std::abs(s));
  return rect + roundness * (ellipse - rect);
}

ScaleFunction::ScaleFunction(Mode mode, std::vector<Vec2> knots) : mode_(mode), knots_(std::move(knots)) {
  if (knots_.empty()) throw GeometryError("scale function needs at least one knot");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i].y() > 0.0) || !std::isfinite(knots_[i].y()))
      throw GeometryError("scale must be positive");
    if (i > 0 && !(knots_[i].x() >= knots_[i - 1].x())) throw GeometryError("scale knots must be sorted");
  }
}

double ScaleFunction::operator()(double t) const {
  if (t <= knots_.front().x()) return knots_.front().y();
  if (t >= knots_.back().x()) return knots_.back().y();
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const Vec2& a = knots_[i - 1];
    const Vec2& b = knots_[i];
    if (t > b.x()) continue;
    const double span = b.x() - a.x();
    if (span <= 0.0) return b.y();
    double w = (t - a.x()) / span;
    if (mode_ == Mode::smooth) w = w * w * (3.0 - 2.0 * w);
    return a.y() + w * (b.y() - a.y());
  }
  return knots_.back().y();
}

}  // namespace geocode::geom
