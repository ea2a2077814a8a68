#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace geocode::geom {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Orthonormal right-handed frame: binormal = tangent x normal.
struct Frame {
  Vec3 origin = Vec3::Zero();
  Vec3 tangent = Vec3::UnitX();
  Vec3 normal = Vec3::UnitY();
  Vec3 binormal = Vec3::UnitZ();

  static Frame identity() { return {}; }

  /// Builds a frame whose tangent is `x_axis` and whose normal is the part of
  /// `y_hint` orthogonal to it. Throws GeometryError on degenerate input.
  static Frame from_axes(const Vec3& origin, const Vec3& x_axis, const Vec3& y_hint);

  /// Throws GeometryError unless the axes are orthonormal and right-handed
  /// within `tol`.
  void check(double tol = 1e-9) const;
};

struct BezierSegment {
  std::array<Vec3, 4> p;

  Vec3 eval(double u) const;
  Vec3 derivative(double u) const;

  static BezierSegment line(const Vec3& a, const Vec3& b);
};

/// Piecewise cubic Bezier path parameterized by relative arc length t in
/// [0, 1]. Frames are rotation minimizing (double reflection), propagated
/// from t = 0.
class PathCurve {
 public:
  /// Arc-length table resolution per segment.
  static constexpr int kTableSteps = 64;

  PathCurve() = default;
  /// Throws GeometryError when segments do not meet (C0, 1e-9) or the total
  /// length is zero.
  explicit PathCurve(std::vector<BezierSegment> segments);

  static PathCurve line(const Vec3& a, const Vec3& b);

  std::span<const BezierSegment> segments() const noexcept { return segments_; }
  double length() const noexcept { return length_; }
  bool empty() const noexcept { return segments_.empty(); }

  /// Global Bezier parameter in [0, segment count] at arc fraction t.
  double param_at(double t) const;
  Vec3 point_at(double t) const;
  Vec3 tangent_at(double t) const;
  Frame frame_at(double t) const;

  /// Arc length from the start to global parameter u.
  double arc_length_to(double u) const;

 private:
  Vec3 eval_param(double u) const;
  Vec3 tangent_param(double u) const;

  std::vector<BezierSegment> segments_;
  std::vector<double> node_u_;
  std::vector<double> node_s_;
  std::vector<Vec3> node_normal_;
  double length_ = 0.0;
};

/// Closed planar cross-section. Roundness 0 is the axis aligned rectangle
/// with half extents (half_width, half_depth), 1 the ellipse; in between the
/// two are blended along rays at matching angle.
struct ProfileCurve {
  double roundness = 1.0;
  double half_width = 0.5;
  double half_depth = 0.5;

  /// Throws GeometryError on non-positive extents or roundness outside [0,1].
  void check() const;

  Vec2 eval_angle(double theta) const;
  /// Point at relative position t in [0,1] (angle 2*pi*t, counter-clockwise
  /// from the +width axis).
  Vec2 eval(double t) const { return eval_angle(t * 2.0 * 3.14159265358979323846); }
};

/// Positive scale along a swept element, piecewise over knots.
class ScaleFunction {
 public:
  enum class Mode { linear, smooth };

  ScaleFunction() = default;
  /// Knots must be sorted by t and strictly positive in scale.
  ScaleFunction(Mode mode, std::vector<Vec2> knots);

  static ScaleFunction constant(double s) { return ScaleFunction(Mode::linear, {Vec2(0.0, s), Vec2(1.0, s)}); }
  static ScaleFunction linear(double s0, double s1) {
    return ScaleFunction(Mode::linear, {Vec2(0.0, s0), Vec2(1.0, s1)});
  }

  double operator()(double t) const;
  Mode mode() const noexcept { return mode_; }
  const std::vector<Vec2>& knots() const noexcept { return knots_; }

 private:
  Mode mode_ = Mode::linear;
  std::vector<Vec2> knots_{Vec2(0.0, 1.0), Vec2(1.0, 1.0)};
};

}  // namespace geocode::geom
