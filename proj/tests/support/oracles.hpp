#pragma once

// Test-side reference implementations. None of these call into the library
// code they are used to check.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

using P3 = std::array<double, 3>;

struct ObjData {
  std::vector<P3> vertices;
  std::vector<std::array<std::size_t, 3>> faces;  // zero based
  std::vector<std::string> face_group;
};

/// Minimal OBJ reader: `v`, `g` and triangular `f` lines (v, v/vt, v//vn).
ObjData parse_obj(std::string_view text);

double brute_chamfer(const std::vector<P3>& a, const std::vector<P3>& b);

P3 de_casteljau(const std::array<P3, 4>& ctrl, double u);

/// Bezier parameter u at which the arc-length fraction equals t, from a
/// dense polyline table with `steps` chords.
double arc_param(const std::array<P3, 4>& ctrl, double t, int steps = 200000);

double signed_volume(const ObjData& m);

/// Connected components by shared vertex indices.
std::size_t vertex_components(const ObjData& m);

/// Greedy farthest-point selection computed naively, O(k n) with full
/// recomputation of the min-distance each round.
std::vector<std::size_t> naive_fps(const std::vector<P3>& pts, std::size_t k, std::size_t start);

}  // namespace oracle
