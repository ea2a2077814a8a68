#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "geocode/chamfer.hpp"
#include "geocode/dataset.hpp"
#include "geocode/param_space.hpp"
#include "geocode/point_cloud.hpp"
#include "geocode/programs.hpp"

namespace geocode::fit {

inline constexpr std::size_t kSignaturePoints = 256;
inline constexpr std::size_t kObjectiveSamples = 32768;
inline constexpr std::uint64_t kObjectiveSeed = 0x5eedf17ull;
inline constexpr std::size_t kRetrieveCount = 5;
inline constexpr double kLowConfidenceFactor = 10.0;

struct IndexEntry {
  std::string id;
  params::ParameterVector params;
  std::shared_ptr<const metrics::CloudIndex> signature;  // FPS-256 of the stored FPS cloud
};

/// Read-only retrieval index over a generated dataset.
struct FitIndex {
  std::string program;
  std::vector<IndexEntry> entries;
  /// Median refinement objective of members against their own stored
  /// clouds: the sampling-noise floor of the objective.
  double floor = 0.0;
};

struct IndexOptions {
  /// Members (evenly spaced over the manifest) used to estimate the floor.
  std::size_t floor_members = 16;
  std::size_t samples = kObjectiveSamples;
  std::uint64_t seed = kObjectiveSeed;
};

/// Throws ValidationError on an empty manifest, IoError/ParseError on
/// missing or corrupt files.
FitIndex build_index(const dataset::DatasetManifest& manifest, const std::filesystem::path& dir,
                     const IndexOptions& opts = {});

/// FPS-256 signature of a query cloud.
std::vector<geom::Vec3> signature(const pc::PointCloud& cloud);

struct Match {
  std::size_t entry = 0;
  double distance = 0.0;
};

/// The k entries closest to the cloud's signature, ascending (ties by index
/// order). Throws ValidationError when the index is empty or k is out of
/// range.
std::vector<Match> retrieve(const pc::PointCloud& cloud, const FitIndex& index, std::size_t k);

/// chamfer(surface_sample(evaluate(v), n, seed), target), memoized per
/// canonical vector.
class Objective {
 public:
  Objective(const programs::Program& program, const pc::PointCloud& target, std::size_t samples = kObjectiveSamples,
            std::uint64_t seed = kObjectiveSeed);

  /// Throws whatever evaluation throws.
  double operator()(const params::ParameterVector& v);
  bool cached(const params::ParameterVector& v) const;
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  const programs::Program& program_;
  metrics::CloudIndex target_;
  std::size_t samples_;
  std::uint64_t seed_;
  std::size_t evaluations_ = 0;
  std::unordered_map<std::string, double> memo_;
};

struct RefineOptions {
  /// Maximum number of distinct objective evaluations, start included.
  std::size_t budget = 500;
  /// A step is taken only when it lowers the objective by more than this.
  double tolerance = 1e-6;
  std::size_t samples = kObjectiveSamples;
  std::uint64_t seed = kObjectiveSeed;
};

struct RefineResult {
  params::ParameterVector params;
  double objective = 0.0;
  double start_objective = 0.0;
  std::size_t evaluations = 0;
  /// Objective after the start and after every accepted step.
  std::vector<double> trace;
  /// Candidates whose evaluation failed, with the reason.
  std::vector<std::string> failures;
};

/// Cyclic coordinate descent over the parameter grid in schema order: each
/// visible parameter tries its grid neighbours (booleans toggled), each
/// canonicalized, and moves to the best strict improvement. Stops when the
/// budget is spent or a full pass changes nothing. Throws ValidationError on
/// budget 0 or a non-canonical start.
RefineResult refine(const pc::PointCloud& target, const params::ParameterVector& start,
                    const programs::Program& program, const RefineOptions& opts = {});

struct FitResult {
  params::ParameterVector params;
  double objective = 0.0;
  bool low_confidence = false;
  std::vector<Match> candidates;
  std::size_t start_entry = 0;
  std::size_t evaluations = 0;
};

/// Retrieves kRetrieveCount candidates, refines the one with the lowest
/// objective and flags the result when its objective exceeds
/// kLowConfidenceFactor times the index floor.
FitResult fit(const pc::PointCloud& target, const FitIndex& index, const RefineOptions& opts = {});

}  // namespace geocode::fit
