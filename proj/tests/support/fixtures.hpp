#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geocode/mesh.hpp"
#include "geocode/param_space.hpp"
#include "geocode/rng.hpp"
#include "oracles.hpp"

namespace testing_support {

/// Uniformly drawn on-grid vector, canonicalized.
geocode::params::ParameterVector random_vector(const geocode::params::ParameterSchema& schema, geocode::Rng& rng);

std::vector<oracle::P3> to_p3(const std::vector<geocode::geom::Vec3>& pts);

std::filesystem::path recipes_dir();

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p);

}  // namespace testing_support
