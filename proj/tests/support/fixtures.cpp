#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace testing_support {

using namespace geocode;

params::ParameterVector random_vector(const params::ParameterSchema& schema, Rng& rng) {
  params::ParameterVector v;
  for (const auto& s : schema.specs()) {
    switch (s.kind) {
      case params::ParamKind::continuous:
        v.values.emplace_back(params::grid_value(s, static_cast<int>(rng.index(s.granularity))));
        break;
      case params::ParamKind::discrete:
        v.values.emplace_back(s.lo + static_cast<std::int64_t>(rng.index(s.hi - s.lo + 1)));
        break;
      case params::ParamKind::boolean:
        v.values.emplace_back(rng.index(2) == 1);
        break;
    }
  }
  return params::canonicalize(v, schema);
}

std::vector<oracle::P3> to_p3(const std::vector<geom::Vec3>& pts) {
  std::vector<oracle::P3> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({p.x(), p.y(), p.z()});
  return out;
}

std::filesystem::path recipes_dir() { return GEOCODE_RECIPES_DIR; }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("geocode-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support
