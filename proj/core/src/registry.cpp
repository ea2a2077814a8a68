#include <map>
#include <mutex>

#include "geocode/error.hpp"
#include "geocode/programs.hpp"

namespace geocode::programs {

std::vector<std::string> program_ids() { return {"chair", "vase"}; }

const Program& get_program(std::string_view id) {
  static std::mutex mutex;
  static std::map<std::string, Program, std::less<>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(id); it != cache.end()) return it->second;
  Program p;
  if (id == "chair") {
    p = {"chair", chair_schema(), build_chair(), chair_parts()};
  } else if (id == "vase") {
    p = {"vase", vase_schema(), build_vase(), vase_parts()};
  } else {
    throw UnknownProgramError(std::string(id));
  }
  return cache.emplace(std::string(id), std::move(p)).first->second;
}

params::ParameterVector default_params(std::string_view id) {
  const auto& p = get_program(id);
  return params::canonicalize(params::default_vector(*p.schema), *p.schema);
}

}  // namespace geocode::programs
