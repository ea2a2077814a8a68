#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "geocode/param_space.hpp"
#include "geocode/program_graph.hpp"

namespace geocode::programs {

/// A registered shape program: schema, graph and declared part set.
struct Program {
  std::string id;
  std::shared_ptr<const params::ParameterSchema> schema;
  graph::ProgramGraph graph;
  std::vector<std::string> parts;
};

std::shared_ptr<const params::ParameterSchema> chair_schema();
std::shared_ptr<const params::ParameterSchema> vase_schema();

graph::ProgramGraph build_chair();
graph::ProgramGraph build_vase();

const std::vector<std::string>& chair_parts();
const std::vector<std::string>& vase_parts();

/// Registered ids, sorted.
std::vector<std::string> program_ids();

/// Built once, shared afterwards. Throws UnknownProgramError.
const Program& get_program(std::string_view id);

/// Documented default vector (canonical). Throws UnknownProgramError.
params::ParameterVector default_params(std::string_view id);

}  // namespace geocode::programs
