#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "geocode/param_space.hpp"

namespace geocode::params {

/// Narrows one parameter's sampled range. min == max pins the parameter.
struct ParamOverride {
  std::optional<double> min;
  std::optional<double> max;
  std::optional<int> granularity;

  friend bool operator==(const ParamOverride&, const ParamOverride&) = default;
};

/// Dataset generation instructions.
struct Recipe {
  std::string program;
  std::uint64_t seed = 0;
  int samples_per_value = 1;
  std::map<std::string, ParamOverride> params;

  friend bool operator==(const Recipe&, const Recipe&) = default;
};

/// Parses the JSON recipe document; unknown keys are rejected. Only the
/// structure is checked here, see validate_recipe.
Recipe parse_recipe(std::string_view doc);

/// Checks the recipe against the program's schema.
void validate_recipe(const Recipe& recipe, const ParameterSchema& schema);

Recipe load_recipe(std::string_view doc, const ParameterSchema& schema);

/// Resolves the schema from the recipe's `program` field.
using SchemaResolver = std::function<const ParameterSchema&(std::string_view program)>;
Recipe load_recipe(std::string_view doc, const SchemaResolver& resolve);

nlohmann::json to_json(const Recipe& recipe);

/// Raw grid values the sweep draws from for parameter i.
std::vector<ParamValue> sweep_values(const Recipe& recipe, const ParameterSchema& schema, std::size_t i);

/// Seed of the RNG stream that fills sample `sample` of grid value `grid` of
/// parameter `param`.
std::uint64_t sweep_seed(std::uint64_t recipe_seed, std::size_t param, std::size_t grid, std::size_t sample);

/// Stratified sweep: for every parameter and every one of its grid values,
/// samples_per_value vectors with that value fixed and the others drawn
/// uniformly from their grids. Output is canonical and duplicate free, in a
/// deterministic order. The sink returns false to stop early.
void enumerate_sweep(const Recipe& recipe, const ParameterSchema& schema,
                     const std::function<bool(const ParameterVector&)>& sink);

std::vector<ParameterVector> enumerate_sweep(const Recipe& recipe, const ParameterSchema& schema);

}  // namespace geocode::params
