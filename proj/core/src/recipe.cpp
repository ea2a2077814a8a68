#include "geocode/recipe.hpp"

#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "geocode/error.hpp"
#include "geocode/rng.hpp"

namespace geocode::params {

using nlohmann::json;

namespace {

double number_field(const json& obj, const char* key, const std::string& owner) {
  const auto& x = obj.at(key);
  if (x.is_boolean()) return x.get<bool>() ? 1.0 : 0.0;
  if (!x.is_number()) throw ValidationError(owner, std::string("'") + key + "' must be a number");
  return x.get<double>();
}

}  // namespace

Recipe parse_recipe(std::string_view doc) {
  json root;
  try {
    root = json::parse(doc);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("recipe: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("recipe: top level must be an object");

  for (auto it = root.begin(); it != root.end(); ++it) {
    const auto& k = it.key();
    if (k != "program" && k != "seed" && k != "samples_per_value" && k != "params")
      throw ValidationError(k, "unknown recipe key");
  }

  Recipe r;
  if (!root.contains("program") || !root["program"].is_string())
    throw ValidationError("program", "recipe requires a string 'program'");
  r.program = root["program"].get<std::string>();

  if (root.contains("seed")) {
    const auto& s = root["seed"];
    if (!s.is_number_integer()) throw ValidationError("seed", "must be an integer");
    r.seed = s.is_number_unsigned() ? s.get<std::uint64_t>()
                                    : static_cast<std::uint64_t>(s.get<std::int64_t>());
  }
  if (root.contains("samples_per_value")) {
    const auto& s = root["samples_per_value"];
    if (!s.is_number_integer() || s.get<std::int64_t>() < 1)
      throw ValidationError("samples_per_value", "must be a positive integer");
    r.samples_per_value = s.get<int>();
  }
  if (root.contains("params")) {
    const auto& params = root["params"];
    if (!params.is_object()) throw ValidationError("params", "must be an object");
    for (auto it = params.begin(); it != params.end(); ++it) {
      const auto& name = it.key();
      const auto& body = it.value();
      if (!body.is_object()) throw ValidationError(name, "override must be an object");
      ParamOverride o;
      for (auto f = body.begin(); f != body.end(); ++f) {
        const auto& key = f.key();
        if (key == "min")
          o.min = number_field(body, "min", name);
        else if (key == "max")
          o.max = number_field(body, "max", name);
        else if (key == "granularity") {
          if (!f.value().is_number_integer()) throw ValidationError(name, "'granularity' must be an integer");
          o.granularity = f.value().get<int>();
        } else
          throw ValidationError(name + "." + key, "unknown override key");
      }
      r.params.emplace(name, o);
    }
  }
  return r;
}

void validate_recipe(const Recipe& recipe, const ParameterSchema& schema) {
  if (recipe.program != schema.id())
    throw ValidationError("program", "recipe targets '" + recipe.program + "' but schema is '" + schema.id() + "'");
  if (recipe.samples_per_value < 1) throw ValidationError("samples_per_value", "must be positive");
  for (const auto& [name, o] : recipe.params) {
    const auto& s = schema.spec(schema.require(name));
    double lo = 0, hi = 1;
    switch (s.kind) {
      case ParamKind::continuous: lo = s.min; hi = s.max; break;
      case ParamKind::discrete: lo = static_cast<double>(s.lo); hi = static_cast<double>(s.hi); break;
      case ParamKind::boolean: lo = 0; hi = 1; break;
    }
    const double mn = o.min.value_or(lo);
    const double mx = o.max.value_or(hi);
    if (mn > mx) throw ValidationError(name, "min > max");
    if (mn < lo || mx > hi) throw ValidationError(name, "override range outside the parameter's range");
    if (s.kind != ParamKind::continuous) {
      if (o.granularity) throw ValidationError(name, "granularity applies to continuous parameters only");
      if (mn != std::floor(mn) || mx != std::floor(mx))
        throw ValidationError(name, "integer bounds required");
    } else if (mn < mx && o.granularity.value_or(s.granularity) < 2) {
      throw ValidationError(name, "granularity must be at least 2");
    }
  }
}

Recipe load_recipe(std::string_view doc, const ParameterSchema& schema) {
  Recipe r = parse_recipe(doc);
  validate_recipe(r, schema);
  return r;
}

Recipe load_recipe(std::string_view doc, const SchemaResolver& resolve) {
  Recipe r = parse_recipe(doc);
  validate_recipe(r, resolve(r.program));
  return r;
}

json to_json(const Recipe& recipe) {
  json params = json::object();
  for (const auto& [name, o] : recipe.params) {
    json p = json::object();
    if (o.min) p["min"] = *o.min;
    if (o.max) p["max"] = *o.max;
    if (o.granularity) p["granularity"] = *o.granularity;
    params[name] = std::move(p);
  }
  return {{"program", recipe.program},
          {"seed", recipe.seed},
          {"samples_per_value", recipe.samples_per_value},
          {"params", std::move(params)}};
}

std::vector<ParamValue> sweep_values(const Recipe& recipe, const ParameterSchema& schema, std::size_t i) {
  const auto& s = schema.spec(i);
  const ParamOverride* o = nullptr;
  if (auto it = recipe.params.find(s.name); it != recipe.params.end()) o = &it->second;

  std::vector<ParamValue> out;
  switch (s.kind) {
    case ParamKind::continuous: {
      const double mn = o && o->min ? *o->min : s.min;
      const double mx = o && o->max ? *o->max : s.max;
      if (mn == mx) {
        out.emplace_back(mn);
        break;
      }
      // Unchanged ranges reuse the schema grid exactly.
      const int g = o && o->granularity ? *o->granularity : s.granularity;
      for (int k = 0; k < g; ++k) out.emplace_back(grid_value(mn, mx, g, k));
      break;
    }
    case ParamKind::discrete: {
      const auto mn = o && o->min ? static_cast<std::int64_t>(*o->min) : s.lo;
      const auto mx = o && o->max ? static_cast<std::int64_t>(*o->max) : s.hi;
      for (auto k = mn; k <= mx; ++k) out.emplace_back(k);
      break;
    }
    case ParamKind::boolean: {
      const bool mn = o && o->min ? *o->min != 0.0 : false;
      const bool mx = o && o->max ? *o->max != 0.0 : true;
      out.emplace_back(mn);
      if (mx != mn) out.emplace_back(mx);
      break;
    }
  }
  return out;
}

std::uint64_t sweep_seed(std::uint64_t recipe_seed, std::size_t param, std::size_t grid, std::size_t sample) {
  return derive_seed({recipe_seed, param, grid, sample});
}

void enumerate_sweep(const Recipe& recipe, const ParameterSchema& schema,
                     const std::function<bool(const ParameterVector&)>& sink) {
  validate_recipe(recipe, schema);
  std::vector<std::vector<ParamValue>> grids;
  grids.reserve(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) grids.push_back(sweep_values(recipe, schema, i));

  std::unordered_set<std::string> seen;
  ParameterVector v;
  v.values.resize(schema.size());
  for (std::size_t p = 0; p < schema.size(); ++p) {
    for (std::size_t k = 0; k < grids[p].size(); ++k) {
      for (int n = 0; n < recipe.samples_per_value; ++n) {
        Rng rng(sweep_seed(recipe.seed, p, k, static_cast<std::size_t>(n)));
        for (std::size_t q = 0; q < schema.size(); ++q) {
          if (q == p) {
            v.values[q] = grids[p][k];
          } else {
            v.values[q] = grids[q][rng.index(grids[q].size())];
          }
        }
        ParameterVector c = canonicalize(v, schema);
        if (!seen.insert(canonical_key(c)).second) continue;
        if (!sink(c)) return;
      }
    }
  }
}

std::vector<ParameterVector> enumerate_sweep(const Recipe& recipe, const ParameterSchema& schema) {
  std::vector<ParameterVector> out;
  enumerate_sweep(recipe, schema, [&](const ParameterVector& v) {
    out.push_back(v);
    return true;
  });
  return out;
}

}  // namespace geocode::params
