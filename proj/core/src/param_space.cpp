#include "geocode/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <nlohmann/json.hpp>

#include "geocode/error.hpp"

namespace geocode::params {

using nlohmann::json;

std::string_view to_string(ParamKind kind) noexcept {
  switch (kind) {
    case ParamKind::discrete: return "discrete";
    case ParamKind::boolean: return "boolean";
    case ParamKind::continuous: return "continuous";
  }
  return "?";
}

int ParameterSpec::value_count() const noexcept {
  switch (kind) {
    case ParamKind::discrete: return static_cast<int>(hi - lo + 1);
    case ParamKind::boolean: return 2;
    case ParamKind::continuous: return granularity;
  }
  return 0;
}

int ParameterSpec::class_count() const noexcept { return value_count() + (can_be_invisible ? 1 : 0); }

ParameterSpec ParameterSpec::continuous(std::string name, double min, double max, int granularity,
                                        double default_value, std::string part) {
  ParameterSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::continuous;
  s.min = min;
  s.max = max;
  s.granularity = granularity;
  s.default_value = default_value;
  s.part = std::move(part);
  return s;
}

ParameterSpec ParameterSpec::discrete(std::string name, std::int64_t lo, std::int64_t hi,
                                      std::int64_t default_value, std::string part) {
  ParameterSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::discrete;
  s.lo = lo;
  s.hi = hi;
  s.default_value = default_value;
  s.part = std::move(part);
  return s;
}

ParameterSpec ParameterSpec::boolean(std::string name, bool default_value, std::string part) {
  ParameterSpec s;
  s.name = std::move(name);
  s.kind = ParamKind::boolean;
  s.default_value = default_value;
  s.part = std::move(part);
  return s;
}

double grid_value(double min, double max, int granularity, int index) noexcept {
  if (granularity <= 1 || index <= 0) return min;
  if (index >= granularity - 1) return max;
  return min + (max - min) * (static_cast<double>(index) / static_cast<double>(granularity - 1));
}

double grid_value(const ParameterSpec& spec, int index) noexcept {
  return grid_value(spec.min, spec.max, spec.granularity, index);
}

std::string_view to_string(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::eq: return "eq";
    case CompareOp::ne: return "ne";
    case CompareOp::lt: return "lt";
    case CompareOp::le: return "le";
    case CompareOp::gt: return "gt";
    case CompareOp::ge: return "ge";
  }
  return "?";
}

CompareOp compare_op_from_string(std::string_view text) {
  for (auto op : {CompareOp::eq, CompareOp::ne, CompareOp::lt, CompareOp::le, CompareOp::gt,
                  CompareOp::ge}) {
    if (to_string(op) == text) return op;
  }
  throw ValidationError(std::string(text), "unknown comparison operator");
}

namespace {

double as_number(const ParamValue& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return kNormalizedLabel;
}

void validate_value(const ParamValue& value, const ParameterSpec& s) {
  if (is_hidden(value)) {
    if (!s.can_be_invisible) throw ValidationError(s.name, "existence label on a parameter that cannot be invisible");
    return;
  }
  switch (s.kind) {
    case ParamKind::continuous: {
      const auto* d = std::get_if<double>(&value);
      if (!d) throw ValidationError(s.name, "expected a real value");
      if (!std::isfinite(*d) || *d < s.min || *d > s.max)
        throw ValidationError(s.name, "value " + std::to_string(*d) + " outside [" + std::to_string(s.min) + ", " +
                                          std::to_string(s.max) + "]");
      break;
    }
    case ParamKind::discrete: {
      const auto* i = std::get_if<std::int64_t>(&value);
      if (!i) throw ValidationError(s.name, "expected an integer value");
      if (*i < s.lo || *i > s.hi)
        throw ValidationError(s.name, "value " + std::to_string(*i) + " outside {" + std::to_string(s.lo) + ".." +
                                          std::to_string(s.hi) + "}");
      break;
    }
    case ParamKind::boolean:
      if (!std::holds_alternative<bool>(value)) throw ValidationError(s.name, "expected a boolean value");
      break;
  }
}

}  // namespace

bool VisibilityRule::hides(const ParamValue& controller_value) const {
  if (is_hidden(controller_value)) return true;
  const double x = as_number(controller_value);
  switch (op) {
    case CompareOp::eq: return x == value;
    case CompareOp::ne: return x != value;
    case CompareOp::lt: return x < value;
    case CompareOp::le: return x <= value;
    case CompareOp::gt: return x > value;
    case CompareOp::ge: return x >= value;
  }
  return false;
}

ParameterSchema::ParameterSchema(std::string id, std::vector<ParameterSpec> specs,
                                 std::vector<VisibilityRule> rules)
    : id_(std::move(id)), specs_(std::move(specs)), rules_(std::move(rules)) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& s = specs_[i];
    if (s.name.empty()) throw ValidationError("", "parameter with empty name");
    if (!index_.emplace(s.name, i).second) throw ValidationError(s.name, "duplicate parameter name");
    switch (s.kind) {
      case ParamKind::continuous:
        if (!(s.min < s.max)) throw ValidationError(s.name, "continuous range requires min < max");
        if (s.granularity < 2) throw ValidationError(s.name, "granularity must be at least 2");
        if (s.can_be_invisible && s.min <= kNormalizedLabel && kNormalizedLabel <= s.max)
          throw ValidationError(s.name, "range overlaps the existence label");
        break;
      case ParamKind::discrete:
        if (s.lo > s.hi) throw ValidationError(s.name, "discrete range requires lo <= hi");
        if (s.can_be_invisible && s.lo <= -1 && -1 <= s.hi)
          throw ValidationError(s.name, "range overlaps the existence label");
        break;
      case ParamKind::boolean: break;
    }
  }

  hidden_by_.assign(specs_.size(), {});
  std::vector<std::vector<std::size_t>> children(specs_.size());
  std::vector<int> indegree(specs_.size(), 0);
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    const auto& rule = rules_[r];
    const std::size_t c = require(rule.controller);
    for (const auto& dep : rule.dependents) {
      const std::size_t d = require(dep);
      if (d == c) throw ValidationError(dep, "visibility rule controller lists itself as dependent");
      if (!specs_[d].can_be_invisible)
        throw ValidationError(dep, "dependent of a visibility rule must be able to be invisible");
      hidden_by_[d].push_back(r);
      children[c].push_back(d);
      ++indegree[d];
    }
  }

  // Kahn's algorithm, smallest index first for a stable order.
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (indegree[i] == 0) ready.insert(i);
  while (!ready.empty()) {
    const std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    param_order_.push_back(i);
    for (auto d : children[i])
      if (--indegree[d] == 0) ready.insert(d);
  }
  if (param_order_.size() != specs_.size())
    throw ValidationError(id_, "visibility rules form a cycle");

  for (const auto& s : specs_) {
    if (is_hidden(s.default_value)) throw ValidationError(s.name, "default cannot be the existence label");
    validate_value(s.default_value, s);
  }
}

std::optional<std::size_t> ParameterSchema::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ParameterSchema::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw ValidationError(std::string(name), "unknown parameter");
}

std::size_t ParameterSchema::encoding_length() const noexcept {
  std::size_t n = 0;
  for (const auto& s : specs_) n += static_cast<std::size_t>(s.class_count());
  return n;
}

std::vector<std::uint8_t> LabelEncoding::flatten() const {
  std::vector<std::uint8_t> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

ParameterVector default_vector(const ParameterSchema& schema) {
  ParameterVector v;
  v.values.reserve(schema.size());
  for (const auto& s : schema.specs()) v.values.push_back(s.default_value);
  return canonicalize(v, schema);
}

namespace {

void check_size(std::size_t n, const ParameterSchema& schema) {
  if (n != schema.size())
    throw ValidationError(schema.id(), "vector has " + std::to_string(n) + " entries, schema expects " +
                                           std::to_string(schema.size()));
}

}  // namespace

void validate(const ParameterVector& v, const ParameterSchema& schema) {
  check_size(v.values.size(), schema);
  for (std::size_t i = 0; i < v.values.size(); ++i) validate_value(v.values[i], schema.spec(i));
}

NormalizedVector normalize(const ParameterVector& v, const ParameterSchema& schema) {
  validate(v, schema);
  NormalizedVector out;
  out.values.reserve(v.values.size());
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const auto& s = schema.spec(i);
    const auto& value = v.values[i];
    if (is_hidden(value)) {
      out.values.push_back(kNormalizedLabel);
      continue;
    }
    switch (s.kind) {
      case ParamKind::continuous:
        out.values.push_back((std::get<double>(value) - s.min) / (s.max - s.min));
        break;
      case ParamKind::discrete:
        out.values.push_back(static_cast<double>(std::get<std::int64_t>(value) - s.lo));
        break;
      case ParamKind::boolean:
        out.values.push_back(std::get<bool>(value) ? 1.0 : 0.0);
        break;
    }
  }
  return out;
}

ParameterVector denormalize(const NormalizedVector& v, const ParameterSchema& schema) {
  check_size(v.values.size(), schema);
  ParameterVector out;
  out.values.reserve(v.values.size());
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const auto& s = schema.spec(i);
    const double x = v.values[i];
    if (x == kNormalizedLabel && s.can_be_invisible) {
      out.values.emplace_back(existence_label);
      continue;
    }
    switch (s.kind) {
      case ParamKind::continuous:
        if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(s.name, "normalized value outside [0, 1]");
        out.values.emplace_back(x == 1.0 ? s.max : s.min + (s.max - s.min) * x);
        break;
      case ParamKind::discrete:
        if (x != std::floor(x) || x < 0.0 || x > static_cast<double>(s.hi - s.lo))
          throw ValidationError(s.name, "normalized discrete value must be an integer class index");
        out.values.emplace_back(s.lo + static_cast<std::int64_t>(x));
        break;
      case ParamKind::boolean:
        if (x != 0.0 && x != 1.0) throw ValidationError(s.name, "normalized boolean must be 0 or 1");
        out.values.emplace_back(x == 1.0);
        break;
    }
  }
  return out;
}

namespace {

/// Final visibility of every parameter after rule propagation.
std::vector<bool> hidden_mask(const ParameterVector& v, const ParameterSchema& schema,
                              ParameterVector* canonical) {
  std::vector<bool> hidden(schema.size(), false);
  ParameterVector result = v;
  for (auto i : schema.param_order()) {
    bool h = false;
    for (auto r : schema.rules_hiding(i)) {
      const auto& rule = schema.rules()[r];
      const auto c = *schema.index_of(rule.controller);
      if (hidden[c] || rule.hides(result.values[c])) {
        h = true;
        break;
      }
    }
    hidden[i] = h;
    if (h)
      result.values[i] = existence_label;
    else if (is_hidden(result.values[i]))
      result.values[i] = schema.spec(i).default_value;
  }
  if (canonical) *canonical = std::move(result);
  return hidden;
}

}  // namespace

bool rule_hides(const ParameterVector& v, const ParameterSchema& schema, std::size_t i) {
  check_size(v.values.size(), schema);
  return hidden_mask(v, schema, nullptr).at(i);
}

ParameterVector canonicalize(const ParameterVector& v, const ParameterSchema& schema) {
  validate(v, schema);
  ParameterVector out;
  hidden_mask(v, schema, &out);
  return out;
}

bool is_canonical(const ParameterVector& v, const ParameterSchema& schema) {
  return canonicalize(v, schema) == v;
}

LabelEncoding encode_onehot(const NormalizedVector& v, const ParameterSchema& schema) {
  check_size(v.values.size(), schema);
  LabelEncoding e;
  e.blocks.reserve(schema.size());
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const auto& s = schema.spec(i);
    const double x = v.values[i];
    std::vector<std::uint8_t> block(static_cast<std::size_t>(s.class_count()), 0);
    int cls = -1;
    if (x == kNormalizedLabel && s.can_be_invisible) {
      cls = s.class_count() - 1;
    } else {
      switch (s.kind) {
        case ParamKind::continuous: {
          if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(s.name, "normalized value outside [0, 1]");
          const double steps = static_cast<double>(s.granularity - 1);
          const double k = std::round(x * steps);
          if (std::abs(x - k / steps) > kGridTolerance)
            throw ValidationError(s.name, "value is off the granularity grid");
          cls = static_cast<int>(k);
          break;
        }
        case ParamKind::discrete:
          if (x != std::floor(x) || x < 0.0 || x >= s.value_count())
            throw ValidationError(s.name, "discrete class index out of range");
          cls = static_cast<int>(x);
          break;
        case ParamKind::boolean:
          if (x != 0.0 && x != 1.0) throw ValidationError(s.name, "boolean must be 0 or 1");
          cls = static_cast<int>(x);
          break;
      }
    }
    block[static_cast<std::size_t>(cls)] = 1;
    e.blocks.push_back(std::move(block));
  }
  return e;
}

ParameterVector decode_onehot(const LabelEncoding& e, const ParameterSchema& schema) {
  check_size(e.blocks.size(), schema);
  ParameterVector out;
  out.values.reserve(schema.size());
  for (std::size_t i = 0; i < e.blocks.size(); ++i) {
    const auto& s = schema.spec(i);
    const auto& block = e.blocks[i];
    if (block.size() != static_cast<std::size_t>(s.class_count()))
      throw ValidationError(s.name, "one-hot block has wrong length");
    int cls = -1;
    for (std::size_t k = 0; k < block.size(); ++k) {
      if (block[k] == 0) continue;
      if (block[k] != 1 || cls >= 0) throw ValidationError(s.name, "one-hot block must contain exactly one 1");
      cls = static_cast<int>(k);
    }
    if (cls < 0) throw ValidationError(s.name, "one-hot block must contain exactly one 1");
    if (s.can_be_invisible && cls == s.class_count() - 1) {
      out.values.emplace_back(existence_label);
      continue;
    }
    switch (s.kind) {
      case ParamKind::continuous: out.values.emplace_back(grid_value(s, cls)); break;
      case ParamKind::discrete: out.values.emplace_back(s.lo + static_cast<std::int64_t>(cls)); break;
      case ParamKind::boolean: out.values.emplace_back(cls == 1); break;
    }
  }
  return out;
}

std::int64_t round_half_even(double x) noexcept {
  const double f = std::floor(x);
  const double diff = x - f;
  auto n = static_cast<std::int64_t>(f);
  if (diff > 0.5) return n + 1;
  if (diff < 0.5) return n;
  return (n % 2 == 0) ? n : n + 1;
}

ParameterVector interpolate(const ParameterVector& a, const ParameterVector& b, double alpha,
                            const ParameterSchema& schema) {
  validate(a, schema);
  validate(b, schema);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha", "must lie in [0, 1]");
  if (alpha == 0.0) return a;
  if (alpha == 1.0) return b;

  ParameterVector out;
  out.values.reserve(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& s = schema.spec(i);
    const auto& x = a.values[i];
    const auto& y = b.values[i];
    if (is_hidden(x) && is_hidden(y)) {
      out.values.emplace_back(existence_label);
      continue;
    }
    // One side hidden: the real value is carried over and the controller's
    // own interpolation decides visibility during canonicalization.
    if (is_hidden(x)) {
      out.values.push_back(y);
      continue;
    }
    if (is_hidden(y)) {
      out.values.push_back(x);
      continue;
    }
    switch (s.kind) {
      case ParamKind::continuous: {
        const double p = std::get<double>(x);
        const double q = std::get<double>(y);
        out.values.emplace_back(std::clamp(p + alpha * (q - p), s.min, s.max));
        break;
      }
      case ParamKind::discrete: {
        const auto p = static_cast<double>(std::get<std::int64_t>(x));
        const auto q = static_cast<double>(std::get<std::int64_t>(y));
        out.values.emplace_back(std::clamp(round_half_even(p + alpha * (q - p)), s.lo, s.hi));
        break;
      }
      case ParamKind::boolean:
        out.values.push_back(alpha >= 0.5 ? y : x);
        break;
    }
  }
  return canonicalize(out, schema);
}

ParameterVector mix(const ParameterVector& source, const ParameterVector& donor,
                    std::span<const std::string> selection, const ParameterSchema& schema) {
  validate(source, schema);
  validate(donor, schema);
  std::vector<bool> selected(schema.size(), false);
  for (const auto& name : selection) selected[schema.require(name)] = true;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!selected[i]) continue;
    for (auto r : schema.rules_hiding(i)) {
      const auto& controller = schema.rules()[r].controller;
      if (!selected[*schema.index_of(controller)])
        throw ValidationError(schema.spec(i).name,
                              "selection is not closed under visibility rules: requires controller '" +
                                  controller + "'");
    }
  }
  ParameterVector out = source;
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (selected[i]) out.values[i] = donor.values[i];
  return canonicalize(out, schema);
}

// JSON ----------------------------------------------------------------------

json to_json(const ParameterVector& v, const ParameterSchema& schema) {
  check_size(v.values.size(), schema);
  json doc = json::object();
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const auto& name = schema.spec(i).name;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Hidden>)
            doc[name] = kNormalizedLabel;
          else
            doc[name] = x;
        },
        v.values[i]);
  }
  return doc;
}

ParameterVector vector_from_json(const json& doc, const ParameterSchema& schema, bool allow_partial) {
  if (!doc.is_object()) throw ValidationError("", "parameter document must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) schema.require(it.key());

  ParameterVector v;
  v.values.reserve(schema.size());
  for (const auto& s : schema.specs()) {
    auto it = doc.find(s.name);
    if (it == doc.end()) {
      if (!allow_partial) throw ValidationError(s.name, "missing parameter");
      v.values.push_back(s.default_value);
      continue;
    }
    const json& x = *it;
    if (s.can_be_invisible && (x.is_null() || (x.is_number() && x.get<double>() == kNormalizedLabel))) {
      v.values.emplace_back(existence_label);
      continue;
    }
    switch (s.kind) {
      case ParamKind::continuous:
        if (!x.is_number()) throw ValidationError(s.name, "expected a number");
        v.values.emplace_back(x.get<double>());
        break;
      case ParamKind::discrete: {
        if (!x.is_number()) throw ValidationError(s.name, "expected an integer");
        const double d = x.get<double>();
        if (d != std::floor(d)) throw ValidationError(s.name, "expected an integer");
        v.values.emplace_back(static_cast<std::int64_t>(d));
        break;
      }
      case ParamKind::boolean:
        if (x.is_boolean())
          v.values.emplace_back(x.get<bool>());
        else if (x.is_number() && (x.get<double>() == 0.0 || x.get<double>() == 1.0))
          v.values.emplace_back(x.get<double>() == 1.0);
        else
          throw ValidationError(s.name, "expected a boolean");
        break;
    }
  }
  validate(v, schema);
  return v;
}

json to_json(const NormalizedVector& v, const ParameterSchema& schema) {
  check_size(v.values.size(), schema);
  json doc = json::object();
  for (std::size_t i = 0; i < v.values.size(); ++i) doc[schema.spec(i).name] = v.values[i];
  return doc;
}

NormalizedVector normalized_from_json(const json& doc, const ParameterSchema& schema) {
  if (!doc.is_object()) throw ValidationError("", "normalized document must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) schema.require(it.key());
  NormalizedVector v;
  for (const auto& s : schema.specs()) {
    auto it = doc.find(s.name);
    if (it == doc.end() || !it->is_number()) throw ValidationError(s.name, "missing or non-numeric value");
    v.values.push_back(it->get<double>());
  }
  return v;
}

json schema_to_json(const ParameterSchema& schema) {
  json params = json::array();
  for (const auto& s : schema.specs()) {
    json p = {{"name", s.name},
              {"kind", std::string(to_string(s.kind))},
              {"can_be_invisible", s.can_be_invisible},
              {"part", s.part},
              {"classes", s.class_count()}};
    switch (s.kind) {
      case ParamKind::continuous:
        p["min"] = s.min;
        p["max"] = s.max;
        p["granularity"] = s.granularity;
        p["default"] = std::get<double>(s.default_value);
        break;
      case ParamKind::discrete:
        p["min"] = s.lo;
        p["max"] = s.hi;
        p["default"] = std::get<std::int64_t>(s.default_value);
        break;
      case ParamKind::boolean:
        p["default"] = std::get<bool>(s.default_value);
        break;
    }
    if (!s.description.empty()) p["description"] = s.description;
    params.push_back(std::move(p));
  }
  json rules = json::array();
  for (const auto& r : schema.rules()) {
    rules.push_back({{"controller", r.controller},
                     {"op", std::string(to_string(r.op))},
                     {"value", r.value},
                     {"dependents", r.dependents}});
  }
  return {{"id", schema.id()}, {"params", std::move(params)}, {"visibility_rules", std::move(rules)}};
}

std::string canonical_key(const ParameterVector& v) {
  std::string key;
  char buf[40];
  for (const auto& x : v.values) {
    if (!key.empty()) key.push_back(',');
    if (is_hidden(x)) {
      key += "h";
    } else if (const auto* b = std::get_if<bool>(&x)) {
      key += *b ? "b1" : "b0";
    } else if (const auto* i = std::get_if<std::int64_t>(&x)) {
      key += "i" + std::to_string(*i);
    } else {
      std::snprintf(buf, sizeof buf, "d%.17g", std::get<double>(x));
      key += buf;
    }
  }
  return key;
}

std::uint64_t vector_hash(const ParameterVector& v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_key(v)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace geocode::params
