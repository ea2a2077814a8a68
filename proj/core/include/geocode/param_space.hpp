#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace geocode::params {

enum class ParamKind { discrete, boolean, continuous };

std::string_view to_string(ParamKind kind) noexcept;

/// Marker for a parameter whose controlled part is absent from the shape.
struct Hidden {
  friend bool operator==(Hidden, Hidden) = default;
};
inline constexpr Hidden existence_label{};

/// Raw parameter value: integer for discrete, flag for boolean, real for
/// continuous, or the existence label.
using ParamValue = std::variant<Hidden, bool, std::int64_t, double>;

/// Encoding of the existence label in the normalized form.
inline constexpr double kNormalizedLabel = -1.0;

inline bool is_hidden(const ParamValue& v) noexcept { return std::holds_alternative<Hidden>(v); }

struct ParameterSpec {
  std::string name;
  ParamKind kind = ParamKind::continuous;
  double min = 0.0;  // continuous only
  double max = 1.0;
  std::int64_t lo = 0;  // discrete only
  std::int64_t hi = 1;
  int granularity = 2;  // continuous only: number of uniform grid samples
  bool can_be_invisible = false;
  std::string part;
  ParamValue default_value = 0.0;
  std::string description;

  /// Number of one-hot classes, including the existence class when the
  /// parameter can be invisible.
  int class_count() const noexcept;

  /// Number of visible grid values (class_count without the existence class).
  int value_count() const noexcept;

  static ParameterSpec continuous(std::string name, double min, double max, int granularity,
                                  double default_value, std::string part);
  static ParameterSpec discrete(std::string name, std::int64_t lo, std::int64_t hi,
                                std::int64_t default_value, std::string part);
  static ParameterSpec boolean(std::string name, bool default_value, std::string part);
  ParameterSpec&& invisible() && {
    can_be_invisible = true;
    return std::move(*this);
  }
  ParameterSpec&& describe(std::string text) && {
    description = std::move(text);
    return std::move(*this);
  }
};

/// i-th point of the uniform grid over [min, max]. Every on-grid value in the
/// library is produced by this function so equality tests are exact.
double grid_value(double min, double max, int granularity, int index) noexcept;
double grid_value(const ParameterSpec& spec, int index) noexcept;

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op) noexcept;
CompareOp compare_op_from_string(std::string_view text);

/// When `controller <op> value` holds, every dependent is invisible.
struct VisibilityRule {
  std::string controller;
  CompareOp op = CompareOp::eq;
  double value = 0.0;
  std::vector<std::string> dependents;

  bool hides(const ParamValue& controller_value) const;
};

class ParameterSchema {
 public:
  ParameterSchema() = default;
  /// Throws ValidationError when names collide, ranges are empty, or the
  /// visibility rules reference unknown names or form a cycle.
  ParameterSchema(std::string id, std::vector<ParameterSpec> specs,
                  std::vector<VisibilityRule> rules);

  const std::string& id() const noexcept { return id_; }
  std::span<const ParameterSpec> specs() const noexcept { return specs_; }
  const ParameterSpec& spec(std::size_t i) const { return specs_.at(i); }
  const std::vector<VisibilityRule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return specs_.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Like index_of but throws ValidationError naming the unknown parameter.
  std::size_t require(std::string_view name) const;

  /// Indices of the rules that list parameter i as a dependent.
  const std::vector<std::size_t>& rules_hiding(std::size_t i) const { return hidden_by_.at(i); }

  /// Parameter indices ordered so every controller precedes its dependents.
  const std::vector<std::size_t>& param_order() const noexcept { return param_order_; }

  /// Total length of the one-hot label encoding.
  std::size_t encoding_length() const noexcept;

 private:
  std::string id_;
  std::vector<ParameterSpec> specs_;
  std::vector<VisibilityRule> rules_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> hidden_by_;
  std::vector<std::size_t> param_order_;
};

struct ParameterVector {
  std::vector<ParamValue> values;

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

/// Normalized form: continuous in [0,1], discrete shifted to start at 0,
/// booleans in {0,1}, existence label as -1.0.
struct NormalizedVector {
  std::vector<double> values;

  friend bool operator==(const NormalizedVector&, const NormalizedVector&) = default;
};

struct LabelEncoding {
  std::vector<std::vector<std::uint8_t>> blocks;

  /// Concatenation of all blocks.
  std::vector<std::uint8_t> flatten() const;
};

ParameterVector default_vector(const ParameterSchema& schema);

/// Throws ValidationError naming the first offending parameter.
void validate(const ParameterVector& v, const ParameterSchema& schema);

NormalizedVector normalize(const ParameterVector& v, const ParameterSchema& schema);
ParameterVector denormalize(const NormalizedVector& v, const ParameterSchema& schema);

/// True when some visibility rule hides parameter i given the values in v.
/// A rule whose controller is itself hidden also hides its dependents.
bool rule_hides(const ParameterVector& v, const ParameterSchema& schema, std::size_t i);

/// Applies the visibility rules: hidden parameters become the existence
/// label, visible parameters holding the label revert to their default.
ParameterVector canonicalize(const ParameterVector& v, const ParameterSchema& schema);

bool is_canonical(const ParameterVector& v, const ParameterSchema& schema);

/// Per-block tolerance on the continuous grid check.
inline constexpr double kGridTolerance = 1e-9;

LabelEncoding encode_onehot(const NormalizedVector& v, const ParameterSchema& schema);
ParameterVector decode_onehot(const LabelEncoding& e, const ParameterSchema& schema);

/// Round to nearest integer, ties to even.
std::int64_t round_half_even(double x) noexcept;

ParameterVector interpolate(const ParameterVector& a, const ParameterVector& b, double alpha,
                            const ParameterSchema& schema);

/// Overwrites the selected coordinates of `source` with the donor's. The
/// selection must contain the controller of every selected dependent.
ParameterVector mix(const ParameterVector& source, const ParameterVector& donor,
                    std::span<const std::string> selection, const ParameterSchema& schema);

// JSON forms ---------------------------------------------------------------

/// name -> raw value (label written as -1.0).
nlohmann::json to_json(const ParameterVector& v, const ParameterSchema& schema);
/// Reads a raw map. Unknown names are rejected; missing names take defaults
/// when allow_partial is set. Accepts -1 or null as the existence label on
/// parameters that can be invisible.
ParameterVector vector_from_json(const nlohmann::json& doc, const ParameterSchema& schema,
                                 bool allow_partial = false);

nlohmann::json to_json(const NormalizedVector& v, const ParameterSchema& schema);
NormalizedVector normalized_from_json(const nlohmann::json& doc, const ParameterSchema& schema);

nlohmann::json schema_to_json(const ParameterSchema& schema);

/// Stable textual identity of a vector (used for dedup and hashing).
std::string canonical_key(const ParameterVector& v);
/// FNV-1a over canonical_key.
std::uint64_t vector_hash(const ParameterVector& v);

}  // namespace geocode::params
