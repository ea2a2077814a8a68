#pragma once

#include <stdexcept>
#include <string>

namespace geocode {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed structured input (JSON, OBJ, point-cloud files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a contract (ranges, names, counts).
class ValidationError : public Error {
 public:
  ValidationError(std::string subject, const std::string& message)
      : Error(subject.empty() ? message : subject + ": " + message), subject_(std::move(subject)) {}

  /// Offending parameter / key / field, empty when not attributable.
  const std::string& subject() const noexcept { return subject_; }

 private:
  std::string subject_;
};

/// Degenerate geometry (zero-length path, zero-area mesh, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Runtime failure while evaluating a program graph node.
class EvalError : public Error {
 public:
  EvalError(std::string node_id, const std::string& message)
      : Error("node '" + node_id + "': " + message), node_id_(std::move(node_id)) {}

  const std::string& node_id() const noexcept { return node_id_; }

 private:
  std::string node_id_;
};

/// Program id not present in the registry.
class UnknownProgramError : public Error {
 public:
  explicit UnknownProgramError(const std::string& id) : Error("unknown program '" + id + "'"), id_(id) {}

  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace geocode
