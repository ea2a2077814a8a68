#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geocode/param_space.hpp"
#include "geocode/recipe.hpp"

namespace geocode::dataset {

inline constexpr std::string_view kGeneratorVersion = "geocode-dataset/1";

struct ManifestEntry {
  std::string id;      // zero-padded sweep index
  std::size_t index = 0;
  std::uint64_t hash = 0;  // params::vector_hash of the canonical vector
  params::ParameterVector params;
  std::string obj;  // paths relative to the dataset directory
  std::string labels;
  std::string pc_fps;
  std::string pc_rand;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct SampleFailure {
  std::string id;
  std::size_t index = 0;
  std::string error;

  friend bool operator==(const SampleFailure&, const SampleFailure&) = default;
};

struct DatasetManifest {
  std::string program;
  std::string generator_version{kGeneratorVersion};
  params::Recipe recipe;  // as run, with any seed override applied
  std::vector<ManifestEntry> entries;
  std::vector<SampleFailure> failures;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

nlohmann::json to_json(const DatasetManifest& m);
/// Resolves the program schema from the registry. Throws ParseError or
/// ValidationError on malformed documents.
DatasetManifest manifest_from_json(const nlohmann::json& doc);

/// Reads <dir>/manifest.json.
DatasetManifest load_manifest(const std::filesystem::path& dir);

struct GenerateOptions {
  /// 0 picks the hardware concurrency.
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  /// Only the first `limit` sweep vectors.
  std::optional<std::size_t> limit;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct GenerateResult {
  DatasetManifest manifest;
  std::size_t written = 0;  // samples whose files were (re)written
  std::size_t skipped = 0;  // samples already complete on disk
};

/// Seed for every random draw of sample `index`.
std::uint64_t sample_seed(std::uint64_t recipe_seed, std::size_t index) noexcept;
std::string sample_id(std::size_t index);

/// Label document stored per sample: {"program", "params": normalized}.
nlohmann::json label_document(const params::ParameterVector& v, const params::ParameterSchema& schema);

/// Evaluates every sweep vector and writes obj/, labels/, pc_fps/, pc_rand/
/// and finally manifest.json. Samples whose four files already exist with
/// matching labels are skipped. Evaluation failures are recorded in the
/// manifest; I/O failures throw IoError.
GenerateResult generate(const params::Recipe& recipe, const std::filesystem::path& out,
                        const GenerateOptions& opts = {});

}  // namespace geocode::dataset
