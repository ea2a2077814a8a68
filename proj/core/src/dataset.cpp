#include "geocode/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "geocode/error.hpp"
#include "geocode/obj_io.hpp"
#include "geocode/point_cloud.hpp"
#include "geocode/programs.hpp"
#include "geocode/rng.hpp"

namespace geocode::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hash_hex(std::uint64_t h) { return fmt::format("{:016x}", h); }

std::uint64_t parse_hash(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t h = 0;
  try {
    h = std::stoull(s, &used, 16);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ParseError("bad manifest hash '" + s + "'");
  return h;
}

ManifestEntry make_entry(std::size_t index, const params::ParameterVector& v) {
  ManifestEntry e;
  e.id = sample_id(index);
  e.index = index;
  e.hash = params::vector_hash(v);
  e.params = v;
  e.obj = "obj/" + e.id + ".obj";
  e.labels = "labels/" + e.id + ".json";
  e.pc_fps = "pc_fps/" + e.id + ".pcxyz";
  e.pc_rand = "pc_rand/" + e.id + ".pcxyz";
  return e;
}

bool complete_on_disk(const fs::path& out, const ManifestEntry& e, const std::string& label) {
  for (const auto& rel : {e.obj, e.pc_fps, e.pc_rand, e.labels})
    if (!fs::is_regular_file(out / rel)) return false;
  try {
    return geom::read_file(out / e.labels) == label;
  } catch (const IoError&) {
    return false;
  }
}

}  // namespace

std::uint64_t sample_seed(std::uint64_t recipe_seed, std::size_t index) noexcept {
  return derive_seed({recipe_seed, static_cast<std::uint64_t>(index)});
}

std::string sample_id(std::size_t index) { return fmt::format("{:06d}", index); }

json label_document(const params::ParameterVector& v, const params::ParameterSchema& schema) {
  return {{"program", schema.id()}, {"params", params::to_json(params::normalize(v, schema), schema)}};
}

json to_json(const DatasetManifest& m) {
  const auto& schema = *programs::get_program(m.program).schema;
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"id", e.id},
                       {"index", e.index},
                       {"hash", hash_hex(e.hash)},
                       {"params", params::to_json(e.params, schema)},
                       {"obj", e.obj},
                       {"labels", e.labels},
                       {"pc_fps", e.pc_fps},
                       {"pc_rand", e.pc_rand}});
  }
  json failures = json::array();
  for (const auto& f : m.failures) failures.push_back({{"id", f.id}, {"index", f.index}, {"error", f.error}});
  return {{"program", m.program},
          {"generator_version", m.generator_version},
          {"recipe", params::to_json(m.recipe)},
          {"entries", std::move(entries)},
          {"failures", std::move(failures)}};
}

DatasetManifest manifest_from_json(const json& doc) {
  try {
    DatasetManifest m;
    m.program = doc.at("program").get<std::string>();
    const auto& schema = *programs::get_program(m.program).schema;
    m.generator_version = doc.at("generator_version").get<std::string>();
    m.recipe = params::parse_recipe(doc.at("recipe").dump());
    for (const auto& je : doc.at("entries")) {
      ManifestEntry e;
      e.id = je.at("id").get<std::string>();
      e.index = je.at("index").get<std::size_t>();
      e.hash = parse_hash(je.at("hash").get<std::string>());
      e.params = params::vector_from_json(je.at("params"), schema);
      e.obj = je.at("obj").get<std::string>();
      e.labels = je.at("labels").get<std::string>();
      e.pc_fps = je.at("pc_fps").get<std::string>();
      e.pc_rand = je.at("pc_rand").get<std::string>();
      m.entries.push_back(std::move(e));
    }
    for (const auto& jf : doc.at("failures"))
      m.failures.push_back({jf.at("id").get<std::string>(), jf.at("index").get<std::size_t>(),
                            jf.at("error").get<std::string>()});
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad manifest: ") + e.what());
  }
}

DatasetManifest load_manifest(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  json doc;
  try {
    doc = json::parse(geom::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return manifest_from_json(doc);
}

GenerateResult generate(const params::Recipe& recipe, const fs::path& out, const GenerateOptions& opts) {
  const auto& program = programs::get_program(recipe.program);
  const auto& schema = *program.schema;
  params::Recipe run = recipe;
  if (opts.seed) run.seed = *opts.seed;
  params::validate_recipe(run, schema);

  auto vectors = params::enumerate_sweep(run, schema);
  if (opts.limit && *opts.limit < vectors.size()) vectors.resize(*opts.limit);
  const std::size_t n = vectors.size();

  for (const char* sub : {"obj", "labels", "pc_fps", "pc_rand"}) {
    std::error_code ec;
    fs::create_directories(out / sub, ec);
    if (ec) throw IoError("cannot create " + (out / sub).string() + ": " + ec.message());
  }

  std::vector<std::optional<ManifestEntry>> done_entries(n);
  std::vector<std::optional<SampleFailure>> done_failures(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> written{0};
  std::atomic<std::size_t> skipped{0};
  std::atomic<bool> abort{false};
  std::mutex report_mutex;
  std::size_t finished = 0;
  std::exception_ptr fatal;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || abort.load()) return;
      const auto& v = vectors[i];
      auto entry = make_entry(i, v);
      const auto label = label_document(v, schema).dump(2) + "\n";
      try {
        if (complete_on_disk(out, entry, label)) {
          ++skipped;
        } else {
          const auto mesh = program.graph.evaluate(v);
          const auto clouds = pc::make_training_clouds(mesh, sample_seed(run.seed, i));
          geom::save_obj(mesh, out / entry.obj);
          pc::save_pcxyz(clouds.fps, out / entry.pc_fps);
          pc::save_pcxyz(clouds.random, out / entry.pc_rand);
          // Labels go last: their presence marks the sample complete.
          geom::write_file(out / entry.labels, label);
          ++written;
        }
        done_entries[i] = std::move(entry);
      } catch (const IoError&) {
        std::lock_guard lock(report_mutex);
        if (!fatal) fatal = std::current_exception();
        abort = true;
        return;
      } catch (const fs::filesystem_error&) {
        std::lock_guard lock(report_mutex);
        if (!fatal) fatal = std::current_exception();
        abort = true;
        return;
      } catch (const std::exception& e) {
        done_failures[i] = SampleFailure{sample_id(i), i, e.what()};
      }
      if (opts.progress) {
        std::lock_guard lock(report_mutex);
        opts.progress(++finished, n);
      }
    }
  };

  unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  GenerateResult result;
  result.manifest.program = run.program;
  result.manifest.recipe = run;
  for (std::size_t i = 0; i < n; ++i) {
    if (done_entries[i]) result.manifest.entries.push_back(std::move(*done_entries[i]));
    if (done_failures[i]) result.manifest.failures.push_back(std::move(*done_failures[i]));
  }
  result.written = written;
  result.skipped = skipped;
  geom::write_file(out / "manifest.json", to_json(result.manifest).dump(2) + "\n");
  return result;
}

}  // namespace geocode::dataset
