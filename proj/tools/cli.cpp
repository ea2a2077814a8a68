#include "cli.hpp"

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "api.hpp"
#include "geocode/chamfer.hpp"
#include "geocode/dataset.hpp"
#include "geocode/error.hpp"
#include "geocode/fit.hpp"
#include "geocode/obj_io.hpp"
#include "geocode/programs.hpp"
#include "geocode/rng.hpp"
#include "geocode/stability.hpp"
#include "service.hpp"

namespace geocode::cli {

namespace fs = std::filesystem;
using api::ErrorCode;
using api::RequestError;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
  const auto text = geom::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

params::ParameterVector load_params(const programs::Program& p, const std::string& file) {
  if (file.empty()) return programs::default_params(p.id);
  return params::canonicalize(params::vector_from_json(read_json_file(file), *p.schema, true), *p.schema);
}

void write_mesh(const geom::LabeledMesh& m, const fs::path& out) {
  if (out.extension() == ".json")
    geom::write_file(out, api::mesh_to_json(m).dump() + "\n");
  else
    geom::save_obj(m, out);
}

json mesh_summary(const geom::LabeledMesh& m) {
  return {{"vertices", m.vertex_count()}, {"faces", m.face_count()}, {"parts", m.parts}};
}

fs::path dataset_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GEOCODE_DATA"); env && *env) return env;
  throw RequestError(ErrorCode::bad_request, "no dataset: pass --dataset or set GEOCODE_DATA");
}

service::HttpServer* active_server = nullptr;

void on_signal(int) {
  if (active_server) active_server->stop();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Procedural shape programs: evaluate, generate datasets, measure and fit."};
  app.require_subcommand(1);
  std::function<void()> action;

  // programs / schema ---------------------------------------------------------
  auto* list_cmd = app.add_subcommand("programs", "List program ids");
  list_cmd->callback([&] { action = [&] { out << json(programs::program_ids()).dump() << "\n"; }; });

  std::string schema_program;
  auto* schema_cmd = app.add_subcommand("schema", "Print a program's parameter schema");
  schema_cmd->add_option("program", schema_program, "Program id")->required();
  schema_cmd->callback([&] {
    action = [&] { out << params::schema_to_json(*programs::get_program(schema_program).schema).dump(2) << "\n"; };
  });

  // eval ----------------------------------------------------------------------
  std::string eval_program, eval_params, eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a program into an OBJ (or mesh JSON) file");
  eval_cmd->add_option("--program", eval_program, "Program id")->required();
  eval_cmd->add_option("--params", eval_params, "JSON map of raw parameter values (missing ones take defaults)");
  eval_cmd->add_option("--out", eval_out, "Output .obj or .json")->required();
  eval_cmd->callback([&] {
    action = [&] {
      const auto& p = programs::get_program(eval_program);
      const auto v = load_params(p, eval_params);
      const auto mesh = p.graph.evaluate(v);
      write_mesh(mesh, eval_out);
      out << json{{"params", params::to_json(v, *p.schema)}, {"mesh", mesh_summary(mesh)}}.dump() << "\n";
    };
  });

  // generate ------------------------------------------------------------------
  std::string gen_recipe, gen_out;
  unsigned gen_workers = 0;
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::size_t> gen_limit;
  bool gen_quiet = false;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a dataset from a recipe");
  gen_cmd->add_option("--recipe", gen_recipe, "Recipe JSON file")->required();
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();
  gen_cmd->add_option("--workers", gen_workers, "Worker threads (0 = hardware concurrency)");
  gen_cmd->add_option("--seed", gen_seed, "Override the recipe seed");
  gen_cmd->add_option("--limit", gen_limit, "Only the first N sweep vectors");
  gen_cmd->add_flag("--quiet", gen_quiet, "No progress output");
  gen_cmd->callback([&] {
    action = [&] {
      const auto recipe = params::load_recipe(geom::read_file(gen_recipe), [](std::string_view id) -> const auto& {
        return *programs::get_program(id).schema;
      });
      dataset::GenerateOptions opts;
      opts.workers = gen_workers;
      opts.seed = gen_seed;
      opts.limit = gen_limit;
      if (!gen_quiet)
        opts.progress = [&](std::size_t done, std::size_t total) {
          if (done % 50 == 0 || done == total) err << fmt::format("generated {}/{}\n", done, total) << std::flush;
        };
      const auto r = dataset::generate(recipe, gen_out, opts);
      out << json{{"entries", r.manifest.entries.size()},
                  {"failures", r.manifest.failures.size()},
                  {"written", r.written},
                  {"skipped", r.skipped}}
                 .dump()
          << "\n";
    };
  });

  // sample --------------------------------------------------------------------
  std::string sample_obj, sample_out;
  std::size_t sample_n = 2048;
  bool sample_training = false;
  std::uint64_t sample_seed = 0;
  double sample_noise = 0.0;
  auto* sample_cmd = app.add_subcommand("sample", "Sample a point cloud (.pcxyz) from an OBJ");
  sample_cmd->add_option("obj", sample_obj, "Input OBJ")->required();
  sample_cmd->add_option("--out", sample_out, "Output .pcxyz")->required();
  sample_cmd->add_option("--n", sample_n, "Area-uniform sample count");
  sample_cmd->add_flag("--training", sample_training, "FPS-1500 plus 800 random points instead of --n samples");
  sample_cmd->add_option("--seed", sample_seed, "Sampling seed");
  sample_cmd->add_option("--noise", sample_noise, "Gaussian noise sigma as a fraction of the bounding-box diagonal");
  sample_cmd->callback([&] {
    action = [&] {
      const auto mesh = geom::load_obj(sample_obj);
      auto cloud = sample_training ? pc::make_training_cloud(mesh, sample_seed)
                                   : pc::surface_sample(mesh, sample_n, sample_seed);
      if (sample_noise > 0.0)
        cloud = pc::add_gaussian_noise(cloud, sample_noise * pc::extent(cloud), derive_seed({sample_seed, 0x6e6f}));
      pc::save_pcxyz(cloud, sample_out);
      out << json{{"points", cloud.size()}}.dump() << "\n";
    };
  });

  // fit -----------------------------------------------------------------------
  std::string fit_pc, fit_dataset, fit_program, fit_out;
  std::size_t fit_budget = 500;
  std::uint64_t fit_seed = fit::kObjectiveSeed;
  double fit_noise = 0.0;
  auto* fit_cmd = app.add_subcommand("fit", "Recover a parameter vector from a point cloud");
  fit_cmd->add_option("--pc", fit_pc, "Input .pcxyz")->required();
  fit_cmd->add_option("--dataset", fit_dataset, "Dataset directory (default $GEOCODE_DATA)");
  fit_cmd->add_option("--program", fit_program, "Expected program id of the dataset");
  fit_cmd->add_option("--budget", fit_budget, "Refinement evaluation budget");
  fit_cmd->add_option("--seed", fit_seed, "Objective sampling seed");
  fit_cmd->add_option("--noise", fit_noise, "Gaussian noise added to the input, fraction of its diagonal");
  fit_cmd->add_option("--out", fit_out, "Write the reconstruction (.obj or .json)");
  fit_cmd->callback([&] {
    action = [&] {
      const auto dir = dataset_dir(fit_dataset);
      const auto manifest = dataset::load_manifest(dir);
      if (!fit_program.empty() && fit_program != manifest.program) {
        programs::get_program(fit_program);
        throw RequestError(ErrorCode::invalid_params,
                           fmt::format("dataset holds '{}', not '{}'", manifest.program, fit_program),
                           {{"parameter", "program"}});
      }
      fit::IndexOptions iopts;
      iopts.seed = fit_seed;
      const auto index = fit::build_index(manifest, dir, iopts);
      auto cloud = pc::load_pcxyz(fit_pc);
      if (fit_noise > 0.0)
        cloud = pc::add_gaussian_noise(cloud, fit_noise * pc::extent(cloud), derive_seed({fit_seed, 0x6e6f}));
      fit::RefineOptions ropts;
      ropts.budget = fit_budget;
      ropts.seed = fit_seed;
      const auto r = fit::fit(cloud, index, ropts);
      const auto& program = programs::get_program(index.program);
      if (!fit_out.empty()) write_mesh(program.graph.evaluate(r.params), fit_out);
      json candidates = json::array();
      for (const auto& c : r.candidates)
        candidates.push_back({{"id", index.entries[c.entry].id}, {"distance", c.distance}});
      out << json{{"program", index.program},
                  {"params", params::to_json(r.params, *program.schema)},
                  {"objective", r.objective},
                  {"floor", index.floor},
                  {"low_confidence", r.low_confidence},
                  {"evaluations", r.evaluations},
                  {"candidates", std::move(candidates)}}
                 .dump(2)
          << "\n";
    };
  });

  // chamfer / stability -------------------------------------------------------
  std::string ch_a, ch_b;
  std::size_t ch_n = metrics::kMeshChamferSamples;
  std::uint64_t ch_seed = 0;
  auto* ch_cmd = app.add_subcommand("chamfer", "Chamfer distance between two OBJ meshes");
  ch_cmd->add_option("a", ch_a, "First OBJ")->required();
  ch_cmd->add_option("b", ch_b, "Second OBJ")->required();
  ch_cmd->add_option("--n", ch_n, "Samples per mesh");
  ch_cmd->add_option("--seed", ch_seed, "Sampling seed");
  ch_cmd->callback([&] {
    action = [&] {
      const double d = metrics::mesh_chamfer(geom::load_obj(ch_a), geom::load_obj(ch_b), ch_n, ch_seed);
      out << json{{"chamfer", d}, {"n", ch_n}, {"seed", ch_seed}}.dump() << "\n";
    };
  });

  std::string st_obj;
  auto* st_cmd = app.add_subcommand("stability", "Structural stability report of an OBJ mesh");
  st_cmd->add_option("obj", st_obj, "Input OBJ")->required();
  st_cmd->callback([&] {
    action = [&] { out << metrics::to_json(metrics::stability(geom::load_obj(st_obj))).dump(2) << "\n"; };
  });

  // interpolate / mix ---------------------------------------------------------
  std::string ip_program, ip_a, ip_b, ip_out;
  double ip_alpha = 0.5;
  auto* ip_cmd = app.add_subcommand("interpolate", "Interpolate two parameter vectors");
  ip_cmd->add_option("--program", ip_program, "Program id")->required();
  ip_cmd->add_option("--a", ip_a, "Parameter JSON at alpha 0")->required();
  ip_cmd->add_option("--b", ip_b, "Parameter JSON at alpha 1")->required();
  ip_cmd->add_option("--alpha", ip_alpha, "Blend factor in [0, 1]")->required();
  ip_cmd->add_option("--out", ip_out, "Write the mesh (.obj or .json)");
  ip_cmd->callback([&] {
    action = [&] {
      const auto& p = programs::get_program(ip_program);
      const auto v = params::interpolate(load_params(p, ip_a), load_params(p, ip_b), ip_alpha, *p.schema);
      if (!ip_out.empty()) write_mesh(p.graph.evaluate(v), ip_out);
      out << params::to_json(v, *p.schema).dump(2) << "\n";
    };
  });

  std::string mx_program, mx_source, mx_donor, mx_out;
  std::vector<std::string> mx_select;
  auto* mx_cmd = app.add_subcommand("mix", "Copy selected parameters from a donor vector");
  mx_cmd->add_option("--program", mx_program, "Program id")->required();
  mx_cmd->add_option("--source", mx_source, "Source parameter JSON")->required();
  mx_cmd->add_option("--donor", mx_donor, "Donor parameter JSON")->required();
  mx_cmd->add_option("--select", mx_select, "Parameter names taken from the donor")->required()->delimiter(',');
  mx_cmd->add_option("--out", mx_out, "Write the mesh (.obj or .json)");
  mx_cmd->callback([&] {
    action = [&] {
      const auto& p = programs::get_program(mx_program);
      const auto v = params::mix(load_params(p, mx_source), load_params(p, mx_donor), mx_select, *p.schema);
      if (!mx_out.empty()) write_mesh(p.graph.evaluate(v), mx_out);
      out << params::to_json(v, *p.schema).dump(2) << "\n";
    };
  });

  // serve ---------------------------------------------------------------------
  std::string sv_dataset, sv_host = "127.0.0.1";
  int sv_port = 8080;
  auto* sv_cmd = app.add_subcommand("serve", "Run the JSON-over-HTTP service");
  sv_cmd->add_option("--dataset", sv_dataset, "Dataset directory enabling /fit (default $GEOCODE_DATA if set)");
  sv_cmd->add_option("--host", sv_host, "Bind address");
  sv_cmd->add_option("--port", sv_port, "Port (0 = any free port)");
  sv_cmd->callback([&] {
    action = [&] {
      std::string dir = sv_dataset;
      if (dir.empty())
        if (const char* env = std::getenv("GEOCODE_DATA"); env && *env) dir = env;
      const auto svc = dir.empty() ? service::Service() : service::Service(dir);
      service::HttpServer server(svc);
      const int port = server.bind(sv_host, sv_port);
      err << fmt::format("listening on http://{}:{}{}\n", sv_host, port, svc.has_index() ? " (fit enabled)" : "")
          << std::flush;
      active_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      active_server = nullptr;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    const api::ApiError error{ErrorCode::bad_request, e.what(), nullptr};
    err << error.to_json().dump() << "\n";
    return api::exit_code(error.code);
  }

  try {
    action();
    return 0;
  } catch (...) {
    const auto error = api::from_current_exception();
    err << error.to_json().dump() << "\n";
    return api::exit_code(error.code);
  }
}

}  // namespace geocode::cli
