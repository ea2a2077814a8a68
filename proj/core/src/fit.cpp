#include "geocode/fit.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "geocode/error.hpp"

namespace geocode::fit {

using params::ParameterVector;
using params::ParamKind;

std::vector<geom::Vec3> signature(const pc::PointCloud& cloud) {
  const std::size_t k = std::min(kSignaturePoints, cloud.size());
  return pc::fps_cloud(cloud, k, 0).points;
}

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Grid neighbours of parameter i, canonicalized, without the current vector.
std::vector<ParameterVector> neighbours(const ParameterVector& v, std::size_t i,
                                        const params::ParameterSchema& schema) {
  const auto& spec = schema.spec(i);
  const auto& value = v.values[i];
  std::vector<params::ParamValue> moves;
  switch (spec.kind) {
    case ParamKind::boolean:
      moves.emplace_back(!std::get<bool>(value));
      break;
    case ParamKind::discrete: {
      const auto x = std::get<std::int64_t>(value);
      if (x - 1 >= spec.lo) moves.emplace_back(x - 1);
      if (x + 1 <= spec.hi) moves.emplace_back(x + 1);
      break;
    }
    case ParamKind::continuous: {
      const double x = std::get<double>(value);
      const int last = spec.granularity - 1;
      const int k = static_cast<int>(std::lround((x - spec.min) / (spec.max - spec.min) * last));
      if (k - 1 >= 0) moves.emplace_back(params::grid_value(spec, std::min(k - 1, last)));
      if (k + 1 <= last) moves.emplace_back(params::grid_value(spec, std::max(k + 1, 0)));
      break;
    }
  }
  std::vector<ParameterVector> out;
  const auto here = params::canonical_key(v);
  for (auto& m : moves) {
    ParameterVector c = v;
    c.values[i] = std::move(m);
    c = params::canonicalize(c, schema);
    if (params::canonical_key(c) != here) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

Objective::Objective(const programs::Program& program, const pc::PointCloud& target, std::size_t samples,
                     std::uint64_t seed)
    : program_(program), target_(target.points), samples_(samples), seed_(seed) {}

bool Objective::cached(const ParameterVector& v) const { return memo_.count(params::canonical_key(v)) != 0; }

double Objective::operator()(const ParameterVector& v) {
  const auto key = params::canonical_key(v);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  ++evaluations_;
  const auto mesh = program_.graph.evaluate(v);
  const metrics::CloudIndex sample(pc::surface_sample(mesh, samples_, seed_).points);
  const double value = metrics::chamfer(sample, target_);
  memo_.emplace(key, value);
  return value;
}

FitIndex build_index(const dataset::DatasetManifest& manifest, const std::filesystem::path& dir,
                     const IndexOptions& opts) {
  if (manifest.entries.empty()) throw ValidationError("manifest", "dataset has no samples");
  const auto& program = programs::get_program(manifest.program);
  FitIndex index;
  index.program = manifest.program;
  index.entries.reserve(manifest.entries.size());
  std::vector<pc::PointCloud> floor_clouds;
  const std::size_t n = manifest.entries.size();
  const std::size_t members = std::min(opts.floor_members, n);
  std::vector<std::size_t> floor_ids;
  for (std::size_t j = 0; j < members; ++j) floor_ids.push_back(j * n / members);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = manifest.entries[i];
    auto cloud = pc::load_pcxyz(dir / e.pc_fps);
    index.entries.push_back({e.id, e.params, std::make_shared<const metrics::CloudIndex>(signature(cloud))});
    if (std::binary_search(floor_ids.begin(), floor_ids.end(), i)) floor_clouds.push_back(std::move(cloud));
  }

  std::vector<double> floors;
  for (std::size_t j = 0; j < floor_ids.size(); ++j) {
    Objective objective(program, floor_clouds[j], opts.samples, opts.seed);
    floors.push_back(objective(index.entries[floor_ids[j]].params));
  }
  index.floor = median(std::move(floors));
  return index;
}

std::vector<Match> retrieve(const pc::PointCloud& cloud, const FitIndex& index, std::size_t k) {
  if (index.entries.empty()) throw ValidationError("index", "index is empty");
  if (k < 1 || k > index.entries.size())
    throw ValidationError("k", fmt::format("k = {} outside [1, {}]", k, index.entries.size()));
  const metrics::CloudIndex query(signature(cloud));
  std::vector<Match> all;
  all.reserve(index.entries.size());
  for (std::size_t i = 0; i < index.entries.size(); ++i)
    all.push_back({i, metrics::chamfer(query, *index.entries[i].signature)});
  std::stable_sort(all.begin(), all.end(), [](const Match& a, const Match& b) { return a.distance < b.distance; });
  all.resize(k);
  return all;
}

namespace {

RefineResult descend(Objective& objective, const ParameterVector& start, const params::ParameterSchema& schema,
                     const RefineOptions& opts) {
  RefineResult r;
  r.params = start;
  r.objective = r.start_objective = objective(start);
  r.trace.push_back(r.objective);

  bool budget_left = true;
  bool improved = true;
  while (improved && budget_left) {
    improved = false;
    for (std::size_t i = 0; i < schema.size() && budget_left; ++i) {
      if (params::is_hidden(r.params.values[i])) continue;
      std::optional<ParameterVector> best;
      double best_value = r.objective - opts.tolerance;
      for (const auto& c : neighbours(r.params, i, schema)) {
        if (!objective.cached(c) && objective.evaluations() >= opts.budget) {
          budget_left = false;
          break;
        }
        double value = 0.0;
        try {
          value = objective(c);
        } catch (const std::exception& e) {
          r.failures.push_back(fmt::format("{}: {}", params::canonical_key(c), e.what()));
          continue;
        }
        if (value < best_value) {
          best_value = value;
          best = c;
        }
      }
      if (best) {
        r.params = std::move(*best);
        r.objective = best_value;
        r.trace.push_back(best_value);
        improved = true;
      }
    }
  }
  r.evaluations = objective.evaluations();
  return r;
}

}  // namespace

RefineResult refine(const pc::PointCloud& target, const ParameterVector& start, const programs::Program& program,
                    const RefineOptions& opts) {
  if (opts.budget == 0) throw ValidationError("budget", "budget must be at least 1");
  const auto& schema = *program.schema;
  params::validate(start, schema);
  if (!params::is_canonical(start, schema)) throw ValidationError("start", "start vector is not canonical");
  Objective objective(program, target, opts.samples, opts.seed);
  return descend(objective, start, schema, opts);
}

FitResult fit(const pc::PointCloud& target, const FitIndex& index, const RefineOptions& opts) {
  if (opts.budget == 0) throw ValidationError("budget", "budget must be at least 1");
  const auto& program = programs::get_program(index.program);
  FitResult out;
  out.candidates = retrieve(target, index, std::min(kRetrieveCount, index.entries.size()));

  // Pick the retrieved candidate with the lowest refinement objective.
  Objective objective(program, target, opts.samples, opts.seed);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : out.candidates) {
    double value = std::numeric_limits<double>::infinity();
    try {
      value = objective(index.entries[m.entry].params);
    } catch (const std::exception&) {
    }
    if (value < best) {
      best = value;
      out.start_entry = m.entry;
    }
  }
  if (!std::isfinite(best)) throw EvalError("fit", "no retrieved candidate could be evaluated");

  // The retrieval probes share the memo and count against the budget.
  const auto refined = descend(objective, index.entries[out.start_entry].params, *program.schema, opts);
  out.params = refined.params;
  out.objective = refined.objective;
  out.evaluations = refined.evaluations;
  out.low_confidence = out.objective > kLowConfidenceFactor * index.floor;
  return out;
}

}  // namespace geocode::fit
