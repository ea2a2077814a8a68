#include "service.hpp"

#include <regex>
#include <set>

#include <httplib.h>

#include "api.hpp"
#include "geocode/error.hpp"
#include "geocode/obj_io.hpp"
#include "geocode/stability.hpp"

namespace geocode::service {

using api::ErrorCode;
using api::RequestError;
using nlohmann::json;

namespace {

Response json_response(const json& body, int status = 200) { return {status, "application/json", body.dump()}; }

Response error_response(const api::ApiError& e) { return json_response(e.to_json(), api::http_status(e.code)); }

json parse_body(const Request& req, std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional = {}) {
  json doc;
  try {
    doc = json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw RequestError(ErrorCode::bad_request, std::string("body is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw RequestError(ErrorCode::bad_request, "body must be a JSON object");
  std::set<std::string_view> allowed(required);
  allowed.insert(optional.begin(), optional.end());
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!allowed.count(it.key()))
      throw RequestError(ErrorCode::invalid_params, "unexpected key '" + it.key() + "'", {{"key", it.key()}});
  for (auto key : required)
    if (!doc.contains(key))
      throw RequestError(ErrorCode::invalid_params, "missing key '" + std::string(key) + "'",
                         {{"key", std::string(key)}});
  return doc;
}

params::ParameterVector read_params(const json& doc, const params::ParameterSchema& schema) {
  return params::canonicalize(params::vector_from_json(doc, schema, true), schema);
}

Response mesh_response(const Request& req, const programs::Program& program, const params::ParameterVector& v,
                       bool with_params) {
  const auto mesh = program.graph.evaluate(v);
  if (req.accept.find("text/plain") != std::string::npos) return {200, "text/plain", geom::write_obj(mesh)};
  json body = api::mesh_to_json(mesh);
  if (with_params) body = {{"params", params::to_json(v, *program.schema)}, {"mesh", std::move(body)}};
  return json_response(body);
}

std::uint64_t query_u64(const Request& req, const std::string& key, std::uint64_t fallback) {
  auto it = req.query.find(key);
  if (it == req.query.end()) return fallback;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw RequestError(ErrorCode::invalid_params, "query '" + key + "' must be a non-negative integer", {{"key", key}});
}

}  // namespace

Service::Service(const std::filesystem::path& dataset) {
  const auto manifest = dataset::load_manifest(dataset);
  index_ = std::make_shared<const fit::FitIndex>(fit::build_index(manifest, dataset));
}

Response Service::handle(const Request& req) const {
  static const std::regex program_route(R"(^/programs/([^/]+)/(schema|evaluate|interpolate|mix|fit|metrics/stability)$)");
  try {
    if (req.path == "/programs") {
      if (req.method != "GET") throw RequestError(ErrorCode::not_found, "use GET /programs");
      return json_response({{"programs", programs::program_ids()}});
    }
    std::smatch m;
    if (!std::regex_match(req.path, m, program_route))
      throw RequestError(ErrorCode::not_found, "no route for " + req.path);
    const auto& program = programs::get_program(m[1].str());
    const auto& schema = *program.schema;
    const std::string action = m[2].str();
    const bool get = action == "schema";
    if ((req.method == "GET") != get)
      throw RequestError(ErrorCode::not_found, "use " + std::string(get ? "GET " : "POST ") + req.path);

    if (action == "schema") return json_response(params::schema_to_json(schema));

    if (action == "evaluate") {
      const auto doc = parse_body(req, {"params"});
      return mesh_response(req, program, read_params(doc["params"], schema), false);
    }
    if (action == "interpolate") {
      const auto doc = parse_body(req, {"a", "b", "alpha"});
      if (!doc["alpha"].is_number())
        throw RequestError(ErrorCode::invalid_params, "alpha must be a number", {{"key", "alpha"}});
      const auto v = params::interpolate(read_params(doc["a"], schema), read_params(doc["b"], schema),
                                         doc["alpha"].get<double>(), schema);
      return mesh_response(req, program, v, true);
    }
    if (action == "mix") {
      const auto doc = parse_body(req, {"source", "donor", "selection"});
      if (!doc["selection"].is_array())
        throw RequestError(ErrorCode::invalid_params, "selection must be an array of names", {{"key", "selection"}});
      std::vector<std::string> selection;
      for (const auto& s : doc["selection"]) {
        if (!s.is_string())
          throw RequestError(ErrorCode::invalid_params, "selection must be an array of names", {{"key", "selection"}});
        selection.push_back(s.get<std::string>());
      }
      const auto v =
          params::mix(read_params(doc["source"], schema), read_params(doc["donor"], schema), selection, schema);
      return mesh_response(req, program, v, true);
    }
    if (action == "metrics/stability") {
      const auto doc = parse_body(req, {"params"});
      const auto mesh = program.graph.evaluate(read_params(doc["params"], schema));
      return json_response(metrics::to_json(metrics::stability(mesh)));
    }
    // fit
    if (!index_ || index_->program != program.id)
      return json_response(api::ApiError{ErrorCode::not_found, "no dataset loaded for program '" + program.id + "'",
                                         {{"program", program.id}}}
                               .to_json(),
                           503);
    const auto cloud = pc::decode_pcxyz(req.body);
    fit::RefineOptions opts;
    opts.budget = query_u64(req, "budget", opts.budget);
    opts.seed = query_u64(req, "seed", opts.seed);
    const auto result = fit::fit(cloud, *index_, opts);
    return json_response({{"params", params::to_json(result.params, schema)},
                          {"objective", result.objective},
                          {"low_confidence", result.low_confidence},
                          {"evaluations", result.evaluations}});
  } catch (...) {
    return error_response(api::from_current_exception());
  }
}

struct HttpServer::Impl {
  const Service& service;
  httplib::Server server;

  explicit Impl(const Service& s) : service(s) {
    auto route = [this](const httplib::Request& hreq, httplib::Response& hres) {
      Request req;
      req.method = hreq.method;
      req.path = hreq.path;
      req.body = hreq.body;
      req.accept = hreq.get_header_value("Accept");
      for (const auto& [k, v] : hreq.params) req.query.emplace(k, v);
      const auto res = service.handle(req);
      hres.status = res.status;
      hres.set_content(res.body, res.content_type.c_str());
    };
    server.Get(".*", route);
    server.Post(".*", route);
  }
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host.c_str());
  } else if (!impl_->server.bind_to_port(host.c_str(), port)) {
    bound = -1;
  }
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace geocode::service
