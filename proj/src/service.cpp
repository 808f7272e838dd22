#include "rekom/service.hpp"

#include <sstream>

#include <httplib.h>
#include <json.hpp>
#include <sys/socket.h>

#include "rekom/error.hpp"
#include "rekom/format.hpp"
#include "rekom/recommend.hpp"

namespace rekom {

using nlohmann::json;

namespace {

json row_json(const RecommendationRow& r) {
  return {{"source", r.source},
          {"destination", r.destination},
          {"probability", r.probability},
          {"dest_asset_type", r.dest_asset_type.name},
          {"dest_degree", r.dest_degree},
          {"dest_centrality", r.dest_centrality},
          {"dest_community", r.dest_community},
          {"same_community", r.same_community},
          {"hop_distance", r.hop_distance},
          {"existing_edge", r.existing_edge}};
}

json annotation_json(const Annotation& a) {
  return {{"source", a.source},   {"destination", a.destination},     {"stars", a.stars},
          {"note", a.note},       {"model_version", a.model_version}, {"updated_at", a.updated_at}};
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, {{"error", message}}, status);
}

template <typename T>
T query_number(const httplib::Request& req, const char* name, T fallback) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  auto value = parse_number<T>(text);
  if (!value) throw ValidationError(std::string("query parameter `") + name + "` is not an integer: " + text);
  return *value;
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, ',')) {
    if (!current.empty()) out.push_back(current);
  }
  return out;
}

}  // namespace

struct RecommendationService::Impl {
  std::shared_ptr<const Artifacts> artifacts;
  std::shared_ptr<AnnotationStore> store;
  ServiceOptions options;
  httplib::Server server;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> projection_index;

  template <typename Handler>
  httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const NotFound& e) {
        send_error(res, 404, e.what());
      } catch (const ValidationError& e) {
        send_error(res, 400, e.what());
      } catch (const DataError& e) {
        send_error(res, 400, e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, std::string("invalid JSON: ") + e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  }

  void routes() {
    const auto& a = *artifacts;
    for (std::size_t i = 0; i < a.projection.ids.size(); ++i) projection_index.emplace(a.projection.ids[i], i);

    server.Get("/api/meta", guarded([this](const httplib::Request&, httplib::Response& res) {
      const auto& g = artifacts->graph;
      json types = json::array();
      for (const auto& t : g.asset_types().types()) types.push_back(t.name);
      send_json(res, {{"asset_types", types},
                      {"feature_names", {"degree", "centrality", "community", "hop_distance"}},
                      {"model_version", artifacts->model_version},
                      {"N", artifacts->embedding.rows()},
                      {"M", artifacts->embedding.dims()}});
    }));

    server.Get(R"(/api/nodes/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto& node = get_node(artifacts->graph, req.matches[1].str());
      json meta = json::object();
      for (const auto& [k, v] : node.meta) meta[k] = v;
      send_json(res, {{"id", node.id}, {"asset_type", node.asset_type.name}, {"label", node.label}, {"meta", meta}});
    }));

    server.Get(R"(/api/nodes/([^/]+)/recommendations)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 SampleSpec spec;
                 spec.bins = query_number<int>(req, "bins", spec.bins);
                 spec.per_bin = query_number<int>(req, "per_bin", spec.per_bin);
                 spec.seed = query_number<std::uint64_t>(req, "seed", spec.seed);
                 spec.validate();
                 const auto source = req.matches[1].str();
                 const auto& a = *artifacts;
                 const auto rows = build_recommendations(a.graph, a.features, a.embedding, source);
                 const auto sample = stratified_sample(rows, spec);
                 json out_rows = json::array();
                 for (const auto& r : sample) out_rows.push_back(row_json(r));
                 send_json(res, {{"source", source}, {"sample_seed", spec.seed}, {"rows", std::move(out_rows)}});
               }));

    server.Get("/api/projection", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto& a = *artifacts;
      json out = json::array();
      auto emit = [&](std::size_t i) {
        const auto& id = a.projection.ids[i];
        out.push_back({{"id", id},
                       {"x", a.projection.coords[i][0]},
                       {"y", a.projection.coords[i][1]},
                       {"asset_type", get_node(a.graph, id).asset_type.name}});
      };
      const auto ids = req.has_param("ids") ? split_ids(req.get_param_value("ids")) : std::vector<std::string>{};
      if (ids.empty()) {
        for (std::size_t i = 0; i < a.projection.ids.size(); ++i) emit(i);
      } else {
        for (const auto& id : ids) {
          auto it = projection_index.find(id);
          if (it == projection_index.end()) throw NotFound("unknown node id: " + id);
          emit(it->second);
        }
      }
      send_json(res, out);
    }));

    server.Post("/api/annotations", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      if (!body.is_object()) throw ValidationError("annotation body must be a JSON object");
      Annotation a;
      a.source = body.at("source").get<std::string>();
      a.destination = body.at("destination").get<std::string>();
      a.stars = body.at("stars").get<int>();
      a.note = body.value("note", "");
      a.model_version = body.value("model_version", artifacts->model_version);
      artifacts->graph.index_of(a.source);
      artifacts->graph.index_of(a.destination);
      send_json(res, annotation_json(store->annotate(std::move(a))));
    }));

    server.Get("/api/annotations", guarded([this](const httplib::Request& req, httplib::Response& res) {
      json out = json::array();
      for (const auto& a : store->list(req.get_param_value("source"))) out.push_back(annotation_json(a));
      send_json(res, out);
    }));

    server.Get("/api/annotations/export", guarded([this](const httplib::Request&, httplib::Response& res) {
      std::ostringstream out;
      store->export_csv(out);
      res.set_header("Content-Disposition", "attachment; filename=\"annotations.csv\"");
      res.set_content(out.str(), "text/csv; charset=utf-8");
    }));

    server.Post("/api/annotations/import", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::istringstream in(req.body);
      const auto report = store->import_csv(in);
      json rejected = json::array();
      for (const auto& r : report.rejected) rejected.push_back({{"line", r.line}, {"reason", r.reason}});
      send_json(res, {{"imported", report.imported}, {"rejected", rejected}});
    }));

    if (!options.ui_dir.empty() && std::filesystem::is_directory(options.ui_dir)) {
      server.set_mount_point("/", options.ui_dir.string());
    }
  }
};

RecommendationService::RecommendationService(std::shared_ptr<const Artifacts> artifacts,
                                             std::shared_ptr<AnnotationStore> store, ServiceOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->artifacts = std::move(artifacts);
  impl_->store = std::move(store);
  impl_->options = std::move(options);
  // Exclusive bind so a second server on a busy port fails instead of sharing it.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  impl_->routes();
}

RecommendationService::~RecommendationService() { stop(); }

int RecommendationService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind any port on " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port) + " (address already in use?)");
  }
  return port;
}

void RecommendationService::serve() { impl_->server.listen_after_bind(); }
void RecommendationService::stop() {
  if (impl_) impl_->server.stop();
}
bool RecommendationService::running() const { return impl_->server.is_running(); }
void RecommendationService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace rekom
