#include "somchange/http_server.hpp"

#include "httplib.h"
#include "somchange/error.hpp"

namespace somchange {

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Data: return 400;
    case ErrorKind::DimensionMismatch: return 422;
    case ErrorKind::Numeric:
    case ErrorKind::Io: break;
  }
  return 500;
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  nlohmann::ordered_json j;
  j["error"] = message;
  res.set_content(j.dump() + "\n", "application/json");
}

void send_json(httplib::Response& res, const std::string& body, int status = 200) {
  res.status = status;
  res.set_content(body, "application/json");
}

nlohmann::json parse_body(const httplib::Request& req) {
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

double param_double(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const auto v = req.get_param_value(key);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') fail(ErrorKind::InvalidArgument, std::string("invalid query parameter ") + key);
  return d;
}

}  // namespace

struct ApiServer::Impl {
  ModelStore& store;
  ServiceConfig config;
  httplib::Server server;

  Impl(ModelStore& s, ServiceConfig c) : store(s), config(std::move(c)) { routes(); }

  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      send_error(res, status_for(e.kind()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, std::string("internal error: ") + e.what());
    }
  }

  std::shared_ptr<const ModelBundle> model(const std::string& id, httplib::Response& res) {
    auto b = store.get(id);
    if (!b) send_error(res, 404, "unknown model '" + id + "'");
    return b;
  }

  void routes() {
    server.Post("/models", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        if (!body.is_object() || !body.contains("csv") || !body.at("csv").is_string()) {
          fail(ErrorKind::InvalidArgument, "training request needs a 'csv' string");
        }
        const auto dataset = parse_csv(body.at("csv").get<std::string>(), schema_from_json(body));
        const auto spec = bundle_spec_from_json(body);
        std::string id;
        ModelBundle bundle;
        {
          std::lock_guard lock(store.training_mutex());
          bundle = train_bundle(dataset, spec);
          id = store.put(bundle);
        }
        send_json(res, model_info_json(bundle, id).dump(2) + "\n", 201);
      });
    });

    server.Get(R"(/models/([0-9A-Za-z]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto id = std::string(req.matches[1]);
        if (auto b = model(id, res)) send_json(res, model_info_json(*b, id).dump(2) + "\n");
      });
    });

    server.Post(R"(/models/([0-9A-Za-z]+)/pattern)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto b = model(std::string(req.matches[1]), res);
        if (!b) return;
        const auto body = parse_body(req);
        if (!body.is_object() || !body.contains("input")) fail(ErrorKind::InvalidArgument, "pattern request needs 'input'");
        const double percentile = body.contains("percentile") ? body.at("percentile").get<double>() : config.percentile;
        send_json(res, pattern_json(*b, input_spec_from_json(body.at("input")), percentile).dump(2) + "\n");
      });
    });

    server.Post(R"(/models/([0-9A-Za-z]+)/change)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto b = model(std::string(req.matches[1]), res);
        if (!b) return;
        const auto request = change_request_from_json(parse_body(req), config);
        send_json(res, change_summary_text(compute_change(*b, request).summary));
      });
    });

    server.Get(R"(/models/([0-9A-Za-z]+)/scene/([a-z]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto b = model(std::string(req.matches[1]), res);
        if (!b) return;
        const auto kind = scene_kind_from_string(std::string(req.matches[2]));
        ChangeRequest request;
        request.from.base_z = request.to.base_z = param_double(req, "base", 0.0);
        if (req.has_param("from")) request.from.settings = parse_setting_list(req.get_param_value("from"));
        if (req.has_param("to")) request.to.settings = parse_setting_list(req.get_param_value("to"));
        request.percentile = param_double(req, "percentile", config.percentile);
        request.alpha = param_double(req, "alpha", config.alpha);
        if (req.has_param("ks_scope")) request.ks_scope = parse_ks_scope(req.get_param_value("ks_scope"));
        const auto scene = scene_for(*b, kind, request);
        const auto accept = req.get_header_value("Accept");
        if (accept.find("image/svg+xml") != std::string::npos) {
          res.set_content(render_svg(scene), "image/svg+xml");
        } else {
          send_json(res, to_json(scene).dump() + "\n");
        }
      });
    });
  }
};

ApiServer::ApiServer(ModelStore& store, ServiceConfig config)
    : impl_(std::make_unique<Impl>(store, std::move(config))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool ApiServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

bool ApiServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace somchange
