#include "loraflood/api_server.hpp"

#include <thread>

#include "httplib.h"

#include "loraflood/error.hpp"

namespace loraflood {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

DeviceId path_id(const httplib::Request& req, std::size_t index) {
  const std::string& text = req.matches[index];
  try {
    const unsigned long value = std::stoul(text);
    if (value > 0xffffffffUL) throw std::out_of_range("id");
    return static_cast<DeviceId>(value);
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "bad device id '" + text + "'");
  }
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("body is not valid JSON: ") + e.what());
  }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    }
  };
}

}  // namespace

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::NotFound: return 404;
    case Errc::DuplicateDeviceId: return 409;
    case Errc::GatewayDown: return 503;
    case Errc::IoFailure: return 500;
    default: return 400;
  }
}

struct ApiServer::Impl {
  ControlService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(ControlService& s) : service(s) { routes(); }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server.Get("/devices", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, service.list_devices());
    }));
    server.Post("/devices", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 201, service.register_device(parse_body(req)));
    }));
    server.Get(R"(/devices/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, service.get_device(path_id(req, 1)));
    }));
    server.Put(R"(/devices/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, service.update_device(path_id(req, 1), parse_body(req)));
    }));
    server.Delete(R"(/devices/(\d+))",
                  guarded([this](const httplib::Request& req, httplib::Response& res) {
                    service.delete_device(path_id(req, 1));
                    res.status = 204;
                  }));

    server.Post("/actions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, service.dispatch(parse_body(req)));
    }));

    server.Get("/metrics", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, report_to_json(service.metrics()));
    }));
    server.Get("/topology", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, service.topology());
    }));
    server.Put(R"(/links/(\d+)/(\d+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200,
                           service.set_link(path_id(req, 1), path_id(req, 2), parse_body(req)));
               }));

    server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
      EventHub& hub = service.events();
      std::uint64_t since = hub.latest_seq();
      if (req.has_param("since")) {
        try {
          since = std::stoull(req.get_param_value("since"));
        } catch (const std::exception&) {
          send_error(res, 400, "InvalidArgument", "since must be an integer");
          return;
        }
      }
      auto cursor = std::make_shared<std::uint64_t>(since);
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [&hub, cursor](std::size_t, httplib::DataSink& sink) {
            if (!sink.is_writable()) return false;
            for (const ServiceEvent& e : hub.wait_since(*cursor, std::chrono::milliseconds(200))) {
              const std::string chunk = "id: " + std::to_string(e.seq) + "\nevent: " +
                                        e.body.value("type", std::string("message")) +
                                        "\ndata: " + e.body.dump() + "\n\n";
              if (!sink.write(chunk.data(), chunk.size())) return false;
              *cursor = e.seq;
            }
            if (hub.closed()) {
              sink.done();
              return false;
            }
            return true;
          });
    });
  }
};

ApiServer::ApiServer(ControlService& service) : impl_(std::make_unique<Impl>(service)) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else {
    port_ = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  return port_;
}

bool ApiServer::listen() { return impl_->server.listen_after_bind(); }

void ApiServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->service.events().close();
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace loraflood
