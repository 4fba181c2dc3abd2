#include <httplib.h>

#include "sia/review/service.hpp"

namespace sia::review {

struct ReviewServer::Impl {
  ReviewService& service;
  httplib::Server http;
};

namespace {

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

}  // namespace

ReviewServer::ReviewServer(ReviewService& service) : impl_(new Impl{service, {}}) {
  auto& http = impl_->http;
  auto& svc = impl_->service;
  http.Get("/api/v1/sessions", [&svc](const httplib::Request&, httplib::Response& res) {
    reply(res, svc.list_sessions());
  });
  http.Get(R"(/api/v1/sessions/([^/]+)/timeline)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.timeline(req.matches[1]));
  });
  http.Get(R"(/api/v1/sessions/([^/]+)/metrics)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.metrics(req.matches[1]));
  });
  http.Get(R"(/api/v1/sessions/([^/]+)/highlights/([^/]+)/frames)",
           [&svc](const httplib::Request& req, httplib::Response& res) {
             reply(res, svc.highlight_frames(req.matches[1], req.matches[2]));
           });
  http.Post(R"(/api/v1/sessions/([^/]+)/annotations)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.post_annotation(req.matches[1], req.body));
  });
  http.Get(R"(/api/v1/subjects/([^/]+)/progress)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.progress(req.matches[1]));
  });
  http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      reply(res, ReviewService::not_found("route " + req.path));
    } else {
      res.set_content(canonical_json(Json{{"schema_version", kSchemaVersion},
                                          {"error", {{"code", "http"}, {"message", httplib::status_message(res.status)}}}}),
                      "application/json");
    }
  });
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(canonical_json(Json{{"schema_version", kSchemaVersion},
                                        {"error", {{"code", "internal"}, {"message", what}}}}),
                    "application/json");
  });
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind(const std::string& address, int port) {
  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(address);
    if (bound < 0) throw Error("review: cannot bind " + address);
    return bound;
  }
  if (!impl_->http.bind_to_port(address, port)) {
    throw Error("review: cannot bind " + address + ":" + std::to_string(port));
  }
  return port;
}

void ReviewServer::listen() { impl_->http.listen_after_bind(); }

void ReviewServer::stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace sia::review
