#include "glucoscope/service/http_api.hpp"

#include <httplib.h>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/domain/serialization.hpp"
#include "glucoscope/domain/validation.hpp"

namespace glucoscope::service {
namespace {

using nlohmann::json;

void reply(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& detail) {
  reply(res, json{{"error", to_string(code)}, {"detail", detail}}, http_status(code));
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

// Maps library errors (and JSON shape errors) onto HTTP statuses.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      reply_error(res, e.code(), e.detail());
    } catch (const json::exception& e) {
      reply_error(res, ErrorCode::ParseError, e.what());
    } catch (const std::invalid_argument& e) {
      reply_error(res, ErrorCode::InvariantViolation, e.what());
    }
  };
}

std::optional<Date> date_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return parse_date(req.get_param_value(name));
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvariantViolation:
    case ErrorCode::ValidationFailure:
    case ErrorCode::ParseError:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::OutOfSpan:
      return 400;
    case ErrorCode::OutOfOrder: return 409;
    case ErrorCode::StaleData: return 503;
    case ErrorCode::NonFiniteState:
    case ErrorCode::StorageFailure:
      return 500;
  }
  return 500;
}

struct HttpApi::Impl {
  explicit Impl(DecisionService& s) : service(s) { routes(); }

  void routes() {
    server.Get("/diary", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.diary(date_param(req, "focal")));
    }));
    server.Get(R"(/day/(\d{4}-\d{2}-\d{2}))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 reply(res, service.day(parse_date(req.matches[1].str())));
               }));
    server.Post("/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto appended = service.append_event(decode<DiaryEvent>(parse_body(req)));
      reply(res, json{{"sequence", appended.sequence}, {"event", appended.event}}, 201);
    }));
    server.Post("/explore", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, service.explore(decode<ExploreRequest>(parse_body(req))));
    }));
    server.Post("/explore/commit",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  reply(res, service.commit_exploration(decode<CommitRequest>(parse_body(req))));
                }));
    server.Get("/stats", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto period = store::parse_period(
          req.has_param("period") ? req.get_param_value("period") : std::string("day"));
      reply(res, service.stats(period, date_param(req, "at")));
    }));
    server.Get("/advice", guarded([this](const httplib::Request&, httplib::Response& res) {
      reply(res, json{{"items", service.advice()}});
    }));
    server.Get("/settings", guarded([this](const httplib::Request&, httplib::Response& res) {
      reply(res, service.store().settings());
    }));
    server.Put("/settings", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto settings = decode<PatientSettings>(parse_body(req));
      service.store().put_settings(settings);
      reply(res, service.store().settings());
    }));
    server.Get("/meals", guarded([this](const httplib::Request&, httplib::Response& res) {
      reply(res, service.store().meals());
    }));
    server.Post("/meals", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto profile = decode<MealProfile>(parse_body(req));
      if (profile.created_at == Timestamp{}) profile.created_at = service.now();
      reply(res, service.store().put_meal(std::move(profile)), 201);
    }));
    server.Get("/cgm/latest", guarded([this](const httplib::Request&, httplib::Response& res) {
      if (auto latest = service.store().latest_reading()) {
        reply(res, *latest);
      } else {
        reply(res, json{{"error", "NotFound"}, {"detail", "no CGM readings"}}, 404);
      }
    }));
  }

  DecisionService& service;
  httplib::Server server;
};

HttpApi::HttpApi(DecisionService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpApi::~HttpApi() = default;

bool HttpApi::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpApi::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}
bool HttpApi::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }
void HttpApi::stop() { impl_->server.stop(); }

}  // namespace glucoscope::service
