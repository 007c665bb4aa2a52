#pragma once

#include <memory>
#include <string>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/service/decision_service.hpp"

namespace glucoscope::service {

// HTTP/JSON front end for DecisionService.
//
//   GET  /diary?focal=YYYY-MM-DD   bifocal geometry document
//   GET  /day/YYYY-MM-DD           focal-day detail
//   POST /events                   append a diary event
//   POST /explore                  what-if prediction + recommended dose
//   POST /explore/commit           record the explored meal (and dose)
//   GET  /stats?period=&at=        period statistics
//   GET  /advice                   advice items
//   GET  /settings, PUT /settings  patient settings
//   GET  /meals, POST /meals       meal library
//   GET  /cgm/latest               latest CGM reading
//
// Errors come back as {"error": code, "detail": text} with 400 for invalid
// input, 409 for out-of-order events, 503 for stale CGM data.
class HttpApi {
 public:
  explicit HttpApi(DecisionService& service);
  ~HttpApi();

  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Blocking; returns when stop() is called or binding fails.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status(ErrorCode code) noexcept;

}  // namespace glucoscope::service
