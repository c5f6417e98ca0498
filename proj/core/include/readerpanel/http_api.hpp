#pragma once

#include <map>
#include <memory>
#include <string>

#include "readerpanel/review.hpp"
#include "readerpanel/store.hpp"

namespace readerpanel {

/// Read-only projection of a tournament: rounds with results joined in,
/// per-persona scores, per-segment score breakdowns, standings, revisit
/// flags, gate decision and review items.
json tournament_view(const TournamentState& state);

/// Mean member score per demographic segment for one concept in one match.
/// Readers are grouped by age group and by reading level; experts form a
/// single "publisher" segment.
json segment_breakdown(const TournamentState& state, const AggregateScore& aggregate);

/// HTTP status for an error kind: lookup 404, state/concurrency 409,
/// input/schema/parse/range 400, everything else 500.
int http_status_for(ErrorKind kind);

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  /// Value of the X-Operator header, if any.
  std::string operator_header;
};

struct ApiResponse {
  int status = 200;
  json body;
};

/// The /v1 API:
///
///   GET  /v1/tournaments[?imprint=x]      {"tournaments": [summary...]}
///   GET  /v1/tournaments/{id}             tournament_view
///   GET  /v1/review[?tournament=id]       {"items": [pending item + detail...]}, newest first
///   POST /v1/review/{id}/decision         body {"decision": "accept"|"reject", "operator": "..."}
///
/// Errors come back as {"error": {"kind": ..., "message": ...}}.
class ApiServer {
 public:
  explicit ApiServer(EventStore& store);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Routes one request without any socket involved.
  ApiResponse handle(const ApiRequest& request);

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. bind() first.
  void serve();
  void stop();

 private:
  struct Impl;
  EventStore& store_;
  ReviewService review_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace readerpanel
