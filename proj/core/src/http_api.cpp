#include "readerpanel/http_api.hpp"

#include <httplib.h>

#include <regex>

#include "readerpanel/serialize.hpp"

namespace readerpanel {

int http_status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::lookup: return 404;
    case ErrorKind::state:
    case ErrorKind::concurrency: return 409;
    case ErrorKind::input:
    case ErrorKind::schema:
    case ErrorKind::parse:
    case ErrorKind::range: return 400;
    default: return 500;
  }
}

json segment_breakdown(const TournamentState& state, const AggregateScore& aggregate) {
  std::map<std::string, std::pair<double, int>> by_age, by_level;
  std::pair<double, int> publishers{0.0, 0};
  for (const auto& m : aggregate.per_member_values) {
    const ReaderPersona* reader = nullptr;
    if (state.panel) {
      for (const auto& r : state.panel->members) {
        if (r.id == m.persona_id) reader = &r;
      }
    }
    if (!reader) {
      publishers.first += m.value;
      ++publishers.second;
      continue;
    }
    auto& a = by_age[std::string(enum_name(reader->age_group))];
    a.first += m.value;
    ++a.second;
    auto& l = by_level[std::string(enum_name(reader->reading_level))];
    l.first += m.value;
    ++l.second;
  }
  auto means = [](const std::map<std::string, std::pair<double, int>>& groups) {
    json out = json::object();
    for (const auto& [k, v] : groups) out[k] = {{"mean", v.first / v.second}, {"count", v.second}};
    return out;
  };
  json out = {{"age_group", means(by_age)}, {"reading_level", means(by_level)}};
  out["publisher"] = publishers.second
                         ? json{{"mean", publishers.first / publishers.second}, {"count", publishers.second}}
                         : json(nullptr);
  return out;
}

namespace {

json per_persona_scores(const TournamentState& state, const MatchResult& result, const std::string& concept_id) {
  json out = json::object();
  for (const auto& ref : result.evaluations) {
    if (ref.concept_id != concept_id || ref.pass != 0) continue;
    auto it = state.evaluations.find({result.match_id, 0, ref.persona_id, ref.concept_id});
    json entry = {{"status", ref.status}};
    if (it != state.evaluations.end() && it->second.evaluation) {
      const auto& e = *it->second.evaluation;
      json scores = json::object();
      for (const auto& [k, v] : e.criterion_scores) scores[k] = v;
      entry["criterion_scores"] = scores;
      entry["would_read"] = e.would_read;
      entry["fatal_flaw"] = e.fatal_flaw ? json(*e.fatal_flaw) : json(nullptr);
      entry["reasoning"] = e.reasoning;
    }
    out[ref.persona_id] = entry;
  }
  return out;
}

json rounds_view(const TournamentState& state, const std::vector<std::vector<Pairing>>& rounds) {
  json out = json::array();
  for (const auto& round : rounds) {
    json r = json::array();
    for (const auto& p : round) {
      json entry = p;
      const MatchResult* result = state.result_for(p.match_id);
      if (result) {
        json jr = *result;
        jr["scores"] = {{result->concept_a, per_persona_scores(state, *result, result->concept_a)},
                        {result->concept_b, per_persona_scores(state, *result, result->concept_b)}};
        jr["breakdown"] = {{result->concept_a, segment_breakdown(state, result->aggregate_a)},
                           {result->concept_b, segment_breakdown(state, result->aggregate_b)}};
        entry["result"] = jr;
        entry["status"] = "decided";
      } else if (p.bye) {
        entry["result"] = nullptr;
        entry["status"] = "bye";
      } else {
        entry["result"] = nullptr;
        entry["status"] = p.ready() ? "pending" : "waiting";
      }
      r.push_back(entry);
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace

json tournament_view(const TournamentState& state) {
  if (state.id.empty()) fail(ErrorKind::lookup, "tournament has no events");
  json view = {{"id", state.id},
               {"imprint", state.config.imprint},
               {"format", state.config.format},
               {"status", state.status},
               {"disposition", state.disposition},
               {"judge", state.judge},
               {"config", state.config},
               {"concepts", state.concepts},
               {"entrants", state.entrants},
               {"last_sequence", state.last_sequence}};
  view["panel"] = state.panel ? json(*state.panel) : json(nullptr);
  auto bracket = bracket_view(state);
  view["rounds"] = rounds_view(state, bracket.rounds);
  view["losers_bracket"] = bracket.losers_bracket ? rounds_view(state, *bracket.losers_bracket) : json(nullptr);
  json pending = json::array();
  for (const auto& p : open_pairings(state)) pending.push_back(p.match_id);
  view["pending_pairings"] = pending;
  view["match_count"] = state.results.size();
  if (state.result) {
    view["standings"] = state.result->final_ranking;
    view["champion"] = state.result->champion;
    view["revisit_flags"] = state.result->revisit_flags;
    view["gate_decision"] = state.result->gate_decision;
  } else {
    view["standings"] = nullptr;
    view["champion"] = nullptr;
    view["revisit_flags"] = json::array();
    view["gate_decision"] = nullptr;
  }
  view["review_items"] = state.review_items;
  return view;
}

struct ApiServer::Impl {
  httplib::Server server;
};

ApiServer::ApiServer(EventStore& store) : store_(store), review_(store), impl_(std::make_unique<Impl>()) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [k, v] : req.params) request.query[k] = v;
    request.body = req.body;
    request.operator_header = req.get_header_value("X-Operator");
    auto response = handle(request);
    res.status = response.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(response.body.dump(), "application/json");
  };
  impl_->server.Get(".*", route);
  impl_->server.Post(".*", route);
  impl_->server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Operator");
    res.status = 204;
  });
}

ApiServer::~ApiServer() { stop(); }

ApiResponse ApiServer::handle(const ApiRequest& request) {
  static const std::regex tournament_path(R"(^/v1/tournaments/([A-Za-z0-9._-]+)/?$)");
  static const std::regex decision_path(R"(^/v1/review/([A-Za-z0-9._-]+)/decision/?$)");
  auto error = [](int status, std::string_view kind, const std::string& message) {
    return ApiResponse{status, {{"error", {{"kind", kind}, {"message", message}}}}};
  };
  auto query = [&](const char* key) -> std::optional<std::string> {
    auto it = request.query.find(key);
    if (it == request.query.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };

  try {
    std::smatch m;
    if (request.method == "GET") {
      if (request.path == "/v1/tournaments" || request.path == "/v1/tournaments/") {
        json list = json::array();
        for (const auto& s : store_.list_tournaments(query("imprint"))) list.push_back(s);
        return {200, {{"tournaments", list}}};
      }
      if (std::regex_match(request.path, m, tournament_path)) {
        const std::string id = m[1];
        if (!store_.exists(id)) fail(ErrorKind::lookup, "unknown tournament '" + id + "'");
        return {200, tournament_view(store_.load_tournament(id))};
      }
      if (request.path == "/v1/review" || request.path == "/v1/review/") {
        json items = json::array();
        for (const auto& entry : review_.pending(query("tournament"))) items.push_back(to_json_value(entry));
        return {200, {{"items", items}}};
      }
      return error(404, "lookup", "no route for GET " + request.path);
    }
    if (request.method == "POST" && std::regex_match(request.path, m, decision_path)) {
      json body = json::parse(request.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) fail(ErrorKind::input, "body must be a JSON object");
      if (!body.contains("decision") || !body["decision"].is_string()) {
        fail(ErrorKind::input, "body needs \"decision\": \"accept\" or \"reject\"");
      }
      auto decision = try_parse_enum<ReviewDecisionValue>(body["decision"].get<std::string>());
      if (!decision) fail(ErrorKind::input, "decision must be accept or reject");
      std::string operator_id = body.value("operator", "");
      if (operator_id.empty()) operator_id = request.operator_header;
      if (operator_id.empty()) fail(ErrorKind::input, "operator id required (body or X-Operator header)");
      auto outcome = review_.decide(m[1], *decision, operator_id);
      json out = {{"item", outcome.item}, {"tournament_status", outcome.status}};
      out["resume_error"] = outcome.resume_error ? json(*outcome.resume_error) : json(nullptr);
      return {200, out};
    }
    return error(404, "lookup", "no route for " + request.method + " " + request.path);
  } catch (const Error& e) {
    return error(http_status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
}

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) fail(ErrorKind::io, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) fail(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ApiServer::serve() { impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace readerpanel
