#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "readerpanel/data.hpp"
#include "readerpanel/judge.hpp"

namespace readerpanel {

namespace {

std::string env_or(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

}  // namespace

RemoteJudgeConfig RemoteJudgeConfig::from_env() {
  RemoteJudgeConfig config;
  config.url = env_or("READERPANEL_JUDGE_URL");
  config.model = env_or("READERPANEL_JUDGE_MODEL");
  config.auth_token = env_or("READERPANEL_JUDGE_TOKEN");
  if (config.url.empty()) fail(ErrorKind::configuration, "READERPANEL_JUDGE_URL is not set");
  return config;
}

RemoteJudge::RemoteJudge(RemoteJudgeConfig config) : config_(std::move(config)) {
  auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::configuration, "judge URL lacks a scheme: " + config_.url);
  auto scheme = config_.url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    fail(ErrorKind::configuration, "unsupported judge URL scheme: " + scheme);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") fail(ErrorKind::configuration, "built without TLS support; use an http:// judge URL");
#endif
  auto path_start = config_.url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
  if (config_.max_tries < 1) fail(ErrorKind::configuration, "max_tries must be at least 1");
}

void RemoteJudge::audit(const std::string& request, int status, const std::string& response) {
  if (!config_.audit_log) return;
  json line = {{"request", json::parse(request, nullptr, false)}, {"status", status}, {"response", response}};
  std::lock_guard lock(audit_mutex_);
  std::ofstream out(*config_.audit_log, std::ios::app);
  out << line.dump() << "\n";
}

Evaluation RemoteJudge::evaluate(const PanelMember& member, const Concept& book, const Rubric& rubric,
                                 const EvaluationContext& context) {
  auto prompt = render_judge_prompt(member, rubric, book);
  json body = {{"model", config_.model},
               {"persona_id", member_id(member)},
               {"concept_id", book.id},
               {"attempt", context.attempt},
               {"sampling_seed", context.sampling_seed},
               {"prompt",
                {{"persona_bio", prompt.persona_bio},
                 {"perspective_instruction", prompt.perspective_instruction},
                 {"rubric_block", prompt.rubric_block},
                 {"anti_anchoring_instruction", prompt.anti_anchoring_instruction},
                 {"output_schema_block", prompt.output_schema_block}}},
               {"text", prompt.text()}};
  const std::string request = body.dump();

  httplib::Client client(scheme_host_port_);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  httplib::Headers headers;
  if (!config_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + config_.auth_token);

  std::string last_error;
  std::string last_raw;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.max_tries; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(path_, headers, request, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      audit(request, 0, "");
      continue;
    }
    audit(request, res->status, res->body);
    last_raw = res->body;
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    std::string content = res->body;
    auto envelope = json::parse(res->body, nullptr, false);
    if (!envelope.is_discarded() && envelope.is_object()) {
      if (auto it = envelope.find("content"); it != envelope.end() && it->is_string()) {
        content = it->get<std::string>();
      }
    }
    try {
      auto e = parse_evaluation_response(content, rubric, member_id(member), book.id);
      e.attempt = context.attempt;
      return e;
    } catch (const RawTextError& err) {
      last_error = err.what();
      last_raw = content;
    }
  }
  throw RawTextError(ErrorKind::judge,
                     "remote judge failed after " + std::to_string(config_.max_tries) + " tries: " + last_error,
                     last_raw);
}

}  // namespace readerpanel
