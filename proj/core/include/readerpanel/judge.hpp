#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>

#include "readerpanel/evaluation.hpp"
#include "readerpanel/persona.hpp"
#include "readerpanel/prompt.hpp"
#include "readerpanel/slop.hpp"

namespace readerpanel {

/// Per-call sampling state. `attempt` counts regenerations (1-based);
/// `sampling_seed` changes between attempts and between re-evaluations.
struct EvaluationContext {
  int attempt = 1;
  std::uint64_t sampling_seed = 0;
};

/// A source of evaluations. Implementations must tolerate concurrent calls.
class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;

  virtual Evaluation evaluate(const PanelMember& member, const Concept& book, const Rubric& rubric,
                              const EvaluationContext& context) = 0;
  /// Stable identifier recorded in tournament logs, e.g. "mock:7".
  virtual std::string describe() const = 0;
};

/// Runs the backend and enforces the Evaluation invariants. Any failure is
/// reported as a judge error; parse/schema errors keep the raw text.
Evaluation evaluate(JudgeBackend& backend, const PanelMember& member, const Concept& book,
                    const Rubric& rubric, const EvaluationContext& context = {});

// ---------------------------------------------------------------------------
// Deterministic mock judge
// ---------------------------------------------------------------------------

/// Offline stand-in for an LLM judge. For each criterion, on a 0-10 scale:
///
///   base     = hash(seed, persona, concept, criterion) mapped to [3, 8]
///   affinity = +1.5 if a concept genre is preferred, -2.0 if one is disliked
///   noise    = (1 - reliability) * 1.0 * u,  u in [-1, 1], fixed per triple
///   jitter   = (1 - consistency) * 0.5 * v,  v in [-1, 1], redrawn per sampling seed
///
/// The sum is clamped to [0, 10] and mapped onto the criterion's range.
/// Publisher personas count as fully reliable and consistent, with their
/// preferred topics acting as preferred genres. A concept carrying a
/// "fatal_flaw" metadata entry gets that flaw reported.
Evaluation mock_evaluate(const PanelMember& member, const Concept& book, const Rubric& rubric,
                         std::uint64_t seed, const EvaluationContext& context = {});

class MockJudge : public JudgeBackend {
 public:
  explicit MockJudge(std::uint64_t seed) : seed_(seed) {}

  Evaluation evaluate(const PanelMember& member, const Concept& book, const Rubric& rubric,
                      const EvaluationContext& context) override {
    return mock_evaluate(member, book, rubric, seed_, context);
  }
  std::string describe() const override { return "mock:" + std::to_string(seed_); }

 private:
  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Response parsing
// ---------------------------------------------------------------------------

/// Extracts the first well-formed JSON object from free text and validates it
/// against the rubric. Throws RawTextError with kind parse (no JSON object),
/// schema (missing/extra/mistyped fields) or range (score out of bounds).
Evaluation parse_evaluation_response(const std::string& raw, const Rubric& rubric,
                                     const std::string& persona_id, const std::string& concept_id);

/// Canonical response body for an evaluation; parse_evaluation_response
/// reads it back unchanged.
std::string format_evaluation_response(const Evaluation& evaluation);

// ---------------------------------------------------------------------------
// Remote judge
// ---------------------------------------------------------------------------

struct RemoteJudgeConfig {
  /// Full endpoint URL, e.g. "http://127.0.0.1:8088/v1/judge".
  std::string url;
  std::string model;
  std::string auth_token;
  std::chrono::milliseconds timeout{60000};
  int max_tries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::optional<std::filesystem::path> audit_log;

  /// READERPANEL_JUDGE_URL, READERPANEL_JUDGE_MODEL, READERPANEL_JUDGE_TOKEN.
  static RemoteJudgeConfig from_env();
};

/// Single-endpoint HTTP client. Each call POSTs the rendered prompt as JSON;
/// the reply body (or its "content" field, when the body is a JSON object
/// carrying one) is parsed with parse_evaluation_response. Transport errors
/// and unparseable replies are retried with exponential backoff.
class RemoteJudge : public JudgeBackend {
 public:
  explicit RemoteJudge(RemoteJudgeConfig config);

  Evaluation evaluate(const PanelMember& member, const Concept& book, const Rubric& rubric,
                      const EvaluationContext& context) override;
  std::string describe() const override { return "remote:" + config_.url; }

 private:
  void audit(const std::string& request, int status, const std::string& response);

  RemoteJudgeConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  std::mutex audit_mutex_;
};

// ---------------------------------------------------------------------------
// Slop-gated regeneration
// ---------------------------------------------------------------------------

struct Accepted {
  Evaluation evaluation;
};

struct FlaggedForReview {
  Evaluation evaluation;
};

struct Failed {
  int attempts = 0;
  std::string error;
  /// Last evaluation produced, when the backend produced one.
  std::optional<Evaluation> last_evaluation;
};

using RegenerationOutcome = std::variant<Accepted, FlaggedForReview, Failed>;

/// Sampling seed for a given attempt, derived from the caller's base seed.
std::uint64_t attempt_seed(std::uint64_t base_seed, int attempt);

/// Evaluates, scores the result for slop, and retries rejected output.
/// Attempts are numbered from `first_attempt` up to `max_attempts`
/// inclusive; the final attempt number is recorded on the evaluation.
RegenerationOutcome evaluate_with_regeneration(JudgeBackend& backend, const SlopDetector& detector,
                                               const PanelMember& member, const Concept& book,
                                               const Rubric& rubric, int max_attempts,
                                               std::uint64_t base_seed = 0, int first_attempt = 1);

}  // namespace readerpanel
