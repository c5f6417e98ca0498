#pragma once

// JSON mappings for the domain types. Found by nlohmann::json through ADL,
// so `json j = evaluation;` and `j.get<Evaluation>()` just work.
//
// Every mapping is total: dumping, parsing and dumping again yields the same
// bytes. Optional fields are written as null rather than omitted.

#include <string>

#include "readerpanel/data.hpp"
#include "readerpanel/evaluation.hpp"
#include "readerpanel/panel.hpp"
#include "readerpanel/persona.hpp"
#include "readerpanel/scoring.hpp"
#include "readerpanel/slop.hpp"
#include "readerpanel/tournament.hpp"

namespace readerpanel {

template <NamedEnum E>
void to_json(json& j, E value) {
  j = std::string(enum_name(value));
}

template <NamedEnum E>
void from_json(const json& j, E& value) {
  if (!j.is_string()) fail(ErrorKind::schema, "expected an enum name string");
  auto parsed = try_parse_enum<E>(j.get_ref<const std::string&>());
  if (!parsed) fail(ErrorKind::schema, "unknown enum value '" + j.get<std::string>() + "'");
  value = *parsed;
}

void to_json(json& j, const Criterion& v);
void from_json(const json& j, Criterion& v);
void to_json(json& j, const Rubric& v);
void from_json(const json& j, Rubric& v);
void to_json(json& j, const MemberScore& v);
void from_json(const json& j, MemberScore& v);
void to_json(json& j, const AggregateScore& v);
void from_json(const json& j, AggregateScore& v);

void to_json(json& j, const Concept& v);
void from_json(const json& j, Concept& v);
void to_json(json& j, const CheckResult& v);
void from_json(const json& j, CheckResult& v);
void to_json(json& j, const SlopReport& v);
void from_json(const json& j, SlopReport& v);
void to_json(json& j, const Evaluation& v);
void from_json(const json& j, Evaluation& v);
void to_json(json& j, const SlopThresholds& v);
void from_json(const json& j, SlopThresholds& v);
void to_json(json& j, const BatchSummary& v);
void from_json(const json& j, BatchSummary& v);

void to_json(json& j, const ReaderPersona& v);
void from_json(const json& j, ReaderPersona& v);
void to_json(json& j, const PublisherPersona& v);
void from_json(const json& j, PublisherPersona& v);
void to_json(json& j, const DemographicProfile& v);
void from_json(const json& j, DemographicProfile& v);
/// {"kind": "reader"|"publisher", "persona": {...}}
json member_to_json(const PanelMember& member);
PanelMember member_from_json(const json& j);

void to_json(json& j, const QuotaBreakdown& v);
void from_json(const json& j, QuotaBreakdown& v);
void to_json(json& j, const Panel& v);
void from_json(const json& j, Panel& v);
void to_json(json& j, const DiversityReport& v);
void from_json(const json& j, DiversityReport& v);

void to_json(json& j, const Pairing& v);
void from_json(const json& j, Pairing& v);
void to_json(json& j, const Bracket& v);
void from_json(const json& j, Bracket& v);
void to_json(json& j, const EvaluationKey& v);
void from_json(const json& j, EvaluationKey& v);
void to_json(json& j, const EvaluationRecord& v);
void from_json(const json& j, EvaluationRecord& v);
void to_json(json& j, const EvaluationRef& v);
void from_json(const json& j, EvaluationRef& v);
void to_json(json& j, const MatchResult& v);
void from_json(const json& j, MatchResult& v);
void to_json(json& j, const GateConfig& v);
void from_json(const json& j, GateConfig& v);
void to_json(json& j, const GateDecision& v);
void from_json(const json& j, GateDecision& v);
void to_json(json& j, const TournamentConfig& v);
void from_json(const json& j, TournamentConfig& v);
void to_json(json& j, const ReviewItem& v);
void from_json(const json& j, ReviewItem& v);
void to_json(json& j, const TournamentResult& v);
void from_json(const json& j, TournamentResult& v);
/// Full state, used for snapshots.
void to_json(json& j, const TournamentState& v);
void from_json(const json& j, TournamentState& v);

/// Parses `text` as T, reporting malformed JSON as a parse error and shape
/// problems as schema errors.
template <typename T>
T parse_as(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(ErrorKind::parse, "malformed JSON");
  try {
    return doc.get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::schema, e.what());
  }
}

/// Canonical one-line rendering.
template <typename T>
std::string dump(const T& value) {
  json j = value;
  return j.dump();
}

}  // namespace readerpanel
