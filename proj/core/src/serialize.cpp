#include "readerpanel/serialize.hpp"

namespace readerpanel {

namespace {

template <typename T>
void field(const json& j, const char* name, T& out) {
  if (!j.is_object()) fail(ErrorKind::schema, std::string("expected an object holding '") + name + "'");
  auto it = j.find(name);
  if (it == j.end()) fail(ErrorKind::schema, std::string("missing field '") + name + "'");
  try {
    it->get_to(out);
  } catch (const json::exception& e) {
    fail(ErrorKind::schema, std::string("field '") + name + "': " + e.what());
  }
}

template <typename T>
json opt(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

template <typename T>
void opt_field(const json& j, const char* name, std::optional<T>& out) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) {
    out.reset();
    return;
  }
  T value;
  field(j, name, value);
  out = std::move(value);
}

}  // namespace

// --- scoring ---------------------------------------------------------------

void to_json(json& j, const Criterion& v) {
  j = {{"name", v.name}, {"weight", v.weight}, {"min_score", v.min_score}, {"max_score", v.max_score}};
}
void from_json(const json& j, Criterion& v) {
  field(j, "name", v.name);
  field(j, "weight", v.weight);
  field(j, "min_score", v.min_score);
  field(j, "max_score", v.max_score);
}

void to_json(json& j, const Rubric& v) { j = {{"criteria", v.criteria}, {"imprint", opt(v.imprint)}}; }
void from_json(const json& j, Rubric& v) {
  field(j, "criteria", v.criteria);
  opt_field(j, "imprint", v.imprint);
}

void to_json(json& j, const MemberScore& v) { j = {{"persona_id", v.persona_id}, {"value", v.value}}; }
void from_json(const json& j, MemberScore& v) {
  field(j, "persona_id", v.persona_id);
  field(j, "value", v.value);
}

void to_json(json& j, const AggregateScore& v) {
  j = {{"value", v.value},
       {"per_member_values", v.per_member_values},
       {"outlier_ids", v.outlier_ids},
       {"mean", v.mean},
       {"stddev", v.stddev}};
}
void from_json(const json& j, AggregateScore& v) {
  field(j, "value", v.value);
  field(j, "per_member_values", v.per_member_values);
  field(j, "outlier_ids", v.outlier_ids);
  field(j, "mean", v.mean);
  field(j, "stddev", v.stddev);
}

// --- evaluations -----------------------------------------------------------

void to_json(json& j, const Concept& v) {
  j = {{"id", v.id},
       {"title", v.title},
       {"description", v.description},
       {"imprint", v.imprint},
       {"genre_tags", v.genre_tags},
       {"metadata", v.metadata}};
}
void from_json(const json& j, Concept& v) {
  field(j, "id", v.id);
  field(j, "title", v.title);
  field(j, "description", v.description);
  if (j.contains("imprint")) field(j, "imprint", v.imprint);
  if (j.contains("genre_tags")) field(j, "genre_tags", v.genre_tags);
  if (j.contains("metadata")) field(j, "metadata", v.metadata);
}

void to_json(json& j, const CheckResult& v) {
  j = {{"check_name", v.check_name}, {"score", v.score}, {"components", v.components}, {"flags", v.flags}};
}
void from_json(const json& j, CheckResult& v) {
  field(j, "check_name", v.check_name);
  field(j, "score", v.score);
  field(j, "components", v.components);
  field(j, "flags", v.flags);
}

void to_json(json& j, const SlopReport& v) {
  j = {{"per_check", v.per_check}, {"composite", v.composite}, {"disposition", v.disposition}};
}
void from_json(const json& j, SlopReport& v) {
  field(j, "per_check", v.per_check);
  field(j, "composite", v.composite);
  field(j, "disposition", v.disposition);
}

void to_json(json& j, const Evaluation& v) {
  json scores = json::object();
  for (const auto& [name, score] : v.criterion_scores) scores[name] = score;
  j = {{"persona_id", v.persona_id},
       {"concept_id", v.concept_id},
       {"criterion_scores", scores},
       {"reasoning", v.reasoning},
       {"would_read", v.would_read},
       {"fatal_flaw", opt(v.fatal_flaw)},
       {"attempt", v.attempt},
       {"slop_report", opt(v.slop_report)}};
}
void from_json(const json& j, Evaluation& v) {
  field(j, "persona_id", v.persona_id);
  field(j, "concept_id", v.concept_id);
  std::map<std::string, double> scores;
  field(j, "criterion_scores", scores);
  v.criterion_scores = CriterionScores(scores.begin(), scores.end());
  field(j, "reasoning", v.reasoning);
  field(j, "would_read", v.would_read);
  opt_field(j, "fatal_flaw", v.fatal_flaw);
  field(j, "attempt", v.attempt);
  opt_field(j, "slop_report", v.slop_report);
}

void to_json(json& j, const SlopThresholds& v) { j = {{"flag_at", v.flag_at}, {"reject_at", v.reject_at}}; }
void from_json(const json& j, SlopThresholds& v) {
  field(j, "flag_at", v.flag_at);
  field(j, "reject_at", v.reject_at);
}

void to_json(json& j, const BatchSummary& v) {
  json counts = json::object();
  for (auto name : all_values<CheckName>()) counts[std::string(enum_name(name))] = v.flag_counts[static_cast<std::size_t>(name)];
  j = {{"total", v.total},
       {"accepted", v.accepted},
       {"flagged", v.flagged},
       {"rejected", v.rejected},
       {"most_common_flag", opt(v.most_common_flag)},
       {"flag_counts", counts},
       {"score_histogram", v.score_histogram}};
}
void from_json(const json& j, BatchSummary& v) {
  field(j, "total", v.total);
  field(j, "accepted", v.accepted);
  field(j, "flagged", v.flagged);
  field(j, "rejected", v.rejected);
  opt_field(j, "most_common_flag", v.most_common_flag);
  std::map<std::string, int> counts;
  field(j, "flag_counts", counts);
  v.flag_counts = {};
  for (const auto& [name, count] : counts) {
    v.flag_counts[static_cast<std::size_t>(parse_enum<CheckName>(name))] = count;
  }
  field(j, "score_histogram", v.score_histogram);
}

// --- personas --------------------------------------------------------------

void to_json(json& j, const ReaderPersona& v) {
  j = {{"id", v.id},
       {"age_group", v.age_group},
       {"gender", v.gender},
       {"location", v.location},
       {"income_tier", v.income_tier},
       {"education", v.education},
       {"reading_level", v.reading_level},
       {"books_per_year", v.books_per_year},
       {"preferred_genres", v.preferred_genres},
       {"disliked_genres", v.disliked_genres},
       {"preferred_length", v.preferred_length},
       {"discovery_methods", v.discovery_methods},
       {"review_frequency", v.review_frequency},
       {"social_sharing", v.social_sharing},
       {"price_sensitivity", v.price_sensitivity},
       {"format_preferences", v.format_preferences},
       {"reading_goals", v.reading_goals},
       {"personality_traits", v.personality_traits},
       {"content_sensitivities", v.content_sensitivities},
       {"reading_mood", v.reading_mood},
       {"life_stage", v.life_stage},
       {"recent_reads", v.recent_reads},
       {"consistency_score", v.consistency_score},
       {"reliability_score", v.reliability_score}};
}
void from_json(const json& j, ReaderPersona& v) {
  field(j, "id", v.id);
  field(j, "age_group", v.age_group);
  field(j, "gender", v.gender);
  field(j, "location", v.location);
  field(j, "income_tier", v.income_tier);
  field(j, "education", v.education);
  field(j, "reading_level", v.reading_level);
  field(j, "books_per_year", v.books_per_year);
  field(j, "preferred_genres", v.preferred_genres);
  field(j, "disliked_genres", v.disliked_genres);
  field(j, "preferred_length", v.preferred_length);
  field(j, "discovery_methods", v.discovery_methods);
  field(j, "review_frequency", v.review_frequency);
  field(j, "social_sharing", v.social_sharing);
  field(j, "price_sensitivity", v.price_sensitivity);
  field(j, "format_preferences", v.format_preferences);
  field(j, "reading_goals", v.reading_goals);
  field(j, "personality_traits", v.personality_traits);
  field(j, "content_sensitivities", v.content_sensitivities);
  field(j, "reading_mood", v.reading_mood);
  field(j, "life_stage", v.life_stage);
  field(j, "recent_reads", v.recent_reads);
  field(j, "consistency_score", v.consistency_score);
  field(j, "reliability_score", v.reliability_score);
}

void to_json(json& j, const PublisherPersona& v) {
  j = {{"name", v.name},
       {"imprint", v.imprint},
       {"risk_tolerance", v.risk_tolerance},
       {"decision_style", v.decision_style},
       {"preferred_topics", v.preferred_topics},
       {"vulnerabilities", v.vulnerabilities}};
}
void from_json(const json& j, PublisherPersona& v) {
  field(j, "name", v.name);
  field(j, "imprint", v.imprint);
  field(j, "risk_tolerance", v.risk_tolerance);
  field(j, "decision_style", v.decision_style);
  field(j, "preferred_topics", v.preferred_topics);
  field(j, "vulnerabilities", v.vulnerabilities);
}

void to_json(json& j, const DemographicProfile& v) { j = v.to_json(); }
void from_json(const json& j, DemographicProfile& v) { v = DemographicProfile::from_json(j); }

json member_to_json(const PanelMember& member) {
  if (const auto* r = std::get_if<ReaderPersona>(&member)) return {{"kind", "reader"}, {"persona", *r}};
  return {{"kind", "publisher"}, {"persona", std::get<PublisherPersona>(member)}};
}

PanelMember member_from_json(const json& j) {
  std::string kind;
  field(j, "kind", kind);
  if (kind == "reader") {
    ReaderPersona r;
    field(j, "persona", r);
    return r;
  }
  if (kind == "publisher") {
    PublisherPersona p;
    field(j, "persona", p);
    return p;
  }
  fail(ErrorKind::schema, "unknown member kind '" + kind + "'");
}

// --- panels ----------------------------------------------------------------

void to_json(json& j, const QuotaBreakdown& v) {
  j = {{"anchored", v.anchored}, {"adjacent", v.adjacent}, {"wildcard", v.wildcard}, {"expert", v.expert}};
}
void from_json(const json& j, QuotaBreakdown& v) {
  field(j, "anchored", v.anchored);
  field(j, "adjacent", v.adjacent);
  field(j, "wildcard", v.wildcard);
  field(j, "expert", v.expert);
}

void to_json(json& j, const Panel& v) {
  j = {{"id", v.id},
       {"imprint", v.imprint},
       {"members", v.members},
       {"origins", v.origins},
       {"experts", v.experts},
       {"quota_breakdown", v.quota_breakdown}};
}
void from_json(const json& j, Panel& v) {
  field(j, "id", v.id);
  field(j, "imprint", v.imprint);
  field(j, "members", v.members);
  field(j, "origins", v.origins);
  field(j, "experts", v.experts);
  field(j, "quota_breakdown", v.quota_breakdown);
}

void to_json(json& j, const DiversityReport& v) {
  j = {{"age_group_count", v.age_group_count},
       {"reading_level_count", v.reading_level_count},
       {"genre_cluster_count", v.genre_cluster_count},
       {"max_attribute_share", v.max_attribute_share},
       {"gender_max_share", v.gender_max_share},
       {"passed", v.passed},
       {"violations", v.violations}};
}
void from_json(const json& j, DiversityReport& v) {
  field(j, "age_group_count", v.age_group_count);
  field(j, "reading_level_count", v.reading_level_count);
  field(j, "genre_cluster_count", v.genre_cluster_count);
  field(j, "max_attribute_share", v.max_attribute_share);
  field(j, "gender_max_share", v.gender_max_share);
  field(j, "passed", v.passed);
  field(j, "violations", v.violations);
}

// --- tournaments -----------------------------------------------------------

void to_json(json& j, const Pairing& v) {
  j = {{"match_id", v.match_id}, {"side", v.side}, {"round", v.round}, {"stage", v.stage},
       {"a", opt(v.a)},          {"b", opt(v.b)},   {"bye", v.bye}};
}
void from_json(const json& j, Pairing& v) {
  field(j, "match_id", v.match_id);
  field(j, "side", v.side);
  field(j, "round", v.round);
  field(j, "stage", v.stage);
  opt_field(j, "a", v.a);
  opt_field(j, "b", v.b);
  field(j, "bye", v.bye);
}

void to_json(json& j, const Bracket& v) {
  j = {{"format", v.format}, {"entrants", v.entrants}, {"rounds", v.rounds}, {"losers_bracket", opt(v.losers_bracket)}};
}
void from_json(const json& j, Bracket& v) {
  field(j, "format", v.format);
  field(j, "entrants", v.entrants);
  field(j, "rounds", v.rounds);
  opt_field(j, "losers_bracket", v.losers_bracket);
}

void to_json(json& j, const EvaluationKey& v) {
  j = {{"match_id", v.match_id}, {"pass", v.pass}, {"persona_id", v.persona_id}, {"concept_id", v.concept_id}};
}
void from_json(const json& j, EvaluationKey& v) {
  field(j, "match_id", v.match_id);
  field(j, "pass", v.pass);
  field(j, "persona_id", v.persona_id);
  field(j, "concept_id", v.concept_id);
}

void to_json(json& j, const EvaluationRecord& v) {
  j = {{"key", v.key},
       {"status", v.status},
       {"evaluation", opt(v.evaluation)},
       {"attempts", v.attempts},
       {"error", v.error}};
}
void from_json(const json& j, EvaluationRecord& v) {
  field(j, "key", v.key);
  field(j, "status", v.status);
  opt_field(j, "evaluation", v.evaluation);
  field(j, "attempts", v.attempts);
  field(j, "error", v.error);
}

void to_json(json& j, const EvaluationRef& v) {
  j = {{"persona_id", v.persona_id}, {"concept_id", v.concept_id}, {"pass", v.pass}, {"status", v.status}};
}
void from_json(const json& j, EvaluationRef& v) {
  field(j, "persona_id", v.persona_id);
  field(j, "concept_id", v.concept_id);
  field(j, "pass", v.pass);
  field(j, "status", v.status);
}

void to_json(json& j, const MatchResult& v) {
  j = {{"match_id", v.match_id},
       {"side", v.side},
       {"round", v.round},
       {"stage", v.stage},
       {"concept_a", v.concept_a},
       {"concept_b", v.concept_b},
       {"aggregate_a", v.aggregate_a},
       {"aggregate_b", v.aggregate_b},
       {"winner", v.winner},
       {"tiebreak_used", opt(v.tiebreak_used)},
       {"evaluations", v.evaluations}};
}
void from_json(const json& j, MatchResult& v) {
  field(j, "match_id", v.match_id);
  field(j, "side", v.side);
  field(j, "round", v.round);
  field(j, "stage", v.stage);
  field(j, "concept_a", v.concept_a);
  field(j, "concept_b", v.concept_b);
  field(j, "aggregate_a", v.aggregate_a);
  field(j, "aggregate_b", v.aggregate_b);
  field(j, "winner", v.winner);
  opt_field(j, "tiebreak_used", v.tiebreak_used);
  field(j, "evaluations", v.evaluations);
}

void to_json(json& j, const GateConfig& v) {
  j = {{"min_score", v.min_score},
       {"consensus_fraction", v.consensus_fraction},
       {"consensus_score", v.consensus_score},
       {"would_read_fraction", v.would_read_fraction}};
}
void from_json(const json& j, GateConfig& v) {
  field(j, "min_score", v.min_score);
  field(j, "consensus_fraction", v.consensus_fraction);
  field(j, "consensus_score", v.consensus_score);
  field(j, "would_read_fraction", v.would_read_fraction);
}

void to_json(json& j, const GateDecision& v) {
  j = {{"min_score_pass", v.min_score_pass},
       {"consensus_pass", v.consensus_pass},
       {"would_read_pass", v.would_read_pass},
       {"fatal_flaw_free", v.fatal_flaw_free},
       {"outcome", v.outcome},
       {"consensus_share", v.consensus_share},
       {"would_read_share", v.would_read_share},
       {"fatal_flaws", v.fatal_flaws}};
}
void from_json(const json& j, GateDecision& v) {
  field(j, "min_score_pass", v.min_score_pass);
  field(j, "consensus_pass", v.consensus_pass);
  field(j, "would_read_pass", v.would_read_pass);
  field(j, "fatal_flaw_free", v.fatal_flaw_free);
  field(j, "outcome", v.outcome);
  field(j, "consensus_share", v.consensus_share);
  field(j, "would_read_share", v.would_read_share);
  field(j, "fatal_flaws", v.fatal_flaws);
}

void to_json(json& j, const TournamentConfig& v) {
  j = {{"format", v.format},
       {"seeding", v.seeding},
       {"tiebreak", v.tiebreak},
       {"gates", v.gates},
       {"slop", v.slop},
       {"imprint", v.imprint},
       {"panel_size", v.panel_size},
       {"concurrency", v.concurrency},
       {"max_attempts", v.max_attempts},
       {"swiss_rounds", v.swiss_rounds},
       {"max_repair_rounds", v.max_repair_rounds},
       {"seed", v.seed},
       {"ratings", v.ratings},
       {"manual_order", v.manual_order}};
}
void from_json(const json& j, TournamentConfig& v) {
  field(j, "format", v.format);
  field(j, "seeding", v.seeding);
  field(j, "tiebreak", v.tiebreak);
  field(j, "gates", v.gates);
  field(j, "slop", v.slop);
  field(j, "imprint", v.imprint);
  field(j, "panel_size", v.panel_size);
  field(j, "concurrency", v.concurrency);
  field(j, "max_attempts", v.max_attempts);
  field(j, "swiss_rounds", v.swiss_rounds);
  field(j, "max_repair_rounds", v.max_repair_rounds);
  field(j, "seed", v.seed);
  field(j, "ratings", v.ratings);
  field(j, "manual_order", v.manual_order);
}

void to_json(json& j, const ReviewItem& v) {
  j = {{"item_id", v.item_id},
       {"kind", v.kind},
       {"tournament_id", v.tournament_id},
       {"payload_ref", v.payload_ref},
       {"status", v.status},
       {"decided_by", opt(v.decided_by)},
       {"decided_at", opt(v.decided_at)},
       {"created_seq", v.created_seq}};
}
void from_json(const json& j, ReviewItem& v) {
  field(j, "item_id", v.item_id);
  field(j, "kind", v.kind);
  field(j, "tournament_id", v.tournament_id);
  field(j, "payload_ref", v.payload_ref);
  field(j, "status", v.status);
  opt_field(j, "decided_by", v.decided_by);
  opt_field(j, "decided_at", v.decided_at);
  field(j, "created_seq", v.created_seq);
}

void to_json(json& j, const TournamentResult& v) {
  j = {{"bracket", v.bracket},
       {"match_results", v.match_results},
       {"final_ranking", v.final_ranking},
       {"champion", v.champion},
       {"revisit_flags", v.revisit_flags},
       {"gate_decision", v.gate_decision}};
}
void from_json(const json& j, TournamentResult& v) {
  field(j, "bracket", v.bracket);
  field(j, "match_results", v.match_results);
  field(j, "final_ranking", v.final_ranking);
  field(j, "champion", v.champion);
  field(j, "revisit_flags", v.revisit_flags);
  field(j, "gate_decision", v.gate_decision);
}

void to_json(json& j, const TournamentState& v) {
  json records = json::array();
  for (const auto& [key, record] : v.evaluations) records.push_back(record);
  j = {{"id", v.id},
       {"config", v.config},
       {"concepts", v.concepts},
       {"entrants", v.entrants},
       {"rubric", v.rubric},
       {"judge", v.judge},
       {"panel", opt(v.panel)},
       {"evaluations", records},
       {"results", v.results},
       {"completed_stages", v.completed_stages},
       {"review_items", v.review_items},
       {"result", opt(v.result)},
       {"disposition", v.disposition},
       {"status", v.status},
       {"last_sequence", v.last_sequence}};
}
void from_json(const json& j, TournamentState& v) {
  field(j, "id", v.id);
  field(j, "config", v.config);
  field(j, "concepts", v.concepts);
  field(j, "entrants", v.entrants);
  field(j, "rubric", v.rubric);
  field(j, "judge", v.judge);
  opt_field(j, "panel", v.panel);
  std::vector<EvaluationRecord> records;
  field(j, "evaluations", records);
  v.evaluations.clear();
  for (auto& r : records) {
    auto key = r.key;
    v.evaluations.emplace(std::move(key), std::move(r));
  }
  field(j, "results", v.results);
  field(j, "completed_stages", v.completed_stages);
  field(j, "review_items", v.review_items);
  opt_field(j, "result", v.result);
  field(j, "disposition", v.disposition);
  field(j, "status", v.status);
  field(j, "last_sequence", v.last_sequence);
}

}  // namespace readerpanel
