#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "readerpanel/evaluation.hpp"
#include "readerpanel/judge.hpp"
#include "readerpanel/panel.hpp"
#include "readerpanel/scoring.hpp"
#include "readerpanel/slop.hpp"

namespace readerpanel {

enum class TournamentFormat { single_elim, double_elim, round_robin, swiss };
enum class Seeding { random, by_rating, manual };
enum class Tiebreak { random, criteria_weighted, re_evaluation };
enum class BracketSide { winners, losers, grand_final, round_robin, swiss };

template <> struct EnumNames<TournamentFormat> {
  static constexpr std::array<std::string_view, 4> names{"single_elim", "double_elim", "round_robin", "swiss"};
};
template <> struct EnumNames<Seeding> {
  static constexpr std::array<std::string_view, 3> names{"random", "by_rating", "manual"};
};
template <> struct EnumNames<Tiebreak> {
  static constexpr std::array<std::string_view, 3> names{"random", "criteria_weighted", "re_evaluation"};
};
template <> struct EnumNames<BracketSide> {
  static constexpr std::array<std::string_view, 5> names{"winners", "losers", "grand_final", "round_robin",
                                                         "swiss"};
};

// ---------------------------------------------------------------------------
// Brackets
// ---------------------------------------------------------------------------

/// One scheduled slot. A side is empty while its feeder match is undecided;
/// a bye has `a` set and `bye` true and is never played.
struct Pairing {
  std::string match_id;
  BracketSide side = BracketSide::winners;
  int round = 1;
  /// Global play order: every pairing of stage k is decided before stage
  /// k+1 starts, except across independent single-elimination branches.
  int stage = 1;
  std::optional<std::string> a;
  std::optional<std::string> b;
  bool bye = false;

  bool ready() const { return !bye && a.has_value() && b.has_value(); }
  bool operator==(const Pairing&) const = default;
};

struct Bracket {
  TournamentFormat format = TournamentFormat::single_elim;
  /// Concept ids in seed order (seed 1 first).
  std::vector<std::string> entrants;
  /// Winners-bracket rounds (or round-robin/Swiss rounds); the double-elim
  /// grand final is appended as a last round.
  std::vector<std::vector<Pairing>> rounds;
  std::optional<std::vector<std::vector<Pairing>>> losers_bracket;

  bool operator==(const Bracket&) const = default;
};

/// Seed positions for a bracket of `slots` (a power of two): position i holds
/// seed result[i]. Seed 1 meets the lowest seed; seeds 1 and 2 sit in
/// opposite halves.
std::vector<int> standard_seed_positions(int slots);

/// Orders entrants. `ratings` is required for by_rating (higher is seeded
/// first), `manual_order` for manual (a permutation of the concept ids).
std::vector<std::string> seed_entrants(const std::vector<Concept>& concepts, Seeding seeding,
                                       const std::map<std::string, double>& ratings,
                                       const std::vector<std::string>& manual_order, std::uint64_t seed);

/// Initial bracket: every pairing known before any match is played.
Bracket seed_bracket(const std::vector<Concept>& concepts, TournamentFormat format, Seeding seeding,
                     const std::map<std::string, double>& ratings, const std::vector<std::string>& manual_order,
                     std::uint64_t seed, int swiss_rounds = 0);

/// ⌈log₂ n⌉ for n ≥ 1.
int ceil_log2(int n);

struct MatchResult;

/// Bracket for seeded entrants with the given results applied: pairings whose
/// feeders are decided are filled in; later ones are left open.
Bracket build_bracket(TournamentFormat format, const std::vector<std::string>& entrants,
                      const std::vector<MatchResult>& results, int swiss_rounds = 0);

/// Pairs a ranked field (best first, even size) so that no pair has met
/// before, searching depth-first in rank order. Falls back to greedy rank
/// pairing when no rematch-free matching is found within `node_budget`.
/// Returns index pairs into `ranked`.
std::vector<std::pair<std::size_t, std::size_t>> pair_swiss_round(
    const std::vector<std::string>& ranked, const std::set<std::pair<std::string, std::string>>& played,
    std::size_t node_budget = 200000);

// ---------------------------------------------------------------------------
// Matches and evaluations
// ---------------------------------------------------------------------------

enum class EvaluationStatus { accepted, flagged, failed };

template <> struct EnumNames<EvaluationStatus> {
  static constexpr std::array<std::string_view, 3> names{"accepted", "flagged", "failed"};
};

/// Identifies one judge call: pass 0 is the match itself, pass 1 the
/// re-evaluation tiebreak rerun.
struct EvaluationKey {
  std::string match_id;
  int pass = 0;
  std::string persona_id;
  std::string concept_id;

  std::string str() const;
  auto operator<=>(const EvaluationKey&) const = default;
};

struct EvaluationRecord {
  EvaluationKey key;
  EvaluationStatus status = EvaluationStatus::failed;
  /// Absent only for failures where the backend produced nothing.
  std::optional<Evaluation> evaluation;
  int attempts = 0;
  std::string error;

  bool operator==(const EvaluationRecord&) const = default;
};

struct EvaluationRef {
  std::string persona_id;
  std::string concept_id;
  int pass = 0;
  EvaluationStatus status = EvaluationStatus::accepted;

  bool operator==(const EvaluationRef&) const = default;
};

struct MatchResult {
  std::string match_id;
  BracketSide side = BracketSide::winners;
  int round = 1;
  int stage = 1;
  std::string concept_a;
  std::string concept_b;
  AggregateScore aggregate_a;
  AggregateScore aggregate_b;
  std::string winner;
  std::optional<Tiebreak> tiebreak_used;
  std::vector<EvaluationRef> evaluations;

  const std::string& loser() const { return winner == concept_a ? concept_b : concept_a; }
  const AggregateScore& aggregate_of(std::string_view id) const { return id == concept_a ? aggregate_a : aggregate_b; }
  bool operator==(const MatchResult&) const = default;
};

/// Raised when a match cannot produce a winner.
class MatchError : public Error {
 public:
  explicit MatchError(const std::string& message) : Error(ErrorKind::match, message) {}
};

/// Per-criterion panel means over accepted evaluations of one concept.
std::map<std::string, double, std::less<>> criterion_means(const std::vector<Evaluation>& evaluations,
                                                          const Rubric& rubric);

/// Outcome of aggregating one match's evaluations.
struct MatchDecision {
  enum class Kind { decided, paused, needs_re_evaluation };
  Kind kind = Kind::decided;
  std::optional<MatchResult> result;
  /// Set when paused: concept ids whose side has no accepted evaluation yet.
  std::vector<std::string> waiting_on;
};

/// Decides a match from its evaluation records. Records with pass 1 are the
/// re-evaluation rerun. Throws MatchError when a side has no accepted and no
/// flagged evaluation.
MatchDecision decide_match(const Pairing& pairing, const std::vector<EvaluationRecord>& records,
                           const Rubric& rubric, Tiebreak tiebreak, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Standings, revisit flags, gates
// ---------------------------------------------------------------------------

/// Completed-match view needed to rank a field.
std::vector<std::string> compute_standings(const Bracket& bracket, const std::vector<MatchResult>& results);

/// Concepts worth a second look after elimination late in the bracket.
std::vector<std::string> flag_revisit(const Bracket& bracket, const std::vector<MatchResult>& results,
                                      const std::vector<std::string>& standings);

struct GateConfig {
  double min_score = 6.5;
  double consensus_fraction = 0.6;
  /// Member scores strictly above this count toward consensus.
  double consensus_score = 5.0;
  double would_read_fraction = 0.4;

  bool operator==(const GateConfig&) const = default;
};

enum class GateOutcome { advance, human_review };

template <> struct EnumNames<GateOutcome> {
  static constexpr std::array<std::string_view, 2> names{"advance", "human_review"};
};

struct GateDecision {
  bool min_score_pass = false;
  bool consensus_pass = false;
  bool would_read_pass = false;
  bool fatal_flaw_free = false;
  GateOutcome outcome = GateOutcome::human_review;
  double consensus_share = 0.0;
  double would_read_share = 0.0;
  std::vector<std::string> fatal_flaws;

  bool operator==(const GateDecision&) const = default;
};

/// `reader_ids` are the panel's reader personas; only their evaluations count
/// toward the would-read share. Input error when `evaluations` is empty.
GateDecision apply_quality_gates(const AggregateScore& champion_aggregate, const std::vector<Evaluation>& evaluations,
                                 const std::set<std::string>& reader_ids, const GateConfig& gates = {});

// ---------------------------------------------------------------------------
// Tournament configuration and state
// ---------------------------------------------------------------------------

struct TournamentConfig {
  TournamentFormat format = TournamentFormat::single_elim;
  Seeding seeding = Seeding::random;
  Tiebreak tiebreak = Tiebreak::random;
  GateConfig gates;
  SlopThresholds slop;
  std::string imprint;
  int panel_size = 10;
  int concurrency = 4;
  int max_attempts = 3;
  /// 0 means ⌈log₂N⌉.
  int swiss_rounds = 0;
  int max_repair_rounds = 50;
  std::uint64_t seed = 0;
  std::map<std::string, double> ratings;
  std::vector<std::string> manual_order;

  /// Configuration error on out-of-range values.
  void validate() const;
  bool operator==(const TournamentConfig&) const = default;
};

enum class TournamentStatus { created, running, paused, finished };

template <> struct EnumNames<TournamentStatus> {
  static constexpr std::array<std::string_view, 4> names{"created", "running", "paused", "finished"};
};

enum class ReviewKind { flagged_evaluation, gate_referral };
enum class ReviewStatus { pending, accepted, rejected };
enum class ReviewDecisionValue { accept, reject };

template <> struct EnumNames<ReviewKind> {
  static constexpr std::array<std::string_view, 2> names{"flagged_evaluation", "gate_referral"};
};
template <> struct EnumNames<ReviewStatus> {
  static constexpr std::array<std::string_view, 3> names{"pending", "accepted", "rejected"};
};
template <> struct EnumNames<ReviewDecisionValue> {
  static constexpr std::array<std::string_view, 2> names{"accept", "reject"};
};

struct ReviewItem {
  std::string item_id;
  ReviewKind kind = ReviewKind::flagged_evaluation;
  std::string tournament_id;
  /// Evaluation key string for flagged evaluations, concept id for referrals.
  std::string payload_ref;
  ReviewStatus status = ReviewStatus::pending;
  std::optional<std::string> decided_by;
  std::optional<std::string> decided_at;
  /// Log sequence of the event that created the item; orders the queue.
  std::int64_t created_seq = 0;

  bool operator==(const ReviewItem&) const = default;
};

enum class ChampionDisposition { pending, advance, human_review, archived };

template <> struct EnumNames<ChampionDisposition> {
  static constexpr std::array<std::string_view, 4> names{"pending", "advance", "human_review", "archived"};
};

struct TournamentResult {
  Bracket bracket;
  std::vector<MatchResult> match_results;
  std::vector<std::string> final_ranking;
  std::string champion;
  std::vector<std::string> revisit_flags;
  GateDecision gate_decision;

  bool operator==(const TournamentResult&) const = default;
};

/// Everything needed to continue or inspect a tournament. Built only by
/// applying events, so a replayed log yields the same state.
struct TournamentState {
  std::string id;
  TournamentConfig config;
  std::vector<Concept> concepts;
  std::vector<std::string> entrants;
  Rubric rubric;
  std::string judge;
  std::optional<Panel> panel;
  std::map<EvaluationKey, EvaluationRecord> evaluations;
  std::vector<MatchResult> results;
  std::vector<int> completed_stages;
  std::vector<ReviewItem> review_items;
  std::optional<TournamentResult> result;
  ChampionDisposition disposition = ChampionDisposition::pending;
  TournamentStatus status = TournamentStatus::created;
  std::int64_t last_sequence = 0;

  const Concept& concept_by_id(std::string_view id) const;
  const MatchResult* result_for(std::string_view match_id) const;
  ReviewItem* find_review_item(std::string_view item_id);
  const ReviewItem* find_review_item(std::string_view item_id) const;

  bool operator==(const TournamentState&) const = default;
};

/// Full bracket view for a state: decided and pending pairings, with later
/// pairings filled in as their feeders complete.
Bracket bracket_view(const TournamentState& state);

/// Pairings whose participants are known and which have no result yet.
std::vector<Pairing> open_pairings(const TournamentState& state);

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

enum class EventKind {
  tournament_created,
  panel_composed,
  evaluation_recorded,
  evaluation_flagged,
  review_decision,
  match_completed,
  round_completed,
  gates_applied,
};

template <> struct EnumNames<EventKind> {
  static constexpr std::array<std::string_view, 8> names{
      "tournament_created", "panel_composed", "evaluation_recorded", "evaluation_flagged",
      "review_decision",    "match_completed", "round_completed",    "gates_applied"};
};

struct Event {
  EventKind kind = EventKind::tournament_created;
  json payload;
};

/// Applies one event to the state. Events are validated against the state
/// they apply to; a mismatch is an integrity error.
void apply_event(TournamentState& state, const Event& event, std::int64_t sequence,
                 const std::string& timestamp = {});

/// Destination for events as the engine produces them. The store's writer
/// implements this; tests use it to simulate a crash mid-run.
class EventSink {
 public:
  virtual ~EventSink() = default;
  /// Durably records the event and returns its sequence number.
  virtual std::int64_t append(const Event& event) = 0;
};

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

/// Creates the tournament_created event for a new tournament.
Event make_created_event(const std::string& id, const TournamentConfig& config, const std::vector<Concept>& concepts,
                         const Rubric& rubric, const std::string& judge);

class TournamentEngine {
 public:
  /// `sink` may be null for purely in-memory runs.
  TournamentEngine(TournamentState& state, JudgeBackend& backend, const SlopDetector& detector,
                   EventSink* sink = nullptr, const PublisherRegistry& registry = PublisherRegistry::shipped(),
                   const ImprintRegistry& imprints = ImprintRegistry::shipped());

  /// Starts a new tournament: records creation, composes the panel.
  void create(const std::string& id, const TournamentConfig& config, const std::vector<Concept>& concepts,
              const Rubric& rubric);
  /// Uses a caller-supplied panel instead of composing one.
  void create(const std::string& id, const TournamentConfig& config, const std::vector<Concept>& concepts,
              const Rubric& rubric, const Panel& panel);

  /// Plays every open match until the tournament finishes or only paused
  /// matches remain. Composes the configured panel first if the log stops
  /// before one was recorded. Returns the resulting status.
  TournamentStatus run();

  /// Applies a human decision on a review item, regenerating a rejected
  /// flagged evaluation once if its attempt budget allows, then resumes.
  TournamentStatus decide(const std::string& item_id, ReviewDecisionValue decision, const std::string& operator_id,
                          const std::string& timestamp = {});

 private:
  std::int64_t emit(const Event& event, const std::string& timestamp = {});
  Panel configured_panel(const TournamentConfig& config) const;
  void evaluate_pairings(const std::vector<Pairing>& pairings, int pass);
  void mark_completed_stages();
  void finish();

  TournamentState& state_;
  JudgeBackend& backend_;
  const SlopDetector& detector_;
  EventSink* sink_;
  const PublisherRegistry& registry_;
  const ImprintRegistry& imprints_;
};

/// Convenience: create and run in memory.
TournamentState run_tournament(const std::vector<Concept>& concepts, const TournamentConfig& config,
                               const Panel& panel, JudgeBackend& backend, const Rubric& rubric,
                               const SlopDetector& detector = SlopDetector(), const std::string& id = "tournament");

/// Evaluation records for the champion's side of its final match.
std::vector<Evaluation> champion_evaluations(const TournamentState& state);

/// Deterministic review-item id for a flagged evaluation.
std::string review_item_id(const std::string& tournament_id, const EvaluationKey& key, int attempt);

// ---------------------------------------------------------------------------
// Synthetic concepts and the two-stage funnel
// ---------------------------------------------------------------------------

/// `count` distinct concepts with ids "c001".. and genre tags drawn from the
/// shipped vocabulary.
std::vector<Concept> synthetic_concepts(int count, std::uint64_t seed, const std::string& imprint = "");

struct FunnelConfig {
  int stage_one_keep = 16;
  TournamentFormat stage_two_format = TournamentFormat::round_robin;
  int stage_two_keep = 8;
};

struct FunnelResult {
  TournamentResult stage_one;
  TournamentResult stage_two;
  std::vector<std::string> stage_one_survivors;
  std::vector<std::string> survivors;
  double survival_rate = 0.0;
};

/// Stage one is a single-elimination bracket over all concepts; its top
/// `stage_one_keep` by standings move on to stage two, whose top
/// `stage_two_keep` survive.
FunnelResult run_funnel(const std::vector<Concept>& concepts, const TournamentConfig& base, const Panel& panel,
                        JudgeBackend& backend, const Rubric& rubric, const FunnelConfig& funnel = {},
                        const SlopDetector& detector = SlopDetector());

}  // namespace readerpanel
