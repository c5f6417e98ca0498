#include <algorithm>
#include <atomic>
#include <climits>
#include <map>
#include <thread>

#include "readerpanel/serialize.hpp"
#include "readerpanel/tournament.hpp"

namespace readerpanel {

void TournamentConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::configuration, what); };
  if (panel_size < 5) bad("panel_size must be at least 5");
  if (concurrency < 1) bad("concurrency must be at least 1");
  if (max_attempts < 1) bad("max_attempts must be at least 1");
  if (swiss_rounds < 0) bad("swiss_rounds must be non-negative");
  if (max_repair_rounds < 1) bad("max_repair_rounds must be at least 1");
  if (gates.min_score < 0.0 || gates.min_score > 10.0) bad("gates.min_score must lie in [0, 10]");
  if (gates.consensus_score < 0.0 || gates.consensus_score > 10.0) bad("gates.consensus_score must lie in [0, 10]");
  for (double f : {gates.consensus_fraction, gates.would_read_fraction}) {
    if (f < 0.0 || f > 1.0) bad("gate fractions must lie in [0, 1]");
  }
  if (slop.flag_at < 0.0 || slop.reject_at > 1.0 || slop.flag_at > slop.reject_at) {
    bad("slop thresholds must satisfy 0 <= flag_at <= reject_at <= 1");
  }
}

const Concept& TournamentState::concept_by_id(std::string_view concept_id) const {
  for (const auto& c : concepts) {
    if (c.id == concept_id) return c;
  }
  fail(ErrorKind::lookup, "unknown concept '" + std::string(concept_id) + "'");
}

const MatchResult* TournamentState::result_for(std::string_view match_id) const {
  for (const auto& r : results) {
    if (r.match_id == match_id) return &r;
  }
  return nullptr;
}

ReviewItem* TournamentState::find_review_item(std::string_view item_id) {
  for (auto& item : review_items) {
    if (item.item_id == item_id) return &item;
  }
  return nullptr;
}

const ReviewItem* TournamentState::find_review_item(std::string_view item_id) const {
  return const_cast<TournamentState*>(this)->find_review_item(item_id);
}

Bracket bracket_view(const TournamentState& state) {
  if (state.entrants.empty()) fail(ErrorKind::state, "tournament has no entrants");
  return build_bracket(state.config.format, state.entrants, state.results, state.config.swiss_rounds);
}

namespace {

template <typename F>
void for_each_pairing(const Bracket& bracket, F&& f) {
  for (const auto& round : bracket.rounds) {
    for (const auto& p : round) f(p);
  }
  if (bracket.losers_bracket) {
    for (const auto& round : *bracket.losers_bracket) {
      for (const auto& p : round) f(p);
    }
  }
}

}  // namespace

std::vector<Pairing> open_pairings(const TournamentState& state) {
  std::vector<Pairing> out;
  for_each_pairing(bracket_view(state), [&](const Pairing& p) {
    if (p.ready() && !state.result_for(p.match_id)) out.push_back(p);
  });
  return out;
}

std::string review_item_id(const std::string& tournament_id, const EvaluationKey& key, int attempt) {
  return "rv-" + hex64(stable_hash(0, {tournament_id, key.str(), std::to_string(attempt)})).substr(0, 12);
}

// ---------------------------------------------------------------------------
// Event reducer
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void corrupt(std::int64_t seq, const std::string& message) {
  fail(ErrorKind::integrity, "event " + std::to_string(seq) + ": " + message);
}

template <typename T>
T take(const json& payload, const char* name, std::int64_t seq) {
  if (!payload.is_object() || !payload.contains(name)) corrupt(seq, std::string("payload lacks '") + name + "'");
  try {
    return payload.at(name).get<T>();
  } catch (const json::exception& e) {
    corrupt(seq, std::string("bad '") + name + "': " + e.what());
  } catch (const Error& e) {
    corrupt(seq, std::string("bad '") + name + "': " + e.what());
  }
}

void refresh_status(TournamentState& state) {
  if (state.result) {
    state.status = TournamentStatus::finished;
  } else if (!state.panel) {
    state.status = TournamentStatus::created;
  } else {
    bool waiting = std::any_of(state.evaluations.begin(), state.evaluations.end(), [&](const auto& kv) {
      return kv.second.status == EvaluationStatus::flagged && !state.result_for(kv.first.match_id);
    });
    state.status = waiting ? TournamentStatus::paused : TournamentStatus::running;
  }
}

EvaluationRecord* record_by_ref(TournamentState& state, const std::string& ref) {
  for (auto& [key, record] : state.evaluations) {
    if (key.str() == ref) return &record;
  }
  return nullptr;
}

void apply_record(TournamentState& state, const Event& event, std::int64_t seq) {
  auto record = take<EvaluationRecord>(event.payload, "record", seq);
  bool flagged = event.kind == EventKind::evaluation_flagged;
  if (flagged != (record.status == EvaluationStatus::flagged)) {
    corrupt(seq, "record status " + std::string(enum_name(record.status)) + " does not fit " +
                     std::string(enum_name(event.kind)));
  }
  if (record.status != EvaluationStatus::failed && !record.evaluation) corrupt(seq, "record lacks its evaluation");
  auto it = state.evaluations.find(record.key);
  if (it != state.evaluations.end()) {
    // Only a regeneration after a rejected review may replace a record.
    if (it->second.status != EvaluationStatus::failed || record.attempts <= it->second.attempts) {
      corrupt(seq, "duplicate evaluation " + record.key.str());
    }
  }
  if (flagged) {
    ReviewItem item;
    item.item_id = review_item_id(state.id, record.key, record.attempts);
    item.kind = ReviewKind::flagged_evaluation;
    item.tournament_id = state.id;
    item.payload_ref = record.key.str();
    item.created_seq = seq;
    if (state.find_review_item(item.item_id)) corrupt(seq, "duplicate review item " + item.item_id);
    state.review_items.push_back(std::move(item));
  }
  state.evaluations[record.key] = std::move(record);
}

void apply_decision(TournamentState& state, const Event& event, std::int64_t seq, const std::string& timestamp) {
  auto item_id = take<std::string>(event.payload, "item_id", seq);
  auto decision = take<ReviewDecisionValue>(event.payload, "decision", seq);
  auto operator_id = take<std::string>(event.payload, "operator", seq);
  std::string decided_at = event.payload.value("decided_at", timestamp);
  ReviewItem* item = state.find_review_item(item_id);
  if (!item) corrupt(seq, "unknown review item " + item_id);
  if (item->status != ReviewStatus::pending) corrupt(seq, "review item " + item_id + " already decided");
  const bool accept = decision == ReviewDecisionValue::accept;
  item->status = accept ? ReviewStatus::accepted : ReviewStatus::rejected;
  item->decided_by = operator_id;
  item->decided_at = decided_at;
  if (item->kind == ReviewKind::gate_referral) {
    state.disposition = accept ? ChampionDisposition::advance : ChampionDisposition::archived;
    return;
  }
  EvaluationRecord* record = record_by_ref(state, item->payload_ref);
  if (!record || record->status != EvaluationStatus::flagged) {
    corrupt(seq, "review item " + item_id + " does not point at a flagged evaluation");
  }
  if (accept) {
    record->status = EvaluationStatus::accepted;
  } else {
    record->status = EvaluationStatus::failed;
    record->error = "rejected in review by " + operator_id;
  }
}

void apply_match(TournamentState& state, const Event& event, std::int64_t seq) {
  auto result = take<MatchResult>(event.payload, "result", seq);
  if (state.result_for(result.match_id)) corrupt(seq, "match " + result.match_id + " already completed");
  std::optional<Pairing> pairing;
  for_each_pairing(bracket_view(state), [&](const Pairing& p) {
    if (p.match_id == result.match_id) pairing = p;
  });
  if (!pairing || !pairing->ready()) corrupt(seq, "match " + result.match_id + " is not open");
  if (*pairing->a != result.concept_a || *pairing->b != result.concept_b) {
    corrupt(seq, "match " + result.match_id + " participants differ from the bracket");
  }
  if (result.winner != result.concept_a && result.winner != result.concept_b) {
    corrupt(seq, "match " + result.match_id + " winner is not a participant");
  }
  state.results.push_back(std::move(result));
}

void apply_gates(TournamentState& state, const Event& event, std::int64_t seq) {
  if (state.result) corrupt(seq, "gates already applied");
  auto result = take<TournamentResult>(event.payload, "result", seq);
  const bool advance = result.gate_decision.outcome == GateOutcome::advance;
  state.disposition = advance ? ChampionDisposition::advance : ChampionDisposition::human_review;
  if (!advance) {
    ReviewItem item;
    item.item_id = "gate-" + state.id;
    item.kind = ReviewKind::gate_referral;
    item.tournament_id = state.id;
    item.payload_ref = result.champion;
    item.created_seq = seq;
    state.review_items.push_back(std::move(item));
  }
  state.result = std::move(result);
}

}  // namespace

void apply_event(TournamentState& state, const Event& event, std::int64_t sequence, const std::string& timestamp) {
  if (sequence != state.last_sequence + 1) {
    corrupt(sequence, "expected sequence " + std::to_string(state.last_sequence + 1));
  }
  if (event.kind != EventKind::tournament_created && state.id.empty()) {
    corrupt(sequence, "log does not start with tournament_created");
  }
  const json& p = event.payload;
  switch (event.kind) {
    case EventKind::tournament_created:
      if (!state.id.empty()) corrupt(sequence, "tournament already created");
      state.id = take<std::string>(p, "id", sequence);
      state.config = take<TournamentConfig>(p, "config", sequence);
      state.concepts = take<std::vector<Concept>>(p, "concepts", sequence);
      state.entrants = take<std::vector<std::string>>(p, "entrants", sequence);
      state.rubric = take<Rubric>(p, "rubric", sequence);
      state.judge = take<std::string>(p, "judge", sequence);
      break;
    case EventKind::panel_composed:
      if (state.panel) corrupt(sequence, "panel already composed");
      state.panel = take<Panel>(p, "panel", sequence);
      break;
    case EventKind::evaluation_recorded:
    case EventKind::evaluation_flagged:
      apply_record(state, event, sequence);
      break;
    case EventKind::review_decision:
      apply_decision(state, event, sequence, timestamp);
      break;
    case EventKind::match_completed:
      apply_match(state, event, sequence);
      break;
    case EventKind::round_completed: {
      int stage = take<int>(p, "stage", sequence);
      if (std::find(state.completed_stages.begin(), state.completed_stages.end(), stage) !=
          state.completed_stages.end()) {
        corrupt(sequence, "stage " + std::to_string(stage) + " already completed");
      }
      state.completed_stages.push_back(stage);
      break;
    }
    case EventKind::gates_applied:
      apply_gates(state, event, sequence);
      break;
  }
  state.last_sequence = sequence;
  refresh_status(state);
}

Event make_created_event(const std::string& id, const TournamentConfig& config, const std::vector<Concept>& concepts,
                         const Rubric& rubric, const std::string& judge) {
  if (id.empty()) fail(ErrorKind::input, "tournament id must not be empty");
  config.validate();
  rubric.validate();
  for (const auto& c : concepts) c.validate();
  auto entrants = seed_entrants(concepts, config.seeding, config.ratings, config.manual_order, config.seed);
  return {EventKind::tournament_created,
          {{"id", id}, {"config", config}, {"concepts", concepts}, {"entrants", entrants}, {"rubric", rubric},
           {"judge", judge}}};
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

namespace {

std::uint64_t evaluation_seed(std::uint64_t seed, const EvaluationKey& key) {
  return stable_hash(seed, {"evaluation", key.match_id, std::to_string(key.pass), key.persona_id, key.concept_id});
}

EvaluationRecord to_record(EvaluationKey key, RegenerationOutcome outcome) {
  EvaluationRecord record;
  record.key = std::move(key);
  if (auto* a = std::get_if<Accepted>(&outcome)) {
    record.status = EvaluationStatus::accepted;
    record.attempts = a->evaluation.attempt;
    record.evaluation = std::move(a->evaluation);
  } else if (auto* f = std::get_if<FlaggedForReview>(&outcome)) {
    record.status = EvaluationStatus::flagged;
    record.attempts = f->evaluation.attempt;
    record.evaluation = std::move(f->evaluation);
  } else {
    auto& failed = std::get<Failed>(outcome);
    record.status = EvaluationStatus::failed;
    record.attempts = failed.attempts;
    record.error = failed.error;
    record.evaluation = std::move(failed.last_evaluation);
  }
  return record;
}

Event record_event(const EvaluationRecord& record) {
  auto kind = record.status == EvaluationStatus::flagged ? EventKind::evaluation_flagged
                                                         : EventKind::evaluation_recorded;
  return {kind, {{"record", record}}};
}

std::vector<EvaluationRecord> match_records(const TournamentState& state, const std::string& match_id) {
  std::vector<EvaluationRecord> out;
  auto it = state.evaluations.lower_bound(EvaluationKey{match_id, 0, "", ""});
  for (; it != state.evaluations.end() && it->first.match_id == match_id; ++it) out.push_back(it->second);
  return out;
}

PanelMember find_member(const Panel& panel, const std::string& persona_id) {
  for (auto& m : panel.all_members()) {
    if (member_id(m) == persona_id) return m;
  }
  fail(ErrorKind::lookup, "persona '" + persona_id + "' is not on the panel");
}

}  // namespace

TournamentEngine::TournamentEngine(TournamentState& state, JudgeBackend& backend, const SlopDetector& detector,
                                   EventSink* sink, const PublisherRegistry& registry,
                                   const ImprintRegistry& imprints)
    : state_(state), backend_(backend), detector_(detector), sink_(sink), registry_(registry), imprints_(imprints) {}

std::int64_t TournamentEngine::emit(const Event& event, const std::string& timestamp) {
  std::int64_t seq = sink_ ? sink_->append(event) : state_.last_sequence + 1;
  apply_event(state_, event, seq, timestamp.empty() ? utc_timestamp() : timestamp);
  return seq;
}

void TournamentEngine::create(const std::string& id, const TournamentConfig& config,
                              const std::vector<Concept>& concepts, const Rubric& rubric) {
  if (!state_.id.empty()) fail(ErrorKind::state, "engine already holds tournament " + state_.id);
  auto created = make_created_event(id, config, concepts, rubric, backend_.describe());
  Panel panel = configured_panel(config);
  emit(created);
  emit({EventKind::panel_composed, {{"panel", panel}}});
}

Panel TournamentEngine::configured_panel(const TournamentConfig& config) const {
  if (config.imprint.empty()) fail(ErrorKind::configuration, "an imprint is needed to compose a panel");
  const auto& profile = imprints_.find(config.imprint);
  return compose_and_repair(profile, config.panel_size, registry_, stable_hash(config.seed, {"panel"}),
                            config.max_repair_rounds);
}

void TournamentEngine::create(const std::string& id, const TournamentConfig& config,
                              const std::vector<Concept>& concepts, const Rubric& rubric, const Panel& panel) {
  if (!state_.id.empty()) fail(ErrorKind::state, "engine already holds tournament " + state_.id);
  auto created = make_created_event(id, config, concepts, rubric, backend_.describe());
  panel.validate();
  emit(created);
  emit({EventKind::panel_composed, {{"panel", panel}}});
}

void TournamentEngine::evaluate_pairings(const std::vector<Pairing>& pairings, int pass) {
  struct Job {
    EvaluationKey key;
    std::size_t member;
  };
  const auto members = state_.panel->all_members();
  std::vector<Job> jobs;
  for (const auto& p : pairings) {
    for (std::size_t m = 0; m < members.size(); ++m) {
      for (const auto* cid : {&*p.a, &*p.b}) {
        EvaluationKey key{p.match_id, pass, member_id(members[m]), *cid};
        if (!state_.evaluations.count(key)) jobs.push_back({std::move(key), m});
      }
    }
  }
  if (jobs.empty()) return;

  std::vector<std::optional<EvaluationRecord>> done(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      const Concept& book = state_.concept_by_id(job.key.concept_id);
      try {
        auto outcome =
            evaluate_with_regeneration(backend_, detector_, members[job.member], book, state_.rubric,
                                       state_.config.max_attempts, evaluation_seed(state_.config.seed, job.key));
        done[i] = to_record(job.key, std::move(outcome));
      } catch (const std::exception& e) {
        done[i] = to_record(job.key, Failed{state_.config.max_attempts, e.what(), std::nullopt});
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(state_.config.concurrency), jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // Results are appended in job order whatever order they finished in.
  for (auto& record : done) emit(record_event(*record));
}

TournamentStatus TournamentEngine::run() {
  if (state_.id.empty()) fail(ErrorKind::state, "no tournament to run");
  // A log cut between creation and panel composition: compose it now.
  if (!state_.panel) emit({EventKind::panel_composed, {{"panel", configured_panel(state_.config)}}});
  const auto& config = state_.config;
  const bool branch_local = config.format == TournamentFormat::single_elim;
  std::set<std::string> blocked;

  while (!state_.result) {
    // Also covers a log cut between a stage's last match and its marker.
    mark_completed_stages();
    auto open = open_pairings(state_);
    if (open.empty()) {
      finish();
      break;
    }
    std::vector<Pairing> candidates;
    int blocked_min = INT_MAX;
    for (auto& p : open) {
      if (blocked.count(p.match_id)) {
        blocked_min = std::min(blocked_min, p.stage);
      } else {
        candidates.push_back(std::move(p));
      }
    }
    if (candidates.empty()) break;
    int stage = INT_MAX;
    for (const auto& p : candidates) stage = std::min(stage, p.stage);
    // Outside single elimination every stage is a barrier.
    if (!branch_local && blocked_min < stage) break;

    std::vector<Pairing> batch;
    for (auto& p : candidates) {
      if (p.stage == stage) batch.push_back(std::move(p));
    }
    evaluate_pairings(batch, 0);

    for (const auto& p : batch) {
      auto records = match_records(state_, p.match_id);
      const bool rerun_started =
          std::any_of(records.begin(), records.end(), [](const auto& r) { return r.key.pass == 1; });
      if (config.tiebreak == Tiebreak::re_evaluation && rerun_started) {
        // A resumed run may have stopped part-way through the rerun.
        evaluate_pairings({p}, 1);
        records = match_records(state_, p.match_id);
      }
      auto decision = decide_match(p, records, state_.rubric, config.tiebreak, config.seed);
      if (decision.kind == MatchDecision::Kind::needs_re_evaluation) {
        evaluate_pairings({p}, 1);
        decision = decide_match(p, match_records(state_, p.match_id), state_.rubric, config.tiebreak, config.seed);
      }
      if (decision.kind == MatchDecision::Kind::paused) {
        blocked.insert(p.match_id);
        continue;
      }
      emit({EventKind::match_completed, {{"result", *decision.result}}});
    }
  }
  return state_.status;
}

void TournamentEngine::mark_completed_stages() {
  std::map<int, bool> complete;
  for_each_pairing(bracket_view(state_), [&](const Pairing& p) {
    auto [it, inserted] = complete.emplace(p.stage, true);
    if (!p.bye && !state_.result_for(p.match_id)) it->second = false;
  });
  for (const auto& [stage, done] : complete) {
    if (!done) continue;
    if (std::find(state_.completed_stages.begin(), state_.completed_stages.end(), stage) !=
        state_.completed_stages.end()) {
      continue;
    }
    emit({EventKind::round_completed, {{"stage", stage}}});
  }
}

std::vector<Evaluation> champion_evaluations(const TournamentState& state) {
  if (!state.result) fail(ErrorKind::state, "tournament " + state.id + " has not finished");
  const auto& champion = state.result->champion;
  const MatchResult* last = nullptr;
  for (const auto& r : state.results) {
    if (r.concept_a == champion || r.concept_b == champion) last = &r;
  }
  std::vector<Evaluation> out;
  if (!last) return out;
  for (const auto& ref : last->evaluations) {
    if (ref.concept_id != champion || ref.pass != 0 || ref.status != EvaluationStatus::accepted) continue;
    auto it = state.evaluations.find({last->match_id, 0, ref.persona_id, ref.concept_id});
    if (it != state.evaluations.end() && it->second.evaluation) out.push_back(*it->second.evaluation);
  }
  return out;
}

void TournamentEngine::finish() {
  TournamentResult result;
  result.bracket = bracket_view(state_);
  result.match_results = state_.results;
  result.final_ranking = compute_standings(result.bracket, state_.results);
  result.champion = result.final_ranking.front();
  result.revisit_flags = flag_revisit(result.bracket, state_.results, result.final_ranking);

  const MatchResult* last = nullptr;
  for (const auto& r : state_.results) {
    if (r.concept_a == result.champion || r.concept_b == result.champion) last = &r;
  }
  if (!last) fail(ErrorKind::state, "champion " + result.champion + " never played");

  // Gates look at the champion's final match, as decided at the time.
  std::vector<Evaluation> evaluations;
  for (const auto& ref : last->evaluations) {
    if (ref.concept_id != result.champion || ref.pass != 0 || ref.status != EvaluationStatus::accepted) continue;
    evaluations.push_back(*state_.evaluations.at({last->match_id, 0, ref.persona_id, ref.concept_id}).evaluation);
  }
  std::set<std::string> readers;
  for (const auto& r : state_.panel->members) readers.insert(r.id);
  result.gate_decision =
      apply_quality_gates(last->aggregate_of(result.champion), evaluations, readers, state_.config.gates);
  emit({EventKind::gates_applied, {{"result", result}}});
}

TournamentStatus TournamentEngine::decide(const std::string& item_id, ReviewDecisionValue decision,
                                          const std::string& operator_id, const std::string& timestamp) {
  const ReviewItem* item = state_.find_review_item(item_id);
  if (!item) fail(ErrorKind::lookup, "unknown review item '" + item_id + "'");
  if (item->status != ReviewStatus::pending) {
    fail(ErrorKind::state, "review item " + item_id + " was already " + std::string(enum_name(item->status)));
  }
  if (operator_id.empty()) fail(ErrorKind::input, "a decision needs an operator id");
  const ReviewItem snapshot = *item;
  emit({EventKind::review_decision,
        {{"item_id", item_id},
         {"decision", decision},
         {"operator", operator_id},
         {"decided_at", timestamp.empty() ? utc_timestamp() : timestamp}}},
       timestamp);

  if (snapshot.kind == ReviewKind::flagged_evaluation && decision == ReviewDecisionValue::reject) {
    EvaluationRecord* record = nullptr;
    for (auto& [key, r] : state_.evaluations) {
      if (key.str() == snapshot.payload_ref) record = &r;
    }
    if (record && record->attempts < state_.config.max_attempts) {
      // One fresh attempt; exhausting the budget leaves the record failed.
      const int attempt = record->attempts + 1;
      auto key = record->key;
      auto outcome = evaluate_with_regeneration(backend_, detector_, find_member(*state_.panel, key.persona_id),
                                                state_.concept_by_id(key.concept_id), state_.rubric, attempt,
                                                evaluation_seed(state_.config.seed, key), attempt);
      auto replacement = to_record(key, std::move(outcome));
      if (replacement.attempts <= record->attempts) replacement.attempts = attempt;
      emit(record_event(replacement));
    }
  }
  if (state_.result) return state_.status;
  return run();
}

TournamentState run_tournament(const std::vector<Concept>& concepts, const TournamentConfig& config,
                               const Panel& panel, JudgeBackend& backend, const Rubric& rubric,
                               const SlopDetector& detector, const std::string& id) {
  TournamentState state;
  TournamentEngine engine(state, backend, detector);
  engine.create(id, config, concepts, rubric, panel);
  engine.run();
  return state;
}

// ---------------------------------------------------------------------------
// Synthetic concepts and the funnel
// ---------------------------------------------------------------------------

std::vector<Concept> synthetic_concepts(int count, std::uint64_t seed, const std::string& imprint) {
  if (count < 1) fail(ErrorKind::sizing, "concept count must be positive");
  static constexpr std::array<std::string_view, 16> adjectives{
      "Silent", "Broken", "Hidden", "Last",    "Burning", "Quiet", "Paper", "Hollow",
      "Northern", "Glass", "Winter", "Crimson", "Distant", "Salt", "Iron",  "Golden"};
  static constexpr std::array<std::string_view, 16> nouns{
      "Harbor", "Orchard", "Archive", "Compass", "Lantern", "Garden", "Frontier", "Ledger",
      "Signal", "Tide",    "Atlas",   "Kingdom", "Engine",  "Shore",  "Bridge",   "Mirror"};
  static constexpr std::array<std::string_view, 8> leads{
      "A retired cartographer", "Two estranged sisters", "A night-shift nurse",   "An apprentice clockmaker",
      "A small-town journalist", "A disgraced chef",     "A teenage programmer", "A widowed beekeeper"};
  static constexpr std::array<std::string_view, 6> turns{
      "uncovers a map of a coastline that does not exist",
      "must rebuild a failing family business before winter",
      "is drawn into a decades-old disappearance",
      "learns the town's founding story was invented",
      "races to stop a flood only they saw coming",
      "inherits a house full of other people's letters"};

  const auto& clusters = GenreClusters::shipped();
  std::vector<std::string> genres;
  for (const auto& cluster : clusters.clusters()) {
    for (auto& g : clusters.genres_in(cluster)) genres.push_back(std::move(g));
  }
  if (genres.empty()) fail(ErrorKind::configuration, "genre vocabulary is empty");

  const int width = std::max(3, static_cast<int>(std::to_string(count).size()));
  std::vector<Concept> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    std::string digits = std::to_string(i);
    Concept c;
    c.id = "c" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
    Rng rng(stable_hash(seed, {"concept", c.id}));
    c.title = "The " + std::string(adjectives[rng.index(adjectives.size())]) + " " +
              std::string(nouns[rng.index(nouns.size())]);
    c.imprint = imprint;
    std::size_t tags = 1 + rng.index(2);
    while (c.genre_tags.size() < tags) {
      const auto& g = genres[rng.index(genres.size())];
      if (std::find(c.genre_tags.begin(), c.genre_tags.end(), g) == c.genre_tags.end()) c.genre_tags.push_back(g);
    }
    c.description = std::string(leads[rng.index(leads.size())]) + " " +
                    std::string(turns[rng.index(turns.size())]) + ". A " + human_label(c.genre_tags.front()) +
                    " story told across one long season.";
    out.push_back(std::move(c));
  }
  return out;
}

FunnelResult run_funnel(const std::vector<Concept>& concepts, const TournamentConfig& base, const Panel& panel,
                        JudgeBackend& backend, const Rubric& rubric, const FunnelConfig& funnel,
                        const SlopDetector& detector) {
  const int n = static_cast<int>(concepts.size());
  if (funnel.stage_one_keep < 2 || funnel.stage_one_keep > n) fail(ErrorKind::sizing, "stage_one_keep out of range");
  if (funnel.stage_two_keep < 1 || funnel.stage_two_keep > funnel.stage_one_keep) {
    fail(ErrorKind::sizing, "stage_two_keep out of range");
  }
  auto finished = [](const TournamentState& s, const char* stage) {
    if (!s.result) fail(ErrorKind::state, std::string("funnel ") + stage + " did not finish (paused for review)");
    return *s.result;
  };

  FunnelResult out;
  TournamentConfig one = base;
  one.format = TournamentFormat::single_elim;
  out.stage_one = finished(run_tournament(concepts, one, panel, backend, rubric, detector, "funnel-1"), "stage one");
  out.stage_one_survivors.assign(out.stage_one.final_ranking.begin(),
                                 out.stage_one.final_ranking.begin() + funnel.stage_one_keep);

  std::vector<Concept> field;
  for (const auto& id : out.stage_one_survivors) {
    for (const auto& c : concepts) {
      if (c.id == id) field.push_back(c);
    }
  }
  TournamentConfig two = base;
  two.format = funnel.stage_two_format;
  two.seeding = Seeding::random;
  two.manual_order.clear();
  out.stage_two = finished(run_tournament(field, two, panel, backend, rubric, detector, "funnel-2"), "stage two");
  out.survivors.assign(out.stage_two.final_ranking.begin(),
                       out.stage_two.final_ranking.begin() + funnel.stage_two_keep);
  out.survival_rate = static_cast<double>(out.survivors.size()) / static_cast<double>(n);
  return out;
}

}  // namespace readerpanel
