#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "readerpanel/config.hpp"
#include "readerpanel/judge.hpp"
#include "readerpanel/panel.hpp"
#include "readerpanel/store.hpp"
#include "readerpanel/tournament.hpp"

namespace readerpanel::testing {

// A reader with no noise, medium price sensitivity and no genre opinions.
inline ReaderPersona plain_reader(const std::string& id) {
  ReaderPersona p;
  p.id = id;
  p.location = "Leeds";
  p.books_per_year = 12;
  p.preferred_genres = {"fantasy"};
  p.format_preferences = {BookFormat::physical};
  p.life_stage = "working";
  p.consistency_score = 1.0;
  p.reliability_score = 1.0;
  return p;
}

inline Concept make_concept(const std::string& id, const std::string& title, const std::string& description,
                            std::vector<std::string> tags = {"thriller"}) {
  Concept c;
  c.id = id;
  c.title = title;
  c.description = description;
  c.genre_tags = std::move(tags);
  return c;
}

inline Panel small_panel(std::uint64_t seed = 1, int size = 10, const std::string& imprint = "nimble_ultra") {
  return compose_and_repair(ImprintRegistry::shipped().find(imprint), size, PublisherRegistry::shipped(), seed);
}

inline TournamentConfig basic_config(TournamentFormat format = TournamentFormat::single_elim,
                                     std::uint64_t seed = 7) {
  TournamentConfig c;
  c.format = format;
  c.imprint = "nimble_ultra";
  c.seed = seed;
  c.concurrency = 2;
  return c;
}

// Backend driven by a callback; counts calls.
class ScriptedJudge : public JudgeBackend {
 public:
  using Fn = std::function<Evaluation(const PanelMember&, const Concept&, const Rubric&, const EvaluationContext&)>;
  explicit ScriptedJudge(Fn fn) : fn_(std::move(fn)) {}

  Evaluation evaluate(const PanelMember& member, const Concept& book, const Rubric& rubric,
                      const EvaluationContext& context) override {
    ++calls;
    return fn_(member, book, rubric, context);
  }
  std::string describe() const override { return "scripted"; }

  std::atomic<int> calls{0};

 private:
  Fn fn_;
};

// Evaluation with varied scores and specific, concept-independent reasoning.
inline Evaluation clean_evaluation(const PanelMember& member, const Concept& book, const Rubric& rubric,
                                   double base, const EvaluationContext& context = {}) {
  Evaluation e;
  e.persona_id = member_id(member);
  e.concept_id = book.id;
  e.attempt = context.attempt;
  double step = 0.0;
  for (const auto& c : rubric.criteria) {
    e.criterion_scores[c.name] = std::clamp(base + step, c.min_score, c.max_score);
    step = step > 0 ? -step : -step + 0.9;
  }
  e.reasoning =
      "Chapter 3 gives Maya a $12.99 problem worth reading, and quoting \"the harbour at dusk\" shows a "
      "voice that carries past page 40. Pricing at $12.99 is fair value for the cost.";
  e.would_read = base >= 6.0;
  return e;
}

// Evaluation tripping clustering, circular reasoning and repetitive phrasing.
inline Evaluation sloppy_evaluation(const PanelMember& member, const Concept& book, const Rubric& rubric,
                                    const EvaluationContext& context = {}) {
  Evaluation e;
  e.persona_id = member_id(member);
  e.concept_id = book.id;
  e.attempt = context.attempt;
  for (const auto& c : rubric.criteria) e.criterion_scores[c.name] = 7.0;
  std::string copy = book.text();
  const std::string filler =
      " It is worth noting that it arguably delves into a rich tapestry, quite a testament to a myriad of themes.";
  e.reasoning = copy + filler + " " + copy + " " + copy + filler + " " + copy + " " + copy;
  e.would_read = true;
  return e;
}

template <NamedEnum E>
std::vector<std::string> random_subset(Rng& rng, std::size_t max_size = 2) {
  std::vector<std::string> names;
  for (auto v : all_values<E>()) names.emplace_back(enum_name(v));
  rng.shuffle(names);
  names.resize(1 + rng.index(std::min(max_size, names.size())));
  std::sort(names.begin(), names.end());
  return names;
}

// Satisfiable audience profile over a random subset of attributes.
inline DemographicProfile random_profile(std::uint64_t seed) {
  static const std::vector<std::string> kGenres{"thriller",   "romance",        "fantasy",      "naval history",
                                                "technology", "popular science", "middle grade", "spirituality"};
  Rng rng(seed);
  DemographicProfile p;
  if (rng.bernoulli(0.7)) p.constraints["age_group"].allowed = random_subset<AgeGroup>(rng);
  if (rng.bernoulli(0.5)) p.constraints["reading_level"].allowed = random_subset<ReadingLevel>(rng);
  if (rng.bernoulli(0.3)) p.constraints["gender"].allowed = random_subset<Gender>(rng, 1);
  if (rng.bernoulli(0.4)) p.constraints["education"].allowed = random_subset<Education>(rng);
  if (rng.bernoulli(0.3)) p.constraints["reading_mood"].allowed = random_subset<ReadingMood>(rng, 1);
  if (rng.bernoulli(0.3)) p.constraints["price_sensitivity"].allowed = random_subset<Level>(rng, 1);
  if (rng.bernoulli(0.6)) p.constraints["preferred_genres"].include = {kGenres[rng.index(kGenres.size())]};
  return p;
}

// Exhaustive oracle: does any perfect matching of `players` avoid every played pair?
inline bool rematch_free_matching_exists(std::vector<std::string> players,
                                         const std::set<std::pair<std::string, std::string>>& played) {
  if (players.empty()) return true;
  if (players.size() % 2 == 1) return false;
  std::string first = players.front();
  for (std::size_t j = 1; j < players.size(); ++j) {
    const auto& other = players[j];
    if (played.count({std::min(first, other), std::max(first, other)})) continue;
    std::vector<std::string> rest;
    for (std::size_t k = 1; k < players.size(); ++k) {
      if (k != j) rest.push_back(players[k]);
    }
    if (rematch_free_matching_exists(rest, played)) return true;
  }
  return false;
}

// Synthetic result: `a_wins` picks the winner, aggregates follow from it.
inline MatchResult fake_result(const Pairing& p, bool a_wins, double winner_score = 7.0, double loser_score = 5.0) {
  MatchResult r;
  r.match_id = p.match_id;
  r.side = p.side;
  r.round = p.round;
  r.stage = p.stage;
  r.concept_a = *p.a;
  r.concept_b = *p.b;
  r.aggregate_a.value = a_wins ? winner_score : loser_score;
  r.aggregate_b.value = a_wins ? loser_score : winner_score;
  r.winner = a_wins ? *p.a : *p.b;
  return r;
}

inline std::vector<Pairing> all_pairings(const Bracket& b) {
  std::vector<Pairing> out;
  for (const auto& round : b.rounds) out.insert(out.end(), round.begin(), round.end());
  if (b.losers_bracket) {
    for (const auto& round : *b.losers_bracket) out.insert(out.end(), round.begin(), round.end());
  }
  return out;
}

// Plays a bracket to completion without a judge; `a_wins` decides each match.
inline std::pair<Bracket, std::vector<MatchResult>> simulate_bracket(
    TournamentFormat format, const std::vector<std::string>& entrants,
    const std::function<bool(const Pairing&)>& a_wins, int swiss_rounds = 0) {
  std::vector<MatchResult> results;
  std::set<std::string> decided;
  for (;;) {
    auto bracket = build_bracket(format, entrants, results, swiss_rounds);
    bool progressed = false;
    for (const auto& p : all_pairings(bracket)) {
      if (!p.ready() || decided.count(p.match_id)) continue;
      results.push_back(fake_result(p, a_wins(p)));
      decided.insert(p.match_id);
      progressed = true;
    }
    if (!progressed) return {bracket, results};
  }
}

inline std::vector<std::string> numbered_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 1; i <= n; ++i) ids.push_back((i < 10 ? "c0" : "c") + std::to_string(i));
  return ids;
}

// Runs a tournament to completion (or pause) through a store writer.
inline TournamentState run_stored(EventStore& store, const std::string& id, const std::vector<Concept>& concepts,
                                  const TournamentConfig& config, JudgeBackend& judge,
                                  const SlopDetector& detector = SlopDetector()) {
  TournamentState state;
  TournamentWriter writer(store, id, true);
  TournamentEngine engine(state, judge, detector, &writer);
  engine.create(id, config, concepts, default_rubric(), small_panel(config.seed, config.panel_size, config.imprint));
  engine.run();
  return state;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("readerpanel-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace readerpanel::testing
