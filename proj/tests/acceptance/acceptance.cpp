// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "readerpanel/serialize.hpp"
#include "readerpanel/store.hpp"

using namespace readerpanel;
namespace t = readerpanel::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  // Records a failed expectation; keeps the first few messages.
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    if (ok || failures < 5) detail << (failures ? "; " : "") << what;
    ok = false;
    ++failures;
  }
  int failures = 0;
};

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

std::vector<MemberScore> members(std::initializer_list<double> values) {
  std::vector<MemberScore> out;
  int i = 0;
  for (double v : values) out.push_back({"m" + std::to_string(i++), v});
  return out;
}

// ---------------------------------------------------------------------------

void aggregation(Outcome& o) {
  // Hand oracle: plain means and the segment-weighted mean written out.
  double t4 = aggregate_panel(members({9, 7, 9, 7, 9})).value;
  double t5 = aggregate_panel(members({7, 6, 6.5, 9, 8.5})).value;
  std::vector<MemberScore> segs{{"young", 7.3}, {"middle", 8.0}, {"older", 8.3}, {"senior", 8.3}};
  SegmentWeights w{{"young", 100}, {"middle", 80}, {"older", 50}, {"senior", 40}};
  double t3 = aggregate_panel(segs, w).value;
  double t3_oracle = (7.3 * 100 + 8.0 * 80 + 8.3 * 50 + 8.3 * 40) / 270.0;
  o.expect(near(t4, 8.2, 1e-9), "five-member aggregate " + fmt(t4));
  o.expect(near(t5, 7.4, 1e-9), "second aggregate " + fmt(t5));
  o.expect(near(t3, t3_oracle, 1e-12), "segment aggregate vs oracle " + fmt(t3));
  o.expect(near(t3, 7.9, 0.1), "segment aggregate not within 0.1 of 7.9: " + fmt(t3));
  if (o.ok) o.detail << "8.2, 7.4, segment " << fmt(t3);
}

void rubric(Outcome& o) {
  auto r = default_rubric();
  const std::vector<std::pair<std::string, double>> expected{
      {"Market Appeal", 1.0}, {"Originality", 0.8}, {"Execution Potential", 0.9}, {"Audience Fit", 1.0}};
  o.expect(r.criteria.size() == expected.size(), "criterion count " + std::to_string(r.criteria.size()));
  for (std::size_t i = 0; i < std::min(r.criteria.size(), expected.size()); ++i) {
    const auto& c = r.criteria[i];
    o.expect(c.name == expected[i].first, "criterion " + std::to_string(i) + " is " + c.name);
    o.expect(c.weight == expected[i].second, c.name + " weight " + fmt(c.weight));
    o.expect(c.min_score == 0.0 && c.max_score == 10.0, c.name + " range");
  }
  if (o.ok) o.detail << "4 criteria, weights 1.0/0.8/0.9/1.0, range 0-10";
}

void slop_anchors(Outcome& o) {
  o.expect(check_score_clustering({7, 7, 7, 7}).score == 1.0, "clustering(7,7,7,7)");
  o.expect(disposition_for(0.4 - 1e-12) == Disposition::accept, "just below 0.4 not accepted");
  o.expect(disposition_for(0.4) == Disposition::flag, "0.4 not flagged");
  o.expect(disposition_for(0.6 - 1e-12) == Disposition::flag, "just below 0.6 not flagged");
  o.expect(disposition_for(0.6) == Disposition::reject, "0.6 not rejected");

  std::vector<CheckResult> parts;
  for (auto name : all_values<CheckName>()) {
    CheckResult r;
    r.check_name = name;
    r.score = name == CheckName::score_clustering ? 1.0 : 0.0;
    parts.push_back(r);
  }
  // Oracle: weights 1.0 + 0.8 + 1.2 + 1.5 + 1.0 = 5.5, clustering carries 1.5.
  double composite = composite_slop(parts).composite;
  o.expect(near(composite, 1.5 / 5.5, 1e-9), "clustering-only composite " + fmt(composite));

  const std::string x = "A lighthouse keeper finds a ledger of ships that never sailed.";
  o.expect(check_circular_reasoning(x, x).score == 1.0, "circular(x, x)");

  // Oracle TTR: tokens the/cat/sat/on/the/mat, five distinct.
  double ttr = check_repetitive_phrasing("the cat sat on the mat").components.at("ttr");
  o.expect(near(ttr, 5.0 / 6.0, 1e-12), "ttr " + fmt(ttr));
  if (o.ok) o.detail << "clustering 1.0, boundaries 0.4/0.6, composite " << fmt(composite) << ", ttr 5/6";
}

void tournament_laws(Outcome& o) {
  MockJudge judge(17);
  SlopDetector detector;
  int runs = 0;
  for (int n = 2; n <= 32; ++n) {
    auto concepts = synthetic_concepts(n, 1000 + static_cast<std::uint64_t>(n));
    for (auto format : all_values<TournamentFormat>()) {
      auto config = t::basic_config(format, static_cast<std::uint64_t>(n));
      config.panel_size = 5;
      config.concurrency = 4;
      TournamentState s;
      try {
        s = run_tournament(concepts, config, t::small_panel(static_cast<std::uint64_t>(n), 5), judge,
                           default_rubric(), detector);
      } catch (const Error& e) {
        o.expect(false, std::string(enum_name(format)) + " n=" + std::to_string(n) + ": " + e.what());
        continue;
      }
      ++runs;
      const std::string tag = std::string(enum_name(format)) + " n=" + std::to_string(n);
      if (s.status != TournamentStatus::finished) {
        o.expect(false, tag + " did not finish");
        continue;
      }
      const int m = static_cast<int>(s.results.size());
      const auto& bracket = s.result->bracket;
      switch (format) {
        case TournamentFormat::single_elim:
          o.expect(m == n - 1, tag + " matches " + std::to_string(m));
          o.expect(static_cast<int>(bracket.rounds.size()) == ceil_log2(n), tag + " rounds");
          break;
        case TournamentFormat::double_elim:
          o.expect(m == 2 * n - 2 || m == 2 * n - 1, tag + " matches " + std::to_string(m));
          break;
        case TournamentFormat::round_robin: {
          o.expect(m == n * (n - 1) / 2, tag + " matches " + std::to_string(m));
          std::set<std::pair<std::string, std::string>> pairs;
          for (const auto& r : s.results) pairs.emplace(std::min(r.concept_a, r.concept_b), std::max(r.concept_a, r.concept_b));
          o.expect(static_cast<int>(pairs.size()) == m, tag + " repeated pair");
          break;
        }
        case TournamentFormat::swiss: {
          if (n > 10) break;
          std::set<std::pair<std::string, std::string>> seen;
          for (const auto& round : bracket.rounds) {
            std::vector<std::string> field;
            std::vector<std::pair<std::string, std::string>> now;
            for (const auto& p : round) {
              if (p.bye) continue;
              field.push_back(*p.a);
              field.push_back(*p.b);
              now.emplace_back(std::min(*p.a, *p.b), std::max(*p.a, *p.b));
            }
            bool rematch = false;
            for (const auto& pr : now) rematch |= seen.count(pr) > 0;
            if (t::rematch_free_matching_exists(field, seen)) o.expect(!rematch, tag + " avoidable rematch");
            seen.insert(now.begin(), now.end());
          }
          break;
        }
      }
    }
  }
  // Swiss pairing against the exhaustive oracle on arbitrary histories.
  Rng rng(99);
  int oracle_checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    int n = 2 * (1 + static_cast<int>(rng.index(5)));
    auto ids = t::numbered_ids(n);
    rng.shuffle(ids);
    std::set<std::pair<std::string, std::string>> played;
    double density = rng.uniform(0.0, 0.8);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng.bernoulli(density)) played.emplace(std::min(ids[i], ids[j]), std::max(ids[i], ids[j]));
      }
    }
    if (!t::rematch_free_matching_exists(ids, played)) continue;
    ++oracle_checked;
    for (auto [i, j] : pair_swiss_round(ids, played)) {
      o.expect(!played.count({std::min(ids[i], ids[j]), std::max(ids[i], ids[j])}), "swiss oracle trial " +
                                                                                          std::to_string(trial));
    }
  }
  if (o.ok) o.detail << runs << " mock-judge tournaments over N=2..32, " << oracle_checked << " oracle pairings";
}

void funnel(Outcome& o) {
  auto concepts = synthetic_concepts(128, 6);
  MockJudge judge(6);
  auto config = t::basic_config(TournamentFormat::single_elim, 6);
  config.concurrency = 4;
  FunnelConfig f;
  f.stage_one_keep = 16;
  f.stage_two_format = TournamentFormat::round_robin;
  f.stage_two_keep = 8;
  auto out = run_funnel(concepts, config, t::small_panel(6), judge, default_rubric(), f);
  o.expect(out.stage_one.match_results.size() == 127, "stage one matches");
  o.expect(out.stage_one_survivors.size() == 16, "stage one survivors");
  o.expect(out.survivors.size() == 8, "survivors");
  o.expect(out.survival_rate == 8.0 / 128.0, "survival rate " + fmt(out.survival_rate));
  o.expect(out.survival_rate == 0.0625, "survival rate not 6.25%");
  if (o.ok) o.detail << "128 -> 16 -> 8, survival " << out.survival_rate * 100 << "%";
}

void diversity(Outcome& o) {
  const auto& imprints = ImprintRegistry::shipped().profiles();
  Rng rng(2024);
  double worst = 0.0;
  int built = 0;
  for (std::uint64_t seed = 0; built < 200 && seed < 5000; ++seed) {
    const auto& base = imprints[rng.index(imprints.size())];
    ImprintProfile imprint{base.imprint, t::random_profile(seed), base.domain_topics};
    int size = 10 + static_cast<int>(rng.index(41));
    Panel panel;
    try {
      panel = compose_and_repair(imprint, size, PublisherRegistry::shipped(), seed);
    } catch (const Error& e) {
      o.expect(false, "seed " + std::to_string(seed) + " size " + std::to_string(size) + ": " + e.what());
      ++built;
      continue;
    }
    ++built;
    auto report = check_diversity(panel);
    o.expect(report.passed, "seed " + std::to_string(seed) + " violations " + std::to_string(report.violations.size()));
    std::map<MemberOrigin, int> counts;
    for (auto origin : panel.origins) ++counts[origin];
    const double shares[] = {0.4, 0.3, 0.2, 0.1};
    const int actual[] = {counts[MemberOrigin::anchored], counts[MemberOrigin::adjacent],
                          counts[MemberOrigin::wildcard], static_cast<int>(panel.experts.size())};
    for (int k = 0; k < 4; ++k) {
      double dev = std::fabs(actual[k] - shares[k] * size);
      worst = std::max(worst, dev);
      o.expect(dev < 1.0, "seed " + std::to_string(seed) + " quota deviation " + fmt(dev));
    }
    o.expect(panel.size() == size, "seed " + std::to_string(seed) + " panel size");
  }
  if (o.ok) o.detail << built << " panels, all five constraints met, worst quota deviation " << fmt(worst);
}

void gates(Outcome& o) {
  auto build = [](double value, std::vector<double> scores) {
    AggregateScore a;
    a.value = value;
    std::vector<Evaluation> evals;
    std::set<std::string> readers;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      std::string id = "r" + std::to_string(i);
      a.per_member_values.push_back({id, scores[i]});
      Evaluation e;
      e.persona_id = id;
      e.would_read = true;
      evals.push_back(e);
      readers.insert(id);
    }
    return std::make_tuple(a, evals, readers);
  };
  auto [a1, e1, r1] = build(6.5, {7, 7, 7, 7, 7});
  auto d1 = apply_quality_gates(a1, e1, r1);
  o.expect(d1.min_score_pass && d1.outcome == GateOutcome::advance, "aggregate 6.5 does not pass");
  auto [a2, e2, r2] = build(7.0, {7, 7, 5.0, 5.0, 4});
  auto d2 = apply_quality_gates(a2, e2, r2);
  o.expect(d2.consensus_share == 0.4, "member at 5.0 counted toward consensus (share " + fmt(d2.consensus_share) + ")");
  auto [a3, e3, r3] = build(9.0, {9, 9, 9, 9, 9});
  e3[4].fatal_flaw = "plagiarism concern";
  auto d3 = apply_quality_gates(a3, e3, r3);
  o.expect(d3.outcome == GateOutcome::human_review && !d3.fatal_flaw_free, "fatal flaw did not force review");
  if (o.ok) o.detail << "6.5 passes, 5.0 excluded, fatal flaw -> human_review";
}

void regeneration(Outcome& o) {
  const auto panel = t::small_panel(3);
  const auto member = panel.all_members().front();
  const auto book = t::make_concept("c1", "The Salt Ledger", "A harbour clerk finds a ledger of ships that never sailed.");
  t::ScriptedJudge sloppy([](const PanelMember& m, const Concept& b, const Rubric& r, const EvaluationContext& c) {
    return t::sloppy_evaluation(m, b, r, c);
  });
  SlopDetector detector;
  auto report = detector.analyze(t::sloppy_evaluation(member, book, default_rubric()), member, book, default_rubric());
  int failing = 0;
  for (const auto& c : report.per_check) failing += c.flags.empty() ? 0 : 1;
  o.expect(failing >= 3, "sloppy evaluation fails only " + std::to_string(failing) + " checks");
  auto out = evaluate_with_regeneration(sloppy, detector, member, book, default_rubric(), 3);
  o.expect(std::holds_alternative<Failed>(out), "sloppy backend not Failed");
  if (auto* f = std::get_if<Failed>(&out)) o.expect(f->attempts == 3, "attempts " + std::to_string(f->attempts));
  o.expect(sloppy.calls == 3, "backend calls " + std::to_string(sloppy.calls.load()));

  // Mixed backend over many seeds: Accepted must always carry s < 0.4.
  t::ScriptedJudge mixed([](const PanelMember& m, const Concept& b, const Rubric& r, const EvaluationContext& c) {
    Rng rng(c.sampling_seed);
    switch (rng.index(4)) {
      case 0: return t::sloppy_evaluation(m, b, r, c);
      case 1: {
        auto e = t::clean_evaluation(m, b, r, rng.uniform(2, 9), c);
        for (auto& [k, v] : e.criterion_scores) v = 7.0;
        return e;
      }
      case 2: return mock_evaluate(m, b, r, c.sampling_seed, c);
      default: return t::clean_evaluation(m, b, r, rng.uniform(2, 9), c);
    }
  });
  int accepted = 0;
  const auto all = panel.all_members();
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    for (auto thresholds : {SlopThresholds{}, SlopThresholds{0.2, 0.6}, SlopThresholds{0.3, 0.35}}) {
      SlopDetector d(SlopBanks::shipped(), {}, thresholds);
      auto r = evaluate_with_regeneration(mixed, d, all[seed % all.size()], book, default_rubric(), 3, seed);
      if (auto* a = std::get_if<Accepted>(&r)) {
        ++accepted;
        o.expect(a->evaluation.slop_report && a->evaluation.slop_report->composite < std::min(0.4, thresholds.flag_at),
                 "accepted at composite " + fmt(a->evaluation.slop_report->composite));
      }
    }
  }
  o.expect(accepted > 0, "mixed backend never accepted");
  if (o.ok) o.detail << failing << " checks flagged, composite " << fmt(report.composite) << ", Failed after 3; "
                     << accepted << " accepted all below 0.4";
}

TournamentState full_run(std::uint64_t seed, int concurrency) {
  MockJudge judge(seed);
  auto config = t::basic_config(TournamentFormat::double_elim, seed);
  config.concurrency = concurrency;
  TournamentState state;
  SlopDetector detector;
  TournamentEngine engine(state, judge, detector);
  engine.create("det", config, synthetic_concepts(12, seed), default_rubric());
  engine.run();
  return state;
}

class KillSink : public EventSink {
 public:
  KillSink(TournamentWriter& w, int k) : w_(w), k_(k) {}
  std::int64_t append(const Event& e) override {
    auto seq = w_.append(e);
    if (--k_ == 0) ::_exit(42);
    return seq;
  }

 private:
  TournamentWriter& w_;
  int k_;
};

void determinism(Outcome& o) {
  auto a = dump(full_run(31, 1));
  auto b = dump(full_run(31, 1));
  // The state records its own config; only the worker count may differ.
  auto parallel = full_run(31, 8);
  parallel.config.concurrency = 1;
  auto c = dump(parallel);
  o.expect(a == b, "two runs differ");
  o.expect(a == c, "concurrency changes the result");

  auto config = t::basic_config(TournamentFormat::swiss, 31);
  auto concepts = synthetic_concepts(8, 31);
  t::TempDir ref_dir;
  EventStore ref(ref_dir.path());
  TournamentState full;
  {
    MockJudge judge(31);
    SlopDetector detector;
    TournamentWriter writer(ref, "r", true);
    TournamentEngine engine(full, judge, detector, &writer);
    engine.create("r", config, concepts, default_rubric());
    engine.run();
  }
  const auto total = static_cast<int>(full.last_sequence);
  int resumed = 0;
  for (int k : {1, total / 3, total / 2, total - 1}) {
    t::TempDir dir;
    pid_t pid = ::fork();
    if (pid == 0) {
      EventStore store(dir.path());
      MockJudge judge(31);
      SlopDetector detector;
      TournamentState state;
      TournamentWriter writer(store, "r", true);
      KillSink sink(writer, k);
      TournamentEngine engine(state, judge, detector, &sink);
      engine.create("r", config, concepts, default_rubric());
      engine.run();
      ::_exit(0);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 42) {
      o.expect(false, "child for k=" + std::to_string(k) + " did not stop where told");
      continue;
    }
    EventStore store(dir.path());
    TournamentState state = store.load_tournament("r");
    MockJudge judge(31);
    SlopDetector detector;
    TournamentWriter writer(store, "r");
    TournamentEngine engine(state, judge, detector, &writer);
    engine.run();
    o.expect(dump(state) == dump(full), "resume after " + std::to_string(k) + " events differs");
    o.expect(dump(store.load_tournament("r")) == dump(full), "replayed log after " + std::to_string(k) + " differs");
    ++resumed;
  }
  if (o.ok) o.detail << "identical state bytes across runs and concurrency; " << resumed << " kill/resume points match";
}

void mock_uplift(Outcome& o) {
  // Pool mean: every concept's mean aggregate over its stage-one matches.
  // Champions: the funnel survivors, scored the same way.
  int seeds = 0;
  for (std::uint64_t seed : {3u, 8u, 13u}) {
    auto concepts = synthetic_concepts(64, seed);
    MockJudge judge(seed);
    auto config = t::basic_config(TournamentFormat::single_elim, seed);
    config.concurrency = 4;
    FunnelConfig f;
    f.stage_one_keep = 16;
    f.stage_two_keep = 4;
    auto out = run_funnel(concepts, config, t::small_panel(seed), judge, default_rubric(), f);

    // Unfiltered pool: every concept scored once by the same panel.
    std::map<std::string, double> score;
    for (const auto& r : out.stage_one.match_results) {
      if (!score.count(r.concept_a)) score[r.concept_a] = r.aggregate_a.value;
      if (!score.count(r.concept_b)) score[r.concept_b] = r.aggregate_b.value;
    }
    double pool = 0.0;
    for (const auto& [id, v] : score) pool += v;
    pool /= static_cast<double>(score.size());
    double champions = 0.0;
    for (const auto& id : out.survivors) champions += score.at(id);
    champions /= static_cast<double>(out.survivors.size());
    o.expect(champions > pool, "seed " + std::to_string(seed) + ": champions " + fmt(champions) + " vs pool " + fmt(pool));
    if (o.ok) o.detail << (seeds ? ", " : "") << "seed " << seed << " champions " << fmt(champions).substr(0, 5)
                       << " > pool " << fmt(pool).substr(0, 5);
    ++seeds;
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"aggregation-fixtures", aggregation},
      {"rubric-fixture", rubric},
      {"slop-anchors", slop_anchors},
      {"tournament-laws", tournament_laws},
      {"funnel-survival", funnel},
      {"panel-diversity", diversity},
      {"quality-gates", gates},
      {"regeneration", regeneration},
      {"determinism-replay", determinism},
      {"mock-uplift-analogue", mock_uplift},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      check(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("threw: ") + e.what());
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << " (" << fmt(std::round(secs * 10) / 10) << "s): "
              << o.detail.str() << std::endl;
    if (!o.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
