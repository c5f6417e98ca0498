#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "readerpanel/review.hpp"
#include "readerpanel/serialize.hpp"
#include "readerpanel/store.hpp"

namespace readerpanel {
namespace {

using testing::TempDir;

Event stage_event(int stage) { return {EventKind::round_completed, {{"stage", stage}}}; }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::state;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::trunc);
  for (const auto& l : lines) out << l << "\n";
}

TEST(EventStoreTest, AppendAssignsConsecutiveSequences) {
  TempDir dir;
  EventStore store(dir.path() / "store");
  store.create("t1");
  EXPECT_TRUE(store.exists("t1"));
  EXPECT_TRUE(store.read_events("t1").empty());
  EXPECT_EQ(store.append_event("t1", stage_event(1)), 1);
  EXPECT_EQ(store.append_event("t1", stage_event(2)), 2);
  auto events = store.read_events("t1");
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].sequence, 2);
  EXPECT_EQ(events[1].event.payload["stage"], 2);
  EXPECT_FALSE(events[0].timestamp.empty());

  auto lines = read_lines(store.dir_for("t1") / "events.jsonl");
  ASSERT_EQ(lines.size(), 3u);
  auto header = json::parse(lines[0]);
  EXPECT_EQ(header["schema"], "readerpanel.events");
  EXPECT_EQ(header["version"], 1);
  EXPECT_EQ(json::parse(lines[1])["kind"], "round_completed");
}

TEST(EventStoreTest, ErrorKinds) {
  TempDir dir;
  EventStore store(dir.path());
  EXPECT_EQ(kind_of([&] { store.append_event("ghost", stage_event(1)); }), ErrorKind::lookup);
  EXPECT_EQ(kind_of([&] { store.read_events("ghost"); }), ErrorKind::lookup);
  EXPECT_EQ(kind_of([&] { store.create("../escape"); }), ErrorKind::input);
  store.create("t");
  EXPECT_EQ(kind_of([&] { store.create("t"); }), ErrorKind::state);
}

TEST(EventStoreTest, SequenceGapIsIntegrityError) {
  TempDir dir;
  EventStore store(dir.path());
  store.create("t");
  for (int i = 1; i <= 3; ++i) store.append_event("t", stage_event(i));
  auto path = store.dir_for("t") / "events.jsonl";
  auto lines = read_lines(path);
  lines.erase(lines.begin() + 2);  // drop sequence 2
  write_lines(path, lines);
  try {
    store.read_events("t");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::integrity);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(EventStoreTest, GarbageLineIsIntegrityError) {
  TempDir dir;
  EventStore store(dir.path());
  store.create("t");
  store.append_event("t", stage_event(1));
  auto path = store.dir_for("t") / "events.jsonl";
  auto lines = read_lines(path);
  lines.push_back("{\"seq\": 2, \"kind\":");
  write_lines(path, lines);
  EXPECT_EQ(kind_of([&] { store.read_events("t"); }), ErrorKind::integrity);
  write_lines(path, {});
  EXPECT_EQ(kind_of([&] { store.read_events("t"); }), ErrorKind::integrity);
}

TEST(EventStoreTest, SecondWriterIsRejected) {
  TempDir dir;
  EventStore store(dir.path());
  TournamentWriter first(store, "t", true);
  EXPECT_EQ(first.append(stage_event(1)), 1);
  EXPECT_EQ(kind_of([&] { TournamentWriter second(store, "t"); }), ErrorKind::concurrency);
  EXPECT_EQ(kind_of([&] { store.append_event("t", stage_event(2)); }), ErrorKind::concurrency);
}

TEST(EventStoreTest, WriterContinuesExistingLog) {
  TempDir dir;
  EventStore store(dir.path());
  {
    TournamentWriter w(store, "t", true);
    w.append(stage_event(1));
  }
  TournamentWriter w(store, "t");
  EXPECT_EQ(w.last_sequence(), 1);
  EXPECT_EQ(w.append(stage_event(2)), 2);
}

TEST(EventStoreTest, LoadReplaysToEngineState) {
  TempDir dir;
  EventStore store(dir.path());
  MockJudge judge(4);
  auto live = testing::run_stored(store, "t", synthetic_concepts(8, 4), testing::basic_config(), judge);
  EXPECT_EQ(store.load_tournament("t"), live);
}

TEST(EventStoreTest, ListFiltersByImprintAndReportsChampion) {
  TempDir dir;
  EventStore store(dir.path());
  MockJudge judge(4);
  auto a = testing::run_stored(store, "alpha", synthetic_concepts(4, 1), testing::basic_config(), judge);
  auto naval = testing::basic_config();
  naval.imprint = "warships_and_navies";
  testing::run_stored(store, "beta", synthetic_concepts(4, 2), naval, judge);
  store.create("empty");

  auto all = store.list_tournaments();
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].id, "alpha");
  EXPECT_EQ(all[0].champion, std::optional<std::string>(a.result->champion));
  EXPECT_EQ(all[0].status, TournamentStatus::finished);
  auto only = store.list_tournaments("warships_and_navies");
  ASSERT_EQ(only.size(), 1u);
  EXPECT_EQ(only[0].id, "beta");
  EXPECT_TRUE(store.list_tournaments("altneh").empty());
  EXPECT_EQ(store.tournament_ids(), (std::vector<std::string>{"alpha", "beta", "empty"}));
}

TEST(SnapshotTest, MatchingSnapshotLoadsAndTamperedOneFails) {
  TempDir dir;
  EventStore store(dir.path());
  MockJudge judge(4);
  TournamentState state;
  {
    SlopDetector detector;
    TournamentWriter writer(store, "t", true);
    writer.set_snapshot_interval(25, &state);
    TournamentEngine engine(state, judge, detector, &writer);
    engine.create("t", testing::basic_config(), synthetic_concepts(4, 1), default_rubric(), testing::small_panel());
    engine.run();
  }
  std::vector<std::filesystem::path> snaps;
  for (const auto& e : std::filesystem::directory_iterator(store.dir_for("t"))) {
    if (e.path().filename().string().rfind("snapshot-", 0) == 0) snaps.push_back(e.path());
  }
  ASSERT_FALSE(snaps.empty());
  EXPECT_EQ(store.load_tournament("t"), state);

  std::sort(snaps.begin(), snaps.end());
  auto snap = parse_as<TournamentState>(read_lines(snaps.back())[0]);
  snap.judge = "tampered";
  write_lines(snaps.back(), {dump(snap)});
  EXPECT_EQ(kind_of([&] { store.load_tournament("t"); }), ErrorKind::integrity);
}

TEST(ReviewServiceTest, PendingNewestFirstAndDecideOnce) {
  TempDir dir;
  EventStore store(dir.path());
  // A side whose every evaluation is flagged pauses the tournament.
  testing::ScriptedJudge judge([](const PanelMember& m, const Concept& b, const Rubric& r, const EvaluationContext& c) {
    auto e = testing::clean_evaluation(m, b, r, 6.5, c);
    if (b.id == "c002" && c.attempt == 1) {
      for (auto& [k, v] : e.criterion_scores) v = 7.0;
    }
    return e;
  });
  SlopDetector detector(SlopBanks::shipped(), {}, {0.2, 0.6});
  auto state = testing::run_stored(store, "t", synthetic_concepts(4, 3), testing::basic_config(), judge, detector);
  ASSERT_EQ(state.status, TournamentStatus::paused);

  ReviewService review(store);
  auto pending = review.pending();
  ASSERT_FALSE(pending.empty());
  for (std::size_t i = 1; i < pending.size(); ++i) {
    EXPECT_GE(pending[i - 1].item.created_seq, pending[i].item.created_seq);
  }
  EXPECT_TRUE(pending.front().detail.contains("record"));
  EXPECT_EQ(kind_of([&] { review.pending("other"); }), ErrorKind::lookup);

  const auto id = pending.front().item.item_id;
  auto outcome = review.decide(id, ReviewDecisionValue::accept, "editor-1", "2026-01-01T00:00:00Z");
  EXPECT_EQ(outcome.item.status, ReviewStatus::accepted);
  EXPECT_EQ(outcome.item.decided_by, std::optional<std::string>("editor-1"));
  EXPECT_EQ(review.pending().size(), pending.size() - 1);
  EXPECT_EQ(kind_of([&] { review.decide(id, ReviewDecisionValue::reject, "editor-2"); }), ErrorKind::state);
  EXPECT_EQ(kind_of([&] { review.decide("rv-nope", ReviewDecisionValue::reject, "editor-2"); }), ErrorKind::lookup);

  // The decision is durable: a fresh load sees it.
  auto reloaded = store.load_tournament("t");
  EXPECT_EQ(reloaded.find_review_item(id)->status, ReviewStatus::accepted);

  // Held lock blocks decisions.
  TournamentWriter holder(store, "t");
  EXPECT_EQ(kind_of([&] { review.decide(review.pending().front().item.item_id, ReviewDecisionValue::accept, "e"); }),
            ErrorKind::concurrency);
}

}  // namespace
}  // namespace readerpanel
