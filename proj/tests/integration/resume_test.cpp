#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include "fixtures.hpp"
#include "readerpanel/serialize.hpp"
#include "readerpanel/store.hpp"

namespace readerpanel {
namespace {

// Forwards to the writer and kills the process right after the K-th append.
class DyingSink : public EventSink {
 public:
  DyingSink(TournamentWriter& writer, int die_after) : writer_(writer), remaining_(die_after) {}
  std::int64_t append(const Event& event) override {
    auto seq = writer_.append(event);
    if (--remaining_ == 0) ::_exit(42);
    return seq;
  }

 private:
  TournamentWriter& writer_;
  int remaining_;
};

TournamentConfig resume_config() {
  auto c = testing::basic_config(TournamentFormat::swiss, 21);
  c.concurrency = 3;
  return c;
}

void run_until_killed(const std::filesystem::path& root, int die_after) {
  pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    EventStore store(root);
    MockJudge judge(21);
    SlopDetector detector;
    TournamentState state;
    TournamentWriter writer(store, "t", !store.exists("t"));
    DyingSink sink(writer, die_after);
    TournamentEngine engine(state, judge, detector, &sink);
    engine.create("t", resume_config(), synthetic_concepts(6, 21), default_rubric());
    engine.run();
    ::_exit(0);
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFEXITED(status));
  ASSERT_EQ(WEXITSTATUS(status), 42);
}

TEST(ProcessResumeTest, KilledRunResumesToUninterruptedResult) {
  testing::TempDir reference_dir;
  EventStore reference(reference_dir.path());
  TournamentState full;
  {
    MockJudge judge(21);
    SlopDetector detector;
    TournamentWriter writer(reference, "t", true);
    TournamentEngine engine(full, judge, detector, &writer);
    engine.create("t", resume_config(), synthetic_concepts(6, 21), default_rubric());
    engine.run();
  }
  ASSERT_EQ(full.status, TournamentStatus::finished);
  const auto total = static_cast<int>(full.last_sequence);

  for (int k : {1, 2, 40, total / 2, total - 1}) {
    testing::TempDir dir;
    run_until_killed(dir.path(), k);
    EventStore store(dir.path());
    ASSERT_EQ(static_cast<int>(store.read_events("t").size()), k);

    // The dead writer's lock is gone; a new writer picks up where it stopped.
    TournamentState state = store.load_tournament("t");
    MockJudge judge(21);
    SlopDetector detector;
    TournamentWriter writer(store, "t");
    TournamentEngine engine(state, judge, detector, &writer);
    ASSERT_FALSE(state.id.empty());
    engine.run();
    EXPECT_EQ(state.result, full.result) << "k=" << k;
    EXPECT_EQ(state.evaluations, full.evaluations) << "k=" << k;
    EXPECT_EQ(store.load_tournament("t"), state) << "k=" << k;
    EXPECT_EQ(state.last_sequence, full.last_sequence) << "k=" << k;
  }
}

}  // namespace
}  // namespace readerpanel
