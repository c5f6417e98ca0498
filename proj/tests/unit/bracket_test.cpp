#include <gtest/gtest.h>

#include <map>
#include <set>

#include "fixtures.hpp"
#include "readerpanel/tournament.hpp"

namespace readerpanel {
namespace {

using testing::all_pairings;
using testing::numbered_ids;
using testing::simulate_bracket;

// Stronger seed (earlier id) always wins.
bool favourite(const Pairing& p) { return *p.a < *p.b; }

bool coin(const Pairing& p) { return stable_hash(11, {p.match_id, *p.a, *p.b}) & 1; }

std::vector<Concept> concepts(int n) {
  std::vector<Concept> out;
  for (const auto& id : numbered_ids(n)) out.push_back(testing::make_concept(id, "Title " + id, "About " + id));
  return out;
}

int played(const std::vector<MatchResult>& results) { return static_cast<int>(results.size()); }

TEST(SeedPositionsTest, StandardPlacement) {
  EXPECT_EQ(standard_seed_positions(8), (std::vector<int>{1, 8, 4, 5, 2, 7, 3, 6}));
  EXPECT_EQ(standard_seed_positions(2), (std::vector<int>{1, 2}));
  EXPECT_THROW(standard_seed_positions(6), Error);
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_EQ(ceil_log2(5), 3);
  EXPECT_EQ(ceil_log2(8), 3);
}

TEST(SeedBracketTest, EightSingleElimHasThreeRounds) {
  auto b = seed_bracket(concepts(8), TournamentFormat::single_elim, Seeding::random, {}, {}, 1);
  ASSERT_EQ(b.rounds.size(), 3u);
  EXPECT_EQ(b.rounds[0].size(), 4u);
  EXPECT_EQ(b.rounds[1].size(), 2u);
  EXPECT_EQ(b.rounds[2].size(), 1u);
}

TEST(SeedBracketTest, SixByRatingTopSeedsGetByesInOppositeHalves) {
  std::map<std::string, double> ratings;
  auto cs = concepts(6);
  for (int i = 0; i < 6; ++i) ratings[cs[i].id] = 10.0 - i;
  auto b = seed_bracket(cs, TournamentFormat::single_elim, Seeding::by_rating, ratings, {}, 1);
  const auto& r1 = b.rounds[0];
  ASSERT_EQ(r1.size(), 4u);
  std::vector<std::string> bye_holders;
  std::vector<std::size_t> bye_slots;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    if (r1[i].bye) {
      bye_holders.push_back(*r1[i].a);
      bye_slots.push_back(i);
    }
  }
  EXPECT_EQ(bye_holders, (std::vector<std::string>{"c01", "c02"}));
  ASSERT_EQ(bye_slots.size(), 2u);
  EXPECT_LT(bye_slots[0], 2u);
  EXPECT_GE(bye_slots[1], 2u);
}

TEST(SeedBracketTest, FourRoundRobinSixPairingsThreeRounds) {
  auto b = seed_bracket(concepts(4), TournamentFormat::round_robin, Seeding::random, {}, {}, 1);
  ASSERT_EQ(b.rounds.size(), 3u);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& round : b.rounds) {
    EXPECT_EQ(round.size(), 2u);
    for (const auto& p : round) pairs.emplace(std::min(*p.a, *p.b), std::max(*p.a, *p.b));
  }
  EXPECT_EQ(pairs.size(), 6u);
}

TEST(SeedEntrantsTest, SeedingModes) {
  auto cs = concepts(4);
  EXPECT_EQ(seed_entrants(cs, Seeding::manual, {}, {"c03", "c01", "c04", "c02"}, 0),
            (std::vector<std::string>{"c03", "c01", "c04", "c02"}));
  EXPECT_THROW(seed_entrants(cs, Seeding::manual, {}, {"c03", "c01"}, 0), Error);
  EXPECT_THROW(seed_entrants(cs, Seeding::by_rating, {{"c01", 1.0}}, {}, 0), Error);
  EXPECT_EQ(seed_entrants(cs, Seeding::random, {}, {}, 5), seed_entrants(cs, Seeding::random, {}, {}, 5));
  EXPECT_THROW(seed_entrants(concepts(1), Seeding::random, {}, {}, 5), Error);
  auto dup = cs;
  dup[1].id = "c01";
  EXPECT_THROW(seed_entrants(dup, Seeding::random, {}, {}, 5), Error);
}

TEST(BracketLawsTest, SingleElimPlaysNMinusOne) {
  for (int n = 2; n <= 32; ++n) {
    auto [b, results] = simulate_bracket(TournamentFormat::single_elim, numbered_ids(n), coin);
    EXPECT_EQ(played(results), n - 1) << n;
    EXPECT_EQ(static_cast<int>(b.rounds.size()), ceil_log2(n)) << n;
  }
}

TEST(BracketLawsTest, RoundRobinPlaysEveryPairOnce) {
  for (int n = 2; n <= 16; ++n) {
    auto [b, results] = simulate_bracket(TournamentFormat::round_robin, numbered_ids(n), coin);
    EXPECT_EQ(played(results), n * (n - 1) / 2) << n;
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& r : results) pairs.emplace(std::min(r.concept_a, r.concept_b), std::max(r.concept_a, r.concept_b));
    EXPECT_EQ(static_cast<int>(pairs.size()), n * (n - 1) / 2);
  }
}

TEST(BracketLawsTest, DoubleElimPlaysTwoNMinusOneOrTwo) {
  for (int n = 2; n <= 32; ++n) {
    for (auto rule : {favourite, coin}) {
      auto [b, results] = simulate_bracket(TournamentFormat::double_elim, numbered_ids(n), rule);
      int m = played(results);
      EXPECT_TRUE(m == 2 * n - 2 || m == 2 * n - 1) << "n=" << n << " matches=" << m;
      // Everyone except the champion loses exactly twice, the champion at most once.
      std::map<std::string, int> losses;
      for (const auto& r : results) ++losses[r.loser()];
      auto standings = compute_standings(b, results);
      EXPECT_LE(losses[standings.front()], 1);
      for (std::size_t i = 1; i < standings.size(); ++i) EXPECT_EQ(losses[standings[i]], 2) << n;
    }
  }
}

TEST(BracketLawsTest, DoubleElimBracketResetWhenLosersChampionWinsFirstFinal) {
  // The favourite wins everything except GF-1.
  auto rule = [](const Pairing& p) { return p.match_id == "GF-1" ? false : *p.a < *p.b; };
  auto [b, results] = simulate_bracket(TournamentFormat::double_elim, numbered_ids(8), rule);
  EXPECT_EQ(played(results), 15);
  EXPECT_EQ(b.rounds.back().size(), 2u);
  auto [b2, results2] = simulate_bracket(TournamentFormat::double_elim, numbered_ids(8), favourite);
  EXPECT_EQ(played(results2), 14);
}

TEST(BracketLawsTest, SwissDefaultRoundsAndMatchCount) {
  for (int n = 2; n <= 32; n += 2) {
    auto [b, results] = simulate_bracket(TournamentFormat::swiss, numbered_ids(n), coin);
    EXPECT_EQ(static_cast<int>(b.rounds.size()), ceil_log2(n));
    EXPECT_EQ(played(results), ceil_log2(n) * (n / 2)) << n;
  }
  auto [b, results] = simulate_bracket(TournamentFormat::swiss, numbered_ids(8), coin, 3);
  EXPECT_EQ(played(results), 12);
}

TEST(BracketLawsTest, SwissOddFieldGivesDistinctByes) {
  auto [b, results] = simulate_bracket(TournamentFormat::swiss, numbered_ids(7), coin, 3);
  std::set<std::string> bye_holders;
  for (const auto& round : b.rounds) {
    int byes = 0;
    for (const auto& p : round) {
      if (p.bye) {
        ++byes;
        bye_holders.insert(*p.a);
      }
    }
    EXPECT_EQ(byes, 1);
  }
  EXPECT_EQ(bye_holders.size(), 3u);
  EXPECT_EQ(played(results), 9);
}

TEST(SwissPairingTest, RematchFreeWheneverOracleSaysPossible) {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    int n = 2 * (1 + static_cast<int>(rng.index(5)));  // 2..10
    auto ids = numbered_ids(n);
    rng.shuffle(ids);
    std::set<std::pair<std::string, std::string>> played_pairs;
    double density = rng.uniform(0.0, 0.8);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng.bernoulli(density)) played_pairs.emplace(std::min(ids[i], ids[j]), std::max(ids[i], ids[j]));
      }
    }
    auto pairs = pair_swiss_round(ids, played_pairs);
    ASSERT_EQ(static_cast<int>(pairs.size()), n / 2);
    std::set<std::size_t> used;
    bool rematch = false;
    for (auto [i, j] : pairs) {
      EXPECT_TRUE(used.insert(i).second);
      EXPECT_TRUE(used.insert(j).second);
      rematch |= played_pairs.count({std::min(ids[i], ids[j]), std::max(ids[i], ids[j])}) > 0;
    }
    if (testing::rematch_free_matching_exists(ids, played_pairs)) {
      EXPECT_FALSE(rematch) << "n=" << n;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(SwissPairingTest, OddFieldRejected) { EXPECT_THROW(pair_swiss_round({"a", "b", "c"}, {}), Error); }

TEST(SwissPairingTest, FullTournamentsAvoidRematches) {
  for (int n = 2; n <= 10; ++n) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto rule = [seed](const Pairing& p) { return stable_hash(seed, {p.match_id, *p.a}) & 1; };
      int rounds = std::min(n - 1, ceil_log2(n) + 1);
      auto [b, results] = simulate_bracket(TournamentFormat::swiss, numbered_ids(n), rule, rounds);
      std::set<std::pair<std::string, std::string>> seen;
      for (const auto& round : b.rounds) {
        std::vector<std::string> field;
        std::vector<std::pair<std::string, std::string>> this_round;
        for (const auto& p : round) {
          if (p.bye) continue;
          field.push_back(*p.a);
          field.push_back(*p.b);
          this_round.emplace_back(std::min(*p.a, *p.b), std::max(*p.a, *p.b));
        }
        bool rematch = false;
        for (const auto& pr : this_round) rematch |= seen.count(pr) > 0;
        if (testing::rematch_free_matching_exists(field, seen)) EXPECT_FALSE(rematch) << n << "/" << seed;
        seen.insert(this_round.begin(), this_round.end());
      }
    }
  }
}

TEST(BuildBracketTest, LaterRoundsFillAsResultsArrive) {
  auto ids = numbered_ids(4);
  auto b0 = build_bracket(TournamentFormat::single_elim, ids, {});
  EXPECT_TRUE(b0.rounds[0][0].ready());
  EXPECT_FALSE(b0.rounds[1][0].ready());
  std::vector<MatchResult> results{testing::fake_result(b0.rounds[0][0], true)};
  auto b1 = build_bracket(TournamentFormat::single_elim, ids, results);
  EXPECT_EQ(b1.rounds[1][0].a, std::optional<std::string>("c01"));
  EXPECT_FALSE(b1.rounds[1][0].b.has_value());
}

}  // namespace
}  // namespace readerpanel
