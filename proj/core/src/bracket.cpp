#include <algorithm>
#include <map>
#include <set>

#include "readerpanel/tournament.hpp"

namespace readerpanel {

int ceil_log2(int n) {
  if (n < 1) fail(ErrorKind::sizing, "ceil_log2 needs a positive argument");
  int r = 0;
  while ((1 << r) < n) ++r;
  return r;
}

std::vector<int> standard_seed_positions(int slots) {
  if (slots < 1 || (slots & (slots - 1)) != 0) fail(ErrorKind::sizing, "bracket size must be a power of two");
  std::vector<int> positions{1};
  for (int size = 2; size <= slots; size *= 2) {
    std::vector<int> next;
    next.reserve(static_cast<std::size_t>(size));
    for (int s : positions) {
      next.push_back(s);
      next.push_back(size + 1 - s);
    }
    positions = std::move(next);
  }
  return positions;
}

std::vector<std::string> seed_entrants(const std::vector<Concept>& concepts, Seeding seeding,
                                       const std::map<std::string, double>& ratings,
                                       const std::vector<std::string>& manual_order, std::uint64_t seed) {
  if (concepts.size() < 2) fail(ErrorKind::sizing, "a tournament needs at least 2 concepts");
  std::vector<std::string> ids;
  std::set<std::string> unique;
  for (const auto& c : concepts) {
    c.validate();
    if (!unique.insert(c.id).second) fail(ErrorKind::input, "duplicate concept id " + c.id);
    ids.push_back(c.id);
  }

  switch (seeding) {
    case Seeding::random: {
      Rng rng(stable_hash(seed, {"seeding"}));
      rng.shuffle(ids);
      return ids;
    }
    case Seeding::by_rating: {
      for (const auto& id : ids) {
        if (!ratings.count(id)) fail(ErrorKind::input, "no rating for concept " + id);
      }
      std::stable_sort(ids.begin(), ids.end(),
                       [&](const std::string& a, const std::string& b) { return ratings.at(a) > ratings.at(b); });
      return ids;
    }
    case Seeding::manual: {
      std::set<std::string> given(manual_order.begin(), manual_order.end());
      if (manual_order.size() != ids.size() || given != unique) {
        fail(ErrorKind::input, "manual seeding must list every concept exactly once");
      }
      return manual_order;
    }
  }
  fail(ErrorKind::input, "unknown seeding");
}

namespace {

using Slot = std::optional<std::string>;
using ResultIndex = std::map<std::string, const MatchResult*, std::less<>>;

struct Builder {
  const ResultIndex& results;

  const MatchResult* find(const std::string& id) const {
    auto it = results.find(id);
    return it == results.end() ? nullptr : it->second;
  }

  Pairing make(std::string id, BracketSide side, int round, int stage, Slot a, Slot b) const {
    Pairing p;
    p.match_id = std::move(id);
    p.side = side;
    p.round = round;
    p.stage = stage;
    p.a = std::move(a);
    p.b = std::move(b);
    return p;
  }

  Pairing bye(std::string id, BracketSide side, int round, int stage, Slot who) const {
    Pairing p = make(std::move(id), side, round, stage, std::move(who), std::nullopt);
    p.bye = true;
    return p;
  }

  Slot winner(const Pairing& p) const {
    if (p.bye) return p.a;
    if (const auto* r = find(p.match_id)) return r->winner;
    return std::nullopt;
  }

  Slot loser(const Pairing& p) const {
    if (p.bye) return std::nullopt;
    if (const auto* r = find(p.match_id)) return r->loser();
    return std::nullopt;
  }
};

std::string mid(std::string_view prefix, int round, int index) {
  return std::string(prefix) + std::to_string(round) + "-" + std::to_string(index);
}

/// First winners round under standard placement; missing seeds become byes.
std::vector<Pairing> first_round(const Builder& b, const std::vector<std::string>& entrants, int stage) {
  const int n = static_cast<int>(entrants.size());
  const int slots = 1 << ceil_log2(n);
  auto positions = standard_seed_positions(slots);
  std::vector<Pairing> round;
  for (int i = 0; i < slots / 2; ++i) {
    int sa = positions[static_cast<std::size_t>(2 * i)];
    int sb = positions[static_cast<std::size_t>(2 * i + 1)];
    auto id = mid("W", 1, i + 1);
    Slot a = sa <= n ? Slot(entrants[static_cast<std::size_t>(sa - 1)]) : std::nullopt;
    Slot c = sb <= n ? Slot(entrants[static_cast<std::size_t>(sb - 1)]) : std::nullopt;
    if (!a || !c) {
      round.push_back(b.bye(id, BracketSide::winners, 1, stage, a ? a : c));
    } else {
      round.push_back(b.make(id, BracketSide::winners, 1, stage, a, c));
    }
  }
  return round;
}

std::vector<Pairing> next_round(const Builder& b, const std::vector<Pairing>& prev, int r, int stage) {
  std::vector<Pairing> round;
  for (std::size_t i = 0; i + 1 < prev.size(); i += 2) {
    round.push_back(b.make(mid("W", r, static_cast<int>(i / 2 + 1)), BracketSide::winners, r, stage,
                           b.winner(prev[i]), b.winner(prev[i + 1])));
  }
  return round;
}

Bracket single_elim(const Builder& b, const std::vector<std::string>& entrants) {
  Bracket br;
  br.format = TournamentFormat::single_elim;
  br.entrants = entrants;
  const int rounds = ceil_log2(static_cast<int>(entrants.size()));
  br.rounds.push_back(first_round(b, entrants, 1));
  for (int r = 2; r <= rounds; ++r) br.rounds.push_back(next_round(b, br.rounds.back(), r, r));
  return br;
}

/// Plays down a losers-bracket pool in one round: top half meets bottom half
/// in reverse order; the middle entrant of an odd pool gets a bye.
std::vector<Slot> internal_round(const Builder& b, std::vector<std::vector<Pairing>>& lb, const std::vector<Slot>& pool,
                                 int stage) {
  const int round = static_cast<int>(lb.size()) + 1;
  std::vector<Pairing> pairings;
  std::vector<Slot> next;
  const std::size_t n = pool.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    auto p = b.make(mid("L", round, static_cast<int>(i + 1)), BracketSide::losers, round, stage, pool[i],
                    pool[n - 1 - i]);
    next.push_back(b.winner(p));
    pairings.push_back(std::move(p));
  }
  if (n % 2 == 1) {
    auto p = b.bye(mid("L", round, static_cast<int>(n / 2 + 1)), BracketSide::losers, round, stage, pool[n / 2]);
    next.insert(next.begin(), b.winner(p));
    pairings.push_back(std::move(p));
  }
  lb.push_back(std::move(pairings));
  return next;
}

/// Survivors meet the newest drop-ins; extras on either side pass through.
std::vector<Slot> drop_in_round(const Builder& b, std::vector<std::vector<Pairing>>& lb, const std::vector<Slot>& pool,
                                std::vector<Slot> drop_ins, bool reverse, int stage) {
  if (reverse) std::reverse(drop_ins.begin(), drop_ins.end());
  const int round = static_cast<int>(lb.size()) + 1;
  std::vector<Pairing> pairings;
  std::vector<Slot> next;
  const std::size_t paired = std::min(pool.size(), drop_ins.size());
  int index = 0;
  for (std::size_t i = 0; i < paired; ++i) {
    auto p = b.make(mid("L", round, ++index), BracketSide::losers, round, stage, pool[i], drop_ins[i]);
    next.push_back(b.winner(p));
    pairings.push_back(std::move(p));
  }
  const auto& extra = pool.size() > paired ? pool : drop_ins;
  for (std::size_t i = paired; i < extra.size(); ++i) {
    auto p = b.bye(mid("L", round, ++index), BracketSide::losers, round, stage, extra[i]);
    next.push_back(b.winner(p));
    pairings.push_back(std::move(p));
  }
  lb.push_back(std::move(pairings));
  return next;
}

Bracket double_elim(const Builder& b, const std::vector<std::string>& entrants) {
  Bracket br;
  br.format = TournamentFormat::double_elim;
  br.entrants = entrants;
  const int rounds = ceil_log2(static_cast<int>(entrants.size()));

  // Stage numbers depend only on match counts, never on outcomes: each phase
  // is a winners round followed by the losers rounds it feeds.
  std::vector<std::vector<Pairing>> lb;
  int stage = 0;
  std::vector<Slot> pool;
  for (int r = 1; r <= rounds; ++r) {
    ++stage;
    br.rounds.push_back(r == 1 ? first_round(b, entrants, stage) : next_round(b, br.rounds.back(), r, stage));
    std::vector<Slot> losers;
    for (const auto& p : br.rounds[static_cast<std::size_t>(r - 1)]) {
      if (!p.bye) losers.push_back(b.loser(p));
    }
    if (r == 1) {
      pool = losers;
      if (pool.size() >= 2) pool = internal_round(b, lb, pool, ++stage);
    } else {
      if (!pool.empty() && !losers.empty()) {
        pool = drop_in_round(b, lb, pool, losers, r % 2 == 0, ++stage);
      } else if (pool.empty()) {
        pool = losers;
      }
      if (r < rounds && pool.size() >= 2) pool = internal_round(b, lb, pool, ++stage);
    }
    if (r == rounds) {
      while (pool.size() > 1) pool = internal_round(b, lb, pool, ++stage);
    }
  }

  Slot wb_champion = b.winner(br.rounds.back().front());
  Slot lb_champion = pool.empty() ? std::nullopt : pool.front();
  std::vector<Pairing> finals;
  auto gf1 = b.make("GF-1", BracketSide::grand_final, 1, ++stage, wb_champion, lb_champion);
  finals.push_back(gf1);
  if (const auto* r1 = b.find("GF-1"); r1 != nullptr && lb_champion && r1->winner == *lb_champion) {
    // Bracket reset: the losers' champion handed the finalist a first loss.
    finals.push_back(b.make("GF-2", BracketSide::grand_final, 2, ++stage, wb_champion, lb_champion));
  }
  br.rounds.push_back(std::move(finals));
  br.losers_bracket = std::move(lb);
  return br;
}

Bracket round_robin(const Builder& b, const std::vector<std::string>& entrants) {
  Bracket br;
  br.format = TournamentFormat::round_robin;
  br.entrants = entrants;
  std::vector<Slot> circle(entrants.begin(), entrants.end());
  if (circle.size() % 2 == 1) circle.emplace_back(std::nullopt);
  const std::size_t n = circle.size();
  for (std::size_t r = 0; r + 1 < n; ++r) {
    std::vector<Pairing> round;
    const int rn = static_cast<int>(r + 1);
    for (std::size_t i = 0; i < n / 2; ++i) {
      const auto& a = circle[i];
      const auto& c = circle[n - 1 - i];
      auto id = mid("RR", rn, static_cast<int>(i + 1));
      if (!a || !c) {
        round.push_back(b.bye(id, BracketSide::round_robin, rn, rn, a ? a : c));
      } else {
        round.push_back(b.make(id, BracketSide::round_robin, rn, rn, a, c));
      }
    }
    br.rounds.push_back(std::move(round));
    // Circle method: first position fixed, the rest rotate one step.
    std::rotate(circle.begin() + 1, circle.end() - 1, circle.end());
  }
  return br;
}

struct SwissRecord {
  int wins = 0;
  double cumulative = 0.0;
  bool had_bye = false;
};

Bracket swiss(const Builder& b, const std::vector<std::string>& entrants, int rounds) {
  Bracket br;
  br.format = TournamentFormat::swiss;
  br.entrants = entrants;
  const std::size_t n = entrants.size();
  if (rounds <= 0) rounds = ceil_log2(static_cast<int>(n));

  std::map<std::string, SwissRecord> record;
  std::map<std::string, std::size_t> seed_of;
  for (std::size_t i = 0; i < n; ++i) {
    record[entrants[i]];
    seed_of[entrants[i]] = i;
  }
  std::set<std::pair<std::string, std::string>> played;
  bool known = true;

  for (int r = 1; r <= rounds; ++r) {
    std::vector<Pairing> round;
    if (!known) {
      // Pairings for this round depend on results not yet in.
      for (std::size_t i = 0; i < n / 2; ++i) {
        round.push_back(b.make(mid("S", r, static_cast<int>(i + 1)), BracketSide::swiss, r, r, std::nullopt,
                               std::nullopt));
      }
      if (n % 2 == 1) {
        round.push_back(b.bye(mid("S", r, static_cast<int>(n / 2 + 1)), BracketSide::swiss, r, r, std::nullopt));
      }
      br.rounds.push_back(std::move(round));
      continue;
    }

    std::vector<std::string> ranked = entrants;
    std::stable_sort(ranked.begin(), ranked.end(), [&](const std::string& x, const std::string& y) {
      const auto& rx = record.at(x);
      const auto& ry = record.at(y);
      if (rx.wins != ry.wins) return rx.wins > ry.wins;
      if (rx.cumulative != ry.cumulative) return rx.cumulative > ry.cumulative;
      return seed_of.at(x) < seed_of.at(y);
    });
    std::optional<std::string> bye_to;
    if (n % 2 == 1) {
      for (auto it = ranked.rbegin(); it != ranked.rend(); ++it) {
        if (!record.at(*it).had_bye) {
          bye_to = *it;
          break;
        }
      }
      if (!bye_to) bye_to = ranked.back();
      ranked.erase(std::find(ranked.begin(), ranked.end(), *bye_to));
    }
    auto pairs = pair_swiss_round(ranked, played);
    int index = 0;
    for (auto [i, j] : pairs) {
      round.push_back(b.make(mid("S", r, ++index), BracketSide::swiss, r, r, ranked[i], ranked[j]));
    }
    if (bye_to) round.push_back(b.bye(mid("S", r, ++index), BracketSide::swiss, r, r, bye_to));

    for (const auto& p : round) {
      if (p.bye) {
        auto& rec = record.at(*p.a);
        rec.had_bye = true;
        ++rec.wins;
        continue;
      }
      played.emplace(std::min(*p.a, *p.b), std::max(*p.a, *p.b));
      const auto* res = b.find(p.match_id);
      if (res == nullptr) {
        known = false;
        continue;
      }
      ++record.at(res->winner).wins;
      record.at(res->concept_a).cumulative += res->aggregate_a.value;
      record.at(res->concept_b).cumulative += res->aggregate_b.value;
    }
    br.rounds.push_back(std::move(round));
  }
  return br;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> pair_swiss_round(
    const std::vector<std::string>& ranked, const std::set<std::pair<std::string, std::string>>& played,
    std::size_t node_budget) {
  const std::size_t n = ranked.size();
  if (n % 2 != 0) fail(ErrorKind::input, "swiss pairing needs an even field");
  auto met = [&](std::size_t i, std::size_t j) {
    const auto& x = ranked[i];
    const auto& y = ranked[j];
    return played.count({std::min(x, y), std::max(x, y)}) > 0;
  };

  std::vector<bool> used(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t nodes = 0;
  std::function<bool()> search = [&]() -> bool {
    if (++nodes > node_budget) return false;
    std::size_t first = 0;
    while (first < n && used[first]) ++first;
    if (first == n) return true;
    used[first] = true;
    for (std::size_t j = first + 1; j < n; ++j) {
      if (used[j] || met(first, j)) continue;
      used[j] = true;
      pairs.emplace_back(first, j);
      if (search()) return true;
      pairs.pop_back();
      used[j] = false;
      if (nodes > node_budget) break;
    }
    used[first] = false;
    return false;
  };
  if (search()) return pairs;

  // Greedy fallback: best available opponent not met before, else the next in rank.
  pairs.clear();
  std::fill(used.begin(), used.end(), false);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::size_t pick = n;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!used[j] && !met(i, j)) {
        pick = j;
        break;
      }
    }
    if (pick == n) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!used[j]) {
          pick = j;
          break;
        }
      }
    }
    used[pick] = true;
    pairs.emplace_back(i, pick);
  }
  return pairs;
}

Bracket build_bracket(TournamentFormat format, const std::vector<std::string>& entrants,
                      const std::vector<MatchResult>& results, int swiss_rounds) {
  if (entrants.size() < 2) fail(ErrorKind::sizing, "a tournament needs at least 2 concepts");
  ResultIndex index;
  for (const auto& r : results) index.emplace(r.match_id, &r);
  Builder b{index};
  switch (format) {
    case TournamentFormat::single_elim: return single_elim(b, entrants);
    case TournamentFormat::double_elim: return double_elim(b, entrants);
    case TournamentFormat::round_robin: return round_robin(b, entrants);
    case TournamentFormat::swiss: return swiss(b, entrants, swiss_rounds);
  }
  fail(ErrorKind::configuration, "unknown tournament format");
}

Bracket seed_bracket(const std::vector<Concept>& concepts, TournamentFormat format, Seeding seeding,
                     const std::map<std::string, double>& ratings, const std::vector<std::string>& manual_order,
                     std::uint64_t seed, int swiss_rounds) {
  return build_bracket(format, seed_entrants(concepts, seeding, ratings, manual_order, seed), {}, swiss_rounds);
}

}  // namespace readerpanel
