#include <algorithm>
#include <map>
#include <set>

#include "readerpanel/tournament.hpp"

namespace readerpanel {

namespace {

constexpr double kGateSlack = 1e-9;

void require_complete(const Bracket& bracket, const std::map<std::string, const MatchResult*>& index) {
  auto check = [&](const std::vector<std::vector<Pairing>>& rounds) {
    for (const auto& round : rounds) {
      for (const auto& p : round) {
        if (p.bye) {
          if (!p.a) fail(ErrorKind::state, "tournament incomplete: bye " + p.match_id + " unresolved");
          continue;
        }
        if (!index.count(p.match_id)) fail(ErrorKind::state, "tournament incomplete: " + p.match_id + " not played");
      }
    }
  };
  check(bracket.rounds);
  if (bracket.losers_bracket) check(*bracket.losers_bracket);
}

}  // namespace

std::vector<std::string> compute_standings(const Bracket& bracket, const std::vector<MatchResult>& results) {
  std::map<std::string, const MatchResult*> index;
  for (const auto& r : results) index.emplace(r.match_id, &r);
  require_complete(bracket, index);

  std::map<std::string, std::size_t> seed;
  std::map<std::string, double> cumulative;
  std::map<std::string, int> wins;
  std::map<std::string, int> losses;
  std::map<std::string, int> eliminated_at;
  for (std::size_t i = 0; i < bracket.entrants.size(); ++i) {
    seed[bracket.entrants[i]] = i;
    cumulative[bracket.entrants[i]] = 0.0;
    wins[bracket.entrants[i]] = 0;
  }
  for (const auto& r : results) {
    cumulative[r.concept_a] += r.aggregate_a.value;
    cumulative[r.concept_b] += r.aggregate_b.value;
    ++wins[r.winner];
    const auto& loser = r.loser();
    int lives = bracket.format == TournamentFormat::double_elim ? 2 : 1;
    if (++losses[loser] == lives) eliminated_at[loser] = r.stage;
  }

  std::vector<std::string> order = bracket.entrants;
  auto by_seed = [&](const std::string& x, const std::string& y) { return seed.at(x) < seed.at(y); };

  if (bracket.format == TournamentFormat::single_elim || bracket.format == TournamentFormat::double_elim) {
    const auto& final_round = bracket.rounds.back();
    const std::string champion = index.at(final_round.back().match_id)->winner;
    std::stable_sort(order.begin(), order.end(), [&](const std::string& x, const std::string& y) {
      if ((x == champion) != (y == champion)) return x == champion;
      int ex = eliminated_at.count(x) ? eliminated_at.at(x) : 0;
      int ey = eliminated_at.count(y) ? eliminated_at.at(y) : 0;
      if (ex != ey) return ex > ey;
      if (cumulative.at(x) != cumulative.at(y)) return cumulative.at(x) > cumulative.at(y);
      return by_seed(x, y);
    });
    return order;
  }

  if (bracket.format == TournamentFormat::swiss) {
    for (const auto& round : bracket.rounds) {
      for (const auto& p : round) {
        if (p.bye) ++wins[*p.a];
      }
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](const std::string& x, const std::string& y) {
    if (wins.at(x) != wins.at(y)) return wins.at(x) > wins.at(y);
    if (cumulative.at(x) != cumulative.at(y)) return cumulative.at(x) > cumulative.at(y);
    return by_seed(x, y);
  });

  // Head-to-head inside groups tied on wins and cumulative aggregate.
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && wins.at(order[end]) == wins.at(order[start]) &&
           cumulative.at(order[end]) == cumulative.at(order[start])) {
      ++end;
    }
    if (end - start > 1) {
      std::set<std::string> group(order.begin() + static_cast<std::ptrdiff_t>(start),
                                  order.begin() + static_cast<std::ptrdiff_t>(end));
      std::map<std::string, int> h2h;
      for (const auto& r : results) {
        if (group.count(r.concept_a) && group.count(r.concept_b)) ++h2h[r.winner];
      }
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(end),
                       [&](const std::string& x, const std::string& y) {
                         if (h2h[x] != h2h[y]) return h2h[x] > h2h[y];
                         return by_seed(x, y);
                       });
    }
    start = end;
  }
  return order;
}

std::vector<std::string> flag_revisit(const Bracket& bracket, const std::vector<MatchResult>& results,
                                      const std::vector<std::string>& standings) {
  std::set<std::string> flagged;
  switch (bracket.format) {
    case TournamentFormat::single_elim: {
      const int rounds = static_cast<int>(bracket.rounds.size());
      // Last three rounds (quarterfinal onward); smaller brackets skip round one.
      const int from = std::max(2, rounds - 2);
      for (const auto& r : results) {
        if (r.side == BracketSide::winners && r.round >= from) flagged.insert(r.loser());
      }
      break;
    }
    case TournamentFormat::double_elim: {
      if (standings.size() > 1) flagged.insert(standings[1]);
      const int lb_rounds = bracket.losers_bracket ? static_cast<int>(bracket.losers_bracket->size()) : 0;
      for (const auto& r : results) {
        if (r.side == BracketSide::losers && r.round > lb_rounds - 2) flagged.insert(r.loser());
      }
      break;
    }
    case TournamentFormat::round_robin:
    case TournamentFormat::swiss: {
      const std::size_t take = (standings.size() - 1) / 2;
      for (std::size_t i = 1; i <= take && i < standings.size(); ++i) flagged.insert(standings[i]);
      break;
    }
  }
  if (!standings.empty()) flagged.erase(standings.front());
  std::vector<std::string> out;
  for (const auto& id : standings) {
    if (flagged.count(id)) out.push_back(id);
  }
  return out;
}

GateDecision apply_quality_gates(const AggregateScore& champion_aggregate, const std::vector<Evaluation>& evaluations,
                                 const std::set<std::string>& reader_ids, const GateConfig& gates) {
  if (evaluations.empty()) fail(ErrorKind::input, "quality gates need at least one evaluation");
  GateDecision d;
  d.min_score_pass = champion_aggregate.value >= gates.min_score - kGateSlack;

  const auto& members = champion_aggregate.per_member_values;
  if (!members.empty()) {
    auto above = std::count_if(members.begin(), members.end(), [&](const MemberScore& m) {
      return m.value > gates.consensus_score + kGateSlack;
    });
    d.consensus_share = static_cast<double>(above) / static_cast<double>(members.size());
  }
  d.consensus_pass = !members.empty() && d.consensus_share >= gates.consensus_fraction - kGateSlack;

  int readers = 0;
  int would_read = 0;
  for (const auto& e : evaluations) {
    if (e.fatal_flaw) d.fatal_flaws.push_back(*e.fatal_flaw);
    if (!reader_ids.count(e.persona_id)) continue;
    ++readers;
    if (e.would_read) ++would_read;
  }
  if (readers > 0) d.would_read_share = static_cast<double>(would_read) / readers;
  d.would_read_pass = readers > 0 && d.would_read_share >= gates.would_read_fraction - kGateSlack;
  d.fatal_flaw_free = d.fatal_flaws.empty();
  bool all = d.min_score_pass && d.consensus_pass && d.would_read_pass && d.fatal_flaw_free;
  d.outcome = all ? GateOutcome::advance : GateOutcome::human_review;
  return d;
}

}  // namespace readerpanel
