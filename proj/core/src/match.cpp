#include <algorithm>

#include "readerpanel/tournament.hpp"

namespace readerpanel {

std::string EvaluationKey::str() const {
  return match_id + "/" + std::to_string(pass) + "/" + persona_id + "/" + concept_id;
}

std::map<std::string, double, std::less<>> criterion_means(const std::vector<Evaluation>& evaluations,
                                                          const Rubric& rubric) {
  std::map<std::string, double, std::less<>> means;
  if (evaluations.empty()) return means;
  for (const auto& c : rubric.criteria) {
    double sum = 0.0;
    for (const auto& e : evaluations) {
      auto it = e.criterion_scores.find(c.name);
      if (it == e.criterion_scores.end()) fail(ErrorKind::schema, "evaluation lacks criterion " + c.name);
      sum += it->second;
    }
    means[c.name] = sum / static_cast<double>(evaluations.size());
  }
  return means;
}

namespace {

struct Side {
  std::vector<MemberScore> scores;
  std::vector<Evaluation> accepted;
  int flagged = 0;
  int failed = 0;
};

Side collect(const std::vector<EvaluationRecord>& records, const std::string& concept_id, int pass,
             const Rubric& rubric) {
  Side side;
  for (const auto& r : records) {
    if (r.key.concept_id != concept_id || r.key.pass != pass) continue;
    switch (r.status) {
      case EvaluationStatus::accepted:
        side.scores.push_back({r.key.persona_id, weighted_criterion_mean(r.evaluation->criterion_scores, rubric)});
        side.accepted.push_back(*r.evaluation);
        break;
      case EvaluationStatus::flagged: ++side.flagged; break;
      case EvaluationStatus::failed: ++side.failed; break;
    }
  }
  return side;
}

bool coin(std::uint64_t seed, const std::string& match_id) {
  return (stable_hash(seed, {"tiebreak", match_id}) & 1U) == 0;
}

}  // namespace

MatchDecision decide_match(const Pairing& pairing, const std::vector<EvaluationRecord>& records, const Rubric& rubric,
                           Tiebreak tiebreak, std::uint64_t seed) {
  if (!pairing.ready()) fail(ErrorKind::state, "match " + pairing.match_id + " is not ready");
  const std::string& a = *pairing.a;
  const std::string& b = *pairing.b;

  MatchDecision decision;
  auto side_a = collect(records, a, 0, rubric);
  auto side_b = collect(records, b, 0, rubric);
  for (const auto* side : {&side_a, &side_b}) {
    if (!side->scores.empty()) continue;
    const auto& id = side == &side_a ? a : b;
    if (side->flagged == 0) {
      throw MatchError("match " + pairing.match_id + ": no usable evaluation for concept " + id + " (" +
                       std::to_string(side->failed) + " failed)");
    }
    decision.kind = MatchDecision::Kind::paused;
    decision.waiting_on.push_back(id);
  }
  if (decision.kind == MatchDecision::Kind::paused) return decision;

  MatchResult result;
  result.match_id = pairing.match_id;
  result.side = pairing.side;
  result.round = pairing.round;
  result.stage = pairing.stage;
  result.concept_a = a;
  result.concept_b = b;
  result.aggregate_a = aggregate_panel(side_a.scores);
  result.aggregate_b = aggregate_panel(side_b.scores);
  for (const auto& r : records) {
    result.evaluations.push_back({r.key.persona_id, r.key.concept_id, r.key.pass, r.status});
  }

  const double va = result.aggregate_a.value;
  const double vb = result.aggregate_b.value;
  if (va != vb) {
    result.winner = va > vb ? a : b;
  } else {
    result.tiebreak_used = tiebreak;
    switch (tiebreak) {
      case Tiebreak::random:
        result.winner = coin(seed, pairing.match_id) ? a : b;
        break;
      case Tiebreak::criteria_weighted: {
        auto ma = criterion_means(side_a.accepted, rubric);
        auto mb = criterion_means(side_b.accepted, rubric);
        std::vector<const Criterion*> order;
        for (const auto& c : rubric.criteria) order.push_back(&c);
        std::stable_sort(order.begin(), order.end(),
                         [](const Criterion* x, const Criterion* y) { return x->weight > y->weight; });
        for (const auto* c : order) {
          if (ma.at(c->name) != mb.at(c->name)) {
            result.winner = ma.at(c->name) > mb.at(c->name) ? a : b;
            break;
          }
        }
        // Identical on every criterion: fall back to the seeded coin.
        if (result.winner.empty()) result.winner = coin(seed, pairing.match_id) ? a : b;
        break;
      }
      case Tiebreak::re_evaluation: {
        bool rerun = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.key.pass == 1; });
        if (!rerun) {
          decision.kind = MatchDecision::Kind::needs_re_evaluation;
          return decision;
        }
        auto ra = collect(records, a, 1, rubric);
        auto rb = collect(records, b, 1, rubric);
        if (!ra.scores.empty() && !rb.scores.empty()) {
          double xa = aggregate_panel(ra.scores).value;
          double xb = aggregate_panel(rb.scores).value;
          if (xa != xb) result.winner = xa > xb ? a : b;
        }
        // Bounded to one rerun; a second tie is settled by the coin.
        if (result.winner.empty()) result.winner = coin(seed, pairing.match_id) ? a : b;
        break;
      }
    }
  }
  decision.kind = MatchDecision::Kind::decided;
  decision.result = std::move(result);
  return decision;
}

}  // namespace readerpanel
