#include "readerpanel/review.hpp"

#include <algorithm>

#include "readerpanel/config.hpp"
#include "readerpanel/serialize.hpp"

namespace readerpanel {

namespace {

// Stands in when the recorded judge cannot be rebuilt here (for example a
// test backend); accepting still works, regeneration reports a judge error.
class UnavailableJudge : public JudgeBackend {
 public:
  UnavailableJudge(std::string spec, std::string reason) : spec_(std::move(spec)), reason_(std::move(reason)) {}
  Evaluation evaluate(const PanelMember&, const Concept&, const Rubric&, const EvaluationContext&) override {
    fail(ErrorKind::judge, "judge '" + spec_ + "' unavailable: " + reason_);
  }
  std::string describe() const override { return spec_; }

 private:
  std::string spec_;
  std::string reason_;
};

std::unique_ptr<JudgeBackend> judge_for(const TournamentState& state) {
  try {
    return make_judge(state.judge, state.config.seed);
  } catch (const Error& e) {
    return std::make_unique<UnavailableJudge>(state.judge, e.what());
  }
}

}  // namespace

json to_json_value(const ReviewEntry& entry) {
  json j = entry.item;
  j["detail"] = entry.detail;
  return j;
}

json review_detail(const TournamentState& state, const ReviewItem& item) {
  json detail = json::object();
  if (item.kind == ReviewKind::gate_referral) {
    if (state.result) {
      detail["champion"] = state.concept_by_id(state.result->champion);
      detail["gate_decision"] = state.result->gate_decision;
    }
    return detail;
  }
  for (const auto& [key, record] : state.evaluations) {
    if (key.str() != item.payload_ref) continue;
    detail["match_id"] = key.match_id;
    detail["pass"] = key.pass;
    detail["record"] = record;
    detail["concept"] = state.concept_by_id(key.concept_id);
    if (state.panel) {
      for (const auto& m : state.panel->all_members()) {
        if (member_id(m) == key.persona_id) detail["persona"] = member_to_json(m);
      }
    }
  }
  return detail;
}

std::vector<ReviewEntry> ReviewService::pending(const std::optional<std::string>& tournament_id) const {
  std::vector<ReviewEntry> out;
  std::vector<std::string> ids;
  if (tournament_id) {
    ids.push_back(*tournament_id);
  } else {
    ids = store_.tournament_ids();
  }
  for (const auto& id : ids) {
    auto state = store_.load_tournament(id);
    for (const auto& item : state.review_items) {
      if (item.status == ReviewStatus::pending) out.push_back({item, review_detail(state, item)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ReviewEntry& a, const ReviewEntry& b) {
    if (a.item.created_seq != b.item.created_seq) return a.item.created_seq > b.item.created_seq;
    return a.item.tournament_id < b.item.tournament_id;
  });
  return out;
}

std::string ReviewService::owner_of(const std::string& item_id) const {
  if (item_id.rfind("gate-", 0) == 0 && store_.exists(item_id.substr(5))) return item_id.substr(5);
  for (const auto& id : store_.tournament_ids()) {
    auto state = store_.load_tournament(id);
    if (state.find_review_item(item_id)) return id;
  }
  fail(ErrorKind::lookup, "unknown review item '" + item_id + "'");
}

DecisionOutcome ReviewService::decide(const std::string& item_id, ReviewDecisionValue decision,
                                      const std::string& operator_id, const std::string& timestamp) {
  std::lock_guard guard(mutex_);
  const std::string tournament = owner_of(item_id);
  TournamentWriter writer(store_, tournament);
  // Reload under the lock so the decision sees every committed event.
  TournamentState state = store_.load_tournament(tournament);
  auto backend = judge_for(state);
  SlopDetector detector(SlopBanks::shipped(), SlopWeights{}, state.config.slop);
  TournamentEngine engine(state, *backend, detector, &writer);
  const ReviewItem* before = state.find_review_item(item_id);
  if (before && before->status != ReviewStatus::pending) {
    fail(ErrorKind::state, "review item '" + item_id + "' already decided");
  }

  DecisionOutcome outcome;
  try {
    outcome.status = engine.decide(item_id, decision, operator_id, timestamp);
  } catch (const Error& e) {
    const ReviewItem* item = state.find_review_item(item_id);
    // Failures before the decision was recorded are the caller's problem.
    if (!item || item->status == ReviewStatus::pending) throw;
    outcome.status = state.status;
    outcome.resume_error = e.what();
  }
  outcome.item = *state.find_review_item(item_id);
  store_.write_snapshot(state);
  return outcome;
}

}  // namespace readerpanel
