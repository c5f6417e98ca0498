#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "readerpanel/store.hpp"
#include "readerpanel/tournament.hpp"

namespace readerpanel {

/// A review item plus what an editor needs to judge it: for a flagged
/// evaluation the evaluation, its slop report, the persona and the concept;
/// for a gate referral the champion and its gate decision.
struct ReviewEntry {
  ReviewItem item;
  json detail;
};

json to_json_value(const ReviewEntry& entry);

/// Detail for one item of a loaded tournament.
json review_detail(const TournamentState& state, const ReviewItem& item);

struct DecisionOutcome {
  ReviewItem item;
  TournamentStatus status = TournamentStatus::running;
  /// Set when resuming the tournament after the decision failed (for
  /// example a match left with no usable evaluation). The decision itself
  /// is recorded regardless.
  std::optional<std::string> resume_error;
};

/// Human-in-the-loop operations over a store. Mutations take the
/// tournament's writer lock, so two services on one store cannot interleave.
class ReviewService {
 public:
  explicit ReviewService(EventStore& store) : store_(store) {}

  /// Pending items, newest first (highest creating sequence first, then
  /// tournament id). Optionally restricted to one tournament.
  std::vector<ReviewEntry> pending(const std::optional<std::string>& tournament_id = std::nullopt) const;

  /// Lookup error for an unknown item, state error if already decided,
  /// concurrency error if the tournament is locked by another writer.
  DecisionOutcome decide(const std::string& item_id, ReviewDecisionValue decision, const std::string& operator_id,
                         const std::string& timestamp = {});

 private:
  std::string owner_of(const std::string& item_id) const;

  EventStore& store_;
  std::mutex mutex_;
};

}  // namespace readerpanel
