#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "readerpanel/data.hpp"

namespace readerpanel {

struct Criterion {
  std::string name;
  double weight = 1.0;
  double min_score = 0.0;
  double max_score = 10.0;

  bool operator==(const Criterion&) const = default;
};

struct Rubric {
  std::vector<Criterion> criteria;
  std::optional<std::string> imprint;

  const Criterion* find(std::string_view name) const;
  /// Schema error on duplicate names, an empty list, weight <= 0 or min >= max.
  void validate() const;

  bool operator==(const Rubric&) const = default;
};

/// Market Appeal 1.0, Originality 0.8, Execution Potential 0.9,
/// Audience Fit 1.0, each scored 0-10.
Rubric default_rubric();

/// Rubric overrides keyed by imprint; the entry without an imprint is the
/// fallback.
class RubricRegistry {
 public:
  static const RubricRegistry& shipped();
  static RubricRegistry parse(std::string_view jsonl);

  /// The imprint's override when one exists, otherwise the default.
  const Rubric& for_imprint(std::string_view imprint) const;

 private:
  std::vector<Rubric> rubrics_;
};

using CriterionScores = std::map<std::string, double, std::less<>>;

/// Sum(w_i * s_i) / Sum(w_i). Schema error on missing or extra criteria,
/// range error on a score outside its criterion's bounds.
double weighted_criterion_mean(const CriterionScores& scores, const Rubric& rubric);

/// Checks coverage and ranges only.
void validate_scores(const CriterionScores& scores, const Rubric& rubric);

struct MemberScore {
  std::string persona_id;
  double value = 0.0;

  bool operator==(const MemberScore&) const = default;
};

struct AggregateScore {
  double value = 0.0;
  std::vector<MemberScore> per_member_values;
  std::vector<std::string> outlier_ids;
  double mean = 0.0;
  /// Population standard deviation.
  double stddev = 0.0;

  bool operator==(const AggregateScore&) const = default;
};

using SegmentWeights = std::map<std::string, double, std::less<>>;

/// Mean of the member scores (weighted when segment weights are given).
/// Members further than 2 population standard deviations from the mean are
/// listed in outlier_ids but still count toward the value.
AggregateScore aggregate_panel(const std::vector<MemberScore>& member_scores,
                               const std::optional<SegmentWeights>& segment_weights = std::nullopt);

}  // namespace readerpanel
