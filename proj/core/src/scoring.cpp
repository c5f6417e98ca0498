#include "readerpanel/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "readerpanel/common.hpp"

namespace readerpanel {

const Criterion* Rubric::find(std::string_view name) const {
  for (const auto& c : criteria) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void Rubric::validate() const {
  if (criteria.empty()) fail(ErrorKind::schema, "rubric has no criteria");
  std::set<std::string_view> names;
  for (const auto& c : criteria) {
    if (c.name.empty()) fail(ErrorKind::schema, "criterion with empty name");
    if (!names.insert(c.name).second) fail(ErrorKind::schema, "duplicate criterion '" + c.name + "'");
    if (!(c.weight > 0.0)) fail(ErrorKind::schema, "criterion '" + c.name + "' must have positive weight");
    if (!(c.min_score < c.max_score)) {
      fail(ErrorKind::schema, "criterion '" + c.name + "' needs min_score < max_score");
    }
  }
}

Rubric default_rubric() {
  return Rubric{{{"Market Appeal", 1.0, 0.0, 10.0},
                 {"Originality", 0.8, 0.0, 10.0},
                 {"Execution Potential", 0.9, 0.0, 10.0},
                 {"Audience Fit", 1.0, 0.0, 10.0}},
                std::nullopt};
}

RubricRegistry RubricRegistry::parse(std::string_view jsonl) {
  RubricRegistry registry;
  for (const auto& record : parse_versioned_jsonl(jsonl, "readerpanel.rubrics")) {
    Rubric rubric;
    if (record.contains("imprint") && !record.at("imprint").is_null()) {
      rubric.imprint = record.at("imprint").get<std::string>();
    }
    for (const auto& c : record.at("criteria")) {
      rubric.criteria.push_back(Criterion{c.at("name").get<std::string>(), c.at("weight").get<double>(),
                                          c.value("min_score", 0.0), c.value("max_score", 10.0)});
    }
    rubric.validate();
    for (const auto& existing : registry.rubrics_) {
      if (existing.imprint == rubric.imprint) {
        fail(ErrorKind::configuration, "duplicate rubric for imprint '" + rubric.imprint.value_or("") + "'");
      }
    }
    registry.rubrics_.push_back(std::move(rubric));
  }
  return registry;
}

const RubricRegistry& RubricRegistry::shipped() {
  static const RubricRegistry kRegistry = parse(shipped_data("rubrics.jsonl"));
  return kRegistry;
}

const Rubric& RubricRegistry::for_imprint(std::string_view imprint) const {
  const Rubric* fallback = nullptr;
  for (const auto& r : rubrics_) {
    if (r.imprint && *r.imprint == imprint) return r;
    if (!r.imprint) fallback = &r;
  }
  if (fallback == nullptr) fail(ErrorKind::configuration, "rubric registry has no default rubric");
  return *fallback;
}

void validate_scores(const CriterionScores& scores, const Rubric& rubric) {
  for (const auto& c : rubric.criteria) {
    auto it = scores.find(c.name);
    if (it == scores.end()) fail(ErrorKind::schema, "missing score for criterion '" + c.name + "'");
    double s = it->second;
    if (!std::isfinite(s) || s < c.min_score || s > c.max_score) {
      fail(ErrorKind::range, "score " + format_number(s, 3) + " for '" + c.name + "' outside [" +
                                 format_number(c.min_score) + ", " + format_number(c.max_score) + "]");
    }
  }
  for (const auto& [name, _] : scores) {
    if (rubric.find(name) == nullptr) fail(ErrorKind::schema, "unexpected criterion '" + name + "'");
  }
}

double weighted_criterion_mean(const CriterionScores& scores, const Rubric& rubric) {
  validate_scores(scores, rubric);
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& c : rubric.criteria) {
    weighted += c.weight * scores.find(c.name)->second;
    total += c.weight;
  }
  return weighted / total;
}

AggregateScore aggregate_panel(const std::vector<MemberScore>& member_scores,
                               const std::optional<SegmentWeights>& segment_weights) {
  if (member_scores.empty()) fail(ErrorKind::input, "aggregate_panel needs at least one member score");

  std::vector<double> weights(member_scores.size(), 1.0);
  if (segment_weights) {
    for (std::size_t i = 0; i < member_scores.size(); ++i) {
      auto it = segment_weights->find(member_scores[i].persona_id);
      if (it == segment_weights->end() || !(it->second > 0.0)) {
        fail(ErrorKind::input, "no positive segment weight for '" + member_scores[i].persona_id + "'");
      }
      weights[i] = it->second;
    }
  }

  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < member_scores.size(); ++i) {
    weighted += weights[i] * member_scores[i].value;
    total += weights[i];
  }
  AggregateScore out;
  out.per_member_values = member_scores;
  out.mean = weighted / total;
  out.value = out.mean;

  double var = 0.0;
  for (std::size_t i = 0; i < member_scores.size(); ++i) {
    double d = member_scores[i].value - out.mean;
    var += weights[i] * d * d;
  }
  out.stddev = std::sqrt(var / total);

  // Strictly beyond 2 sigma; the slack absorbs rounding so that a member sitting
  // exactly on the boundary (z = 2) is not flagged.
  const double limit = 2.0 * out.stddev;
  const double slack = 1e-9 * std::max(1.0, limit);
  for (const auto& m : member_scores) {
    if (std::abs(m.value - out.mean) > limit + slack) out.outlier_ids.push_back(m.persona_id);
  }
  return out;
}

}  // namespace readerpanel
