#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "readerpanel/common.hpp"
#include "readerpanel/scoring.hpp"

namespace readerpanel {

/// A book concept: the unit every tournament compares.
struct Concept {
  std::string id;
  std::string title;
  std::string description;
  std::string imprint;
  std::vector<std::string> genre_tags;
  std::map<std::string, std::string> metadata;

  /// Title and description joined; what circular-reasoning checks compare against.
  std::string text() const;
  void validate() const;

  bool operator==(const Concept&) const = default;
};

enum class CheckName {
  repetitive_phrasing,
  generic_framing,
  circular_reasoning,
  score_clustering,
  audience_mismatch,
};

template <> struct EnumNames<CheckName> {
  static constexpr std::array<std::string_view, 5> names{
      "repetitive_phrasing", "generic_framing", "circular_reasoning", "score_clustering",
      "audience_mismatch"};
};

struct CheckResult {
  CheckName check_name = CheckName::repetitive_phrasing;
  /// In [0, 1]; higher means more slop-like.
  double score = 0.0;
  std::map<std::string, double> components;
  std::vector<std::string> flags;

  bool operator==(const CheckResult&) const = default;
};

enum class Disposition { accept, flag, reject };

template <> struct EnumNames<Disposition> {
  static constexpr std::array<std::string_view, 3> names{"accept", "flag", "reject"};
};

struct SlopReport {
  /// One result per check, in CheckName order.
  std::vector<CheckResult> per_check;
  double composite = 0.0;
  Disposition disposition = Disposition::accept;

  const CheckResult& check(CheckName name) const;

  bool operator==(const SlopReport&) const = default;
};

/// One judge's verdict on one concept.
struct Evaluation {
  std::string persona_id;
  std::string concept_id;
  CriterionScores criterion_scores;
  std::string reasoning;
  bool would_read = false;
  std::optional<std::string> fatal_flaw;
  int attempt = 1;
  std::optional<SlopReport> slop_report;

  /// Checks the invariants against the rubric the evaluation was scored on.
  void validate(const Rubric& rubric) const;

  bool operator==(const Evaluation&) const = default;
};

}  // namespace readerpanel
