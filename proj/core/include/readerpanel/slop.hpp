#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "readerpanel/evaluation.hpp"
#include "readerpanel/persona.hpp"

namespace readerpanel {

/// Lower-cases and splits on any run of characters that are not ASCII
/// letters or digits. Bytes >= 0x80 are kept inside tokens so UTF-8 words
/// survive intact.
std::vector<std::string> tokenize(std::string_view text);

/// Phrase, pattern and vocabulary banks. Loaded once and shared read-only.
struct SlopBanks {
  struct Opener {
    std::string source;
    std::regex pattern;
  };

  std::vector<std::vector<std::string>> slop_phrases;  // tokenized
  std::vector<Opener> openers;
  std::vector<std::vector<std::string>> qualifiers;  // tokenized
  std::set<std::string, std::less<>> academic_vocabulary;
  std::set<std::string, std::less<>> adult_register;
  std::set<std::string, std::less<>> cost_vocabulary;

  static const SlopBanks& shipped();
  /// Reads the six bank files from a directory, using the shipped file names.
  static SlopBanks load(const std::filesystem::path& dir);
  static SlopBanks from_text(std::string_view phrases, std::string_view openers,
                             std::string_view qualifiers, std::string_view academic,
                             std::string_view adult, std::string_view cost);
};

struct SlopWeights {
  double repetitive_phrasing = 1.0;
  double generic_framing = 0.8;
  double circular_reasoning = 1.2;
  double score_clustering = 1.5;
  double audience_mismatch = 1.0;

  double weight(CheckName name) const;
  double total() const;
};

struct SlopThresholds {
  /// composite < flag_at is accepted.
  double flag_at = 0.4;
  /// composite >= reject_at is rejected.
  double reject_at = 0.6;

  bool operator==(const SlopThresholds&) const = default;
};

Disposition disposition_for(double composite, const SlopThresholds& thresholds = {});

CheckResult check_repetitive_phrasing(std::string_view text,
                                      const SlopBanks& banks = SlopBanks::shipped());
CheckResult check_generic_framing(std::string_view text,
                                  const SlopBanks& banks = SlopBanks::shipped());
CheckResult check_circular_reasoning(std::string_view reasoning, std::string_view concept_text);
CheckResult check_score_clustering(const std::vector<double>& scores);
/// `persona` is null for publisher personas, for which no sub-check applies.
CheckResult check_audience_mismatch(const Evaluation& evaluation, const ReaderPersona* persona,
                                    const Concept& book, const Rubric& rubric,
                                    const SlopBanks& banks = SlopBanks::shipped());

/// Weighted mean of the five check scores. Schema error unless there is
/// exactly one result per check.
SlopReport composite_slop(const std::vector<CheckResult>& results, const SlopWeights& weights = {},
                          const SlopThresholds& thresholds = {});

class SlopDetector {
 public:
  SlopDetector() : SlopDetector(SlopBanks::shipped()) {}
  explicit SlopDetector(const SlopBanks& banks, SlopWeights weights = {},
                        SlopThresholds thresholds = {})
      : banks_(&banks), weights_(weights), thresholds_(thresholds) {}

  SlopReport analyze(const Evaluation& evaluation, const PanelMember& member,
                     const Concept& book, const Rubric& rubric) const;
  /// Same, for corpora where the evaluating persona is unknown.
  SlopReport analyze(const Evaluation& evaluation, const ReaderPersona* persona,
                     const Concept& book, const Rubric& rubric) const;

  const SlopThresholds& thresholds() const { return thresholds_; }
  const SlopWeights& weights() const { return weights_; }

 private:
  const SlopBanks* banks_;
  SlopWeights weights_;
  SlopThresholds thresholds_;
};

struct BatchSummary {
  int total = 0;
  int accepted = 0;
  int flagged = 0;
  int rejected = 0;
  /// Check that raised flags in the most reports; ties go to the earlier
  /// check. Empty when no check raised a flag.
  std::optional<CheckName> most_common_flag;
  /// Reports in which each check raised at least one flag, in CheckName order.
  std::array<int, 5> flag_counts{};
  /// Ten equal-width bins over [0, 1]; 1.0 lands in the last bin.
  std::array<int, 10> score_histogram{};

  bool operator==(const BatchSummary&) const = default;
};

BatchSummary batch_summary(const std::vector<SlopReport>& reports);

}  // namespace readerpanel
