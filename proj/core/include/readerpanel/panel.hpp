#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "readerpanel/persona.hpp"

namespace readerpanel {

/// Target audience and editorial topics for one imprint.
struct ImprintProfile {
  std::string imprint;
  DemographicProfile audience;
  std::vector<std::string> domain_topics;

  bool operator==(const ImprintProfile&) const = default;
};

class ImprintRegistry {
 public:
  static const ImprintRegistry& shipped();
  static ImprintRegistry parse(std::string_view jsonl);

  const ImprintProfile& find(std::string_view imprint) const;
  const std::vector<ImprintProfile>& profiles() const { return profiles_; }

 private:
  std::vector<ImprintProfile> profiles_;
};

enum class MemberOrigin { anchored, adjacent, wildcard };

template <> struct EnumNames<MemberOrigin> {
  static constexpr std::array<std::string_view, 3> names{"anchored", "adjacent", "wildcard"};
};

struct QuotaBreakdown {
  int anchored = 0;
  int adjacent = 0;
  int wildcard = 0;
  int expert = 0;

  int total() const { return anchored + adjacent + wildcard + expert; }
  bool operator==(const QuotaBreakdown&) const = default;
};

/// Largest-remainder apportionment of 40/30/20/10 percent over `size`.
/// Equal remainders go to anchored, then adjacent, wildcard, expert.
QuotaBreakdown apportion_quotas(int size);

struct Panel {
  std::string id;
  std::string imprint;
  std::vector<ReaderPersona> members;
  /// Parallel to `members`: the quota slot each reader fills.
  std::vector<MemberOrigin> origins;
  std::vector<PublisherPersona> experts;
  QuotaBreakdown quota_breakdown;

  int size() const { return static_cast<int>(members.size() + experts.size()); }
  /// Readers first, then experts.
  std::vector<PanelMember> all_members() const;
  /// Throws a constraint error on duplicate ids/names or a quota mismatch.
  void validate() const;

  bool operator==(const Panel&) const = default;
};

struct DiversityRules {
  int min_age_groups = 3;
  int min_reading_levels = 3;
  int min_genre_clusters = 4;
  /// No single value of a share-checked attribute may exceed this fraction.
  double max_attribute_share = 0.5;
  double max_gender_share = 0.6;
};

/// Attributes covered by the single-value share cap.
const std::vector<std::string_view>& share_checked_attributes();

struct DiversityReport {
  int age_group_count = 0;
  int reading_level_count = 0;
  int genre_cluster_count = 0;
  double max_attribute_share = 0.0;
  double gender_max_share = 0.0;
  bool passed = false;
  /// Subset of {"age_groups", "reading_levels", "genre_clusters",
  /// "attribute_share", "gender_balance"} in that order.
  std::vector<std::string> violations;

  bool operator==(const DiversityReport&) const = default;
};

/// Computed over reader members only; experts model editorial views and
/// are not part of the demographic mix.
DiversityReport check_diversity(const Panel& panel, const GenreClusters& clusters = GenreClusters::shipped(),
                                const DiversityRules& rules = {});

/// Integer distance from passing: missing age groups, reading levels and
/// genre clusters, plus the count above each share cap. Zero iff the panel
/// passes.
int diversity_deficiency(const std::vector<ReaderPersona>& readers,
                         const GenreClusters& clusters = GenreClusters::shipped(),
                         const DiversityRules& rules = {});

/// Profile for an adjacent-audience member: ordinal constraints widened by
/// one step each way, categorical constraints dropped with probability 0.5.
DemographicProfile adjacent_profile(const DemographicProfile& audience, std::uint64_t seed,
                                    const DistributionConfig& dist = DistributionConfig::defaults());

Panel compose_panel(const ImprintProfile& imprint, int size, const PublisherRegistry& registry,
                    std::uint64_t seed, const DistributionConfig& dist = DistributionConfig::defaults());

/// Raised when repair runs out of rounds; carries the last report.
class RepairError : public Error {
 public:
  RepairError(const std::string& message, DiversityReport report)
      : Error(ErrorKind::repair, message), report_(std::move(report)) {}

  const DiversityReport& report() const noexcept { return report_; }

 private:
  DiversityReport report_;
};

/// Swaps wildcard (then adjacent) readers for targeted replacements until the
/// panel passes. Anchored readers and experts are never touched. A panel
/// that already passes is returned unchanged.
Panel repair_diversity(const Panel& panel, std::uint64_t seed, int max_rounds = 50,
                       const DistributionConfig& dist = DistributionConfig::defaults(),
                       const GenreClusters& clusters = GenreClusters::shipped(),
                       const DiversityRules& rules = {});

/// compose_panel followed by repair_diversity.
Panel compose_and_repair(const ImprintProfile& imprint, int size, const PublisherRegistry& registry,
                         std::uint64_t seed, int max_rounds = 50,
                         const DistributionConfig& dist = DistributionConfig::defaults());

}  // namespace readerpanel
