#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "readerpanel/common.hpp"
#include "readerpanel/data.hpp"

namespace readerpanel {

enum class AgeGroup { child, teen, young_adult, adult, middle_aged, senior, elder };
enum class Gender { female, male, nonbinary };
enum class Education { primary, secondary, some_college, bachelors, graduate };
enum class ReadingLevel { beginner, intermediate, advanced, expert };
enum class BookLength { short_length, medium, long_length, epic };
enum class ReviewFrequency { never, rarely, sometimes, often };
enum class Level { low, medium, high };
enum class BookFormat { physical, digital, audio };
enum class ReadingMood { adventurous, comfort_seeking, challenge_seeking };
enum class RiskTolerance { conservative, moderate, aggressive };
enum class DecisionStyle { data_driven, intuitive, collaborative };

template <> struct EnumNames<AgeGroup> {
  static constexpr std::array<std::string_view, 7> names{
      "child", "teen", "young_adult", "adult", "middle_aged", "senior", "elder"};
};
template <> struct EnumNames<Gender> {
  static constexpr std::array<std::string_view, 3> names{"female", "male", "nonbinary"};
};
template <> struct EnumNames<Education> {
  static constexpr std::array<std::string_view, 5> names{
      "primary", "secondary", "some_college", "bachelors", "graduate"};
};
template <> struct EnumNames<ReadingLevel> {
  static constexpr std::array<std::string_view, 4> names{
      "beginner", "intermediate", "advanced", "expert"};
};
template <> struct EnumNames<BookLength> {
  static constexpr std::array<std::string_view, 4> names{"short", "medium", "long", "epic"};
};
template <> struct EnumNames<ReviewFrequency> {
  static constexpr std::array<std::string_view, 4> names{"never", "rarely", "sometimes", "often"};
};
template <> struct EnumNames<Level> {
  static constexpr std::array<std::string_view, 3> names{"low", "medium", "high"};
};
template <> struct EnumNames<BookFormat> {
  static constexpr std::array<std::string_view, 3> names{"physical", "digital", "audio"};
};
template <> struct EnumNames<ReadingMood> {
  static constexpr std::array<std::string_view, 3> names{
      "adventurous", "comfort_seeking", "challenge_seeking"};
};
template <> struct EnumNames<RiskTolerance> {
  static constexpr std::array<std::string_view, 3> names{"conservative", "moderate", "aggressive"};
};
template <> struct EnumNames<DecisionStyle> {
  static constexpr std::array<std::string_view, 3> names{
      "data_driven", "intuitive", "collaborative"};
};

/// "middle_aged" -> "middle aged"
std::string human_label(std::string_view enum_name);

struct ReaderPersona {
  std::string id;
  // Demographics.
  AgeGroup age_group = AgeGroup::adult;
  Gender gender = Gender::female;
  std::string location;
  int income_tier = 3;
  Education education = Education::secondary;
  // Reading characteristics.
  ReadingLevel reading_level = ReadingLevel::intermediate;
  int books_per_year = 12;
  std::vector<std::string> preferred_genres;
  std::vector<std::string> disliked_genres;
  BookLength preferred_length = BookLength::medium;
  // Behavioral patterns.
  std::vector<std::string> discovery_methods;
  ReviewFrequency review_frequency = ReviewFrequency::sometimes;
  Level social_sharing = Level::medium;
  Level price_sensitivity = Level::medium;
  std::vector<BookFormat> format_preferences;
  // Psychographics.
  std::vector<std::string> reading_goals;
  std::vector<std::string> personality_traits;
  std::vector<std::string> content_sensitivities;
  ReadingMood reading_mood = ReadingMood::adventurous;
  std::string life_stage;
  std::vector<std::string> recent_reads;
  // Meta-parameters, each in [0, 1].
  double consistency_score = 1.0;
  double reliability_score = 1.0;

  bool operator==(const ReaderPersona&) const = default;
};

/// Throws a constraint error naming the first violated invariant.
void validate(const ReaderPersona& persona);

struct PublisherPersona {
  std::string name;
  std::string imprint;
  RiskTolerance risk_tolerance = RiskTolerance::moderate;
  DecisionStyle decision_style = DecisionStyle::collaborative;
  std::vector<std::string> preferred_topics;
  std::vector<std::string> vulnerabilities;

  bool operator==(const PublisherPersona&) const = default;
};

/// Anyone who sits on a judging panel.
using PanelMember = std::variant<ReaderPersona, PublisherPersona>;

const std::string& member_id(const PanelMember& member);
bool is_reader(const PanelMember& member);

// ---------------------------------------------------------------------------
// Attribute model shared by distributions, profiles and diversity checks
// ---------------------------------------------------------------------------

enum class AttributeShape { scalar, list };

struct AttributeInfo {
  std::string_view name;
  AttributeShape shape;
  /// Ordinal attributes can be widened by one step for adjacent audiences.
  bool ordinal;
  /// Key into the distribution config holding this attribute's weights.
  std::string_view weight_key;
};

/// Every constrainable ReaderPersona attribute, in generation order.
const std::vector<AttributeInfo>& persona_attributes();
const AttributeInfo* find_attribute(std::string_view name);

/// String view of one attribute's value(s), e.g. {"adult"} or {"thriller", "crime"}.
std::vector<std::string> attribute_values(const ReaderPersona& persona, std::string_view name);

// ---------------------------------------------------------------------------
// Distribution config
// ---------------------------------------------------------------------------

struct WeightMap {
  std::vector<std::string> values;
  std::vector<double> weights;

  double weight_of(std::string_view value) const;
  bool has_support() const;
};

struct CountRange {
  int min = 0;
  int max = 0;
};

struct DistributionConfig {
  /// Keyed by AttributeInfo::weight_key.
  std::map<std::string, WeightMap, std::less<>> weights;
  CountRange preferred_genre_count{1, 4};
  CountRange disliked_genre_count{0, 3};
  CountRange tag_list_count{1, 3};
  CountRange content_sensitivity_count{0, 2};
  double consistency_min = 0.5;
  double consistency_max = 1.0;
  double reliability_min = 0.5;
  double reliability_max = 1.0;

  /// The shipped distribution.json.
  static const DistributionConfig& defaults();
  static DistributionConfig from_json(const json& doc);

  const WeightMap& weights_for(std::string_view key) const;
  /// Configuration error when any attribute has empty support, an enum
  /// attribute names a value outside its enum, or a range is malformed.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Demographic profiles
// ---------------------------------------------------------------------------

struct AttributeConstraint {
  /// Scalar: the value must be one of these. List: every element must be one
  /// of these. Empty means unrestricted.
  std::vector<std::string> allowed;
  /// List attributes only: elements that must be present.
  std::vector<std::string> include;

  bool operator==(const AttributeConstraint&) const = default;
};

struct DemographicProfile {
  std::map<std::string, AttributeConstraint> constraints;

  bool empty() const { return constraints.empty(); }
  bool satisfied_by(const ReaderPersona& persona) const;
  /// Constraint error if an attribute is unknown, a value set is empty, or
  /// the profile cannot be satisfied under `dist`.
  void validate(const DistributionConfig& dist) const;

  static DemographicProfile from_json(const json& doc);
  json to_json() const;

  bool operator==(const DemographicProfile&) const = default;
};

// ---------------------------------------------------------------------------
// Factory
// ---------------------------------------------------------------------------

ReaderPersona generate_random(std::uint64_t seed,
                              const DistributionConfig& dist = DistributionConfig::defaults());

ReaderPersona generate_targeted(const DemographicProfile& profile, std::uint64_t seed,
                                const DistributionConfig& dist = DistributionConfig::defaults());

struct PersonaTemplate {
  std::string id;
  std::string description;
  /// Core attributes pinned by the archetype.
  DemographicProfile core;
};

class TemplateRegistry {
 public:
  static const TemplateRegistry& shipped();
  static TemplateRegistry parse(std::string_view jsonl);

  const PersonaTemplate& find(std::string_view id) const;
  const std::vector<PersonaTemplate>& templates() const { return templates_; }

 private:
  std::vector<PersonaTemplate> templates_;
};

ReaderPersona generate_from_template(std::string_view template_id, std::uint64_t seed);
ReaderPersona generate_from_template(const TemplateRegistry& registry, std::string_view template_id,
                                     std::uint64_t seed, const DistributionConfig& dist);

class PublisherRegistry {
 public:
  static const PublisherRegistry& shipped();
  static PublisherRegistry parse(std::string_view jsonl);

  const PublisherPersona& find(std::string_view name) const;
  const std::vector<PublisherPersona>& personas() const { return personas_; }
  /// Personas whose imprint matches or whose preferred topics overlap the
  /// given domain topics, in registry order.
  std::vector<PublisherPersona> for_imprint(std::string_view imprint,
                                            const std::vector<std::string>& domain_topics) const;

 private:
  std::vector<PublisherPersona> personas_;
};

// ---------------------------------------------------------------------------
// Genre vocabulary and clusters
// ---------------------------------------------------------------------------

class GenreClusters {
 public:
  static const GenreClusters& shipped();
  static GenreClusters parse(std::string_view jsonl);

  /// Empty when the genre is outside the cluster map.
  std::string cluster_of(std::string_view genre) const;
  const std::vector<std::string>& clusters() const { return clusters_; }
  std::vector<std::string> genres_in(std::string_view cluster) const;

 private:
  std::map<std::string, std::string, std::less<>> genre_to_cluster_;
  std::vector<std::string> clusters_;
};

}  // namespace readerpanel
