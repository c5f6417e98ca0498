#include "readerpanel/persona.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace readerpanel {

std::string human_label(std::string_view enum_name) {
  std::string out(enum_name);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

const std::string& member_id(const PanelMember& member) {
  return std::visit(
      [](const auto& m) -> const std::string& {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ReaderPersona>) {
          return m.id;
        } else {
          return m.name;
        }
      },
      member);
}

bool is_reader(const PanelMember& member) { return std::holds_alternative<ReaderPersona>(member); }

namespace {

bool contains(const std::vector<std::string>& items, std::string_view value) {
  return std::find(items.begin(), items.end(), value) != items.end();
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

template <NamedEnum E>
std::vector<std::string> enum_strings() {
  std::vector<std::string> out;
  for (auto name : EnumNames<E>::names) out.emplace_back(name);
  return out;
}

/// Enumerated value set for enum-typed attributes; empty for free text and numbers.
std::vector<std::string> enum_domain(std::string_view name) {
  if (name == "age_group") return enum_strings<AgeGroup>();
  if (name == "gender") return enum_strings<Gender>();
  if (name == "education") return enum_strings<Education>();
  if (name == "reading_level") return enum_strings<ReadingLevel>();
  if (name == "preferred_length") return enum_strings<BookLength>();
  if (name == "review_frequency") return enum_strings<ReviewFrequency>();
  if (name == "social_sharing" || name == "price_sensitivity") return enum_strings<Level>();
  if (name == "format_preferences") return enum_strings<BookFormat>();
  if (name == "reading_mood") return enum_strings<ReadingMood>();
  return {};
}

bool is_numeric_attribute(std::string_view name) {
  return name == "income_tier" || name == "books_per_year";
}

void check_value(std::string_view attribute, const std::string& value) {
  auto domain = enum_domain(attribute);
  if (!domain.empty()) {
    if (!contains(domain, value)) {
      fail(ErrorKind::constraint,
           "value '" + value + "' is not valid for attribute " + std::string(attribute));
    }
  } else if (is_numeric_attribute(attribute)) {
    if (!parse_int(value)) {
      fail(ErrorKind::constraint,
           "value '" + value + "' is not an integer for attribute " + std::string(attribute));
    }
  }
}

template <NamedEnum E>
std::vector<std::string> names_of(const std::vector<E>& values) {
  std::vector<std::string> out;
  for (auto v : values) out.emplace_back(enum_name(v));
  return out;
}

}  // namespace

void validate(const ReaderPersona& p) {
  if (p.id.empty()) fail(ErrorKind::constraint, "persona id is empty");
  if (!(p.consistency_score >= 0.0 && p.consistency_score <= 1.0)) {
    fail(ErrorKind::constraint, "consistency_score outside [0,1] for " + p.id);
  }
  if (!(p.reliability_score >= 0.0 && p.reliability_score <= 1.0)) {
    fail(ErrorKind::constraint, "reliability_score outside [0,1] for " + p.id);
  }
  for (const auto& g : p.preferred_genres) {
    if (contains(p.disliked_genres, g)) {
      fail(ErrorKind::constraint, "genre '" + g + "' both preferred and disliked for " + p.id);
    }
  }
  if (p.format_preferences.empty()) fail(ErrorKind::constraint, "format_preferences empty for " + p.id);
  if (p.income_tier < 1 || p.income_tier > 5) fail(ErrorKind::constraint, "income_tier outside 1-5");
  if (p.books_per_year < 0) fail(ErrorKind::constraint, "books_per_year negative");
}

const std::vector<AttributeInfo>& persona_attributes() {
  using S = AttributeShape;
  static const std::vector<AttributeInfo> kAttributes{
      {"age_group", S::scalar, true, "age_group"},
      {"gender", S::scalar, false, "gender"},
      {"location", S::scalar, false, "location"},
      {"income_tier", S::scalar, true, "income_tier"},
      {"education", S::scalar, true, "education"},
      {"reading_level", S::scalar, true, "reading_level"},
      {"books_per_year", S::scalar, true, "books_per_year"},
      {"preferred_genres", S::list, false, "genres"},
      {"disliked_genres", S::list, false, "genres"},
      {"preferred_length", S::scalar, true, "preferred_length"},
      {"discovery_methods", S::list, false, "discovery_methods"},
      {"review_frequency", S::scalar, true, "review_frequency"},
      {"social_sharing", S::scalar, true, "social_sharing"},
      {"price_sensitivity", S::scalar, true, "price_sensitivity"},
      {"format_preferences", S::list, false, "format_preferences"},
      {"reading_goals", S::list, false, "reading_goals"},
      {"personality_traits", S::list, false, "personality_traits"},
      {"content_sensitivities", S::list, false, "content_sensitivities"},
      {"reading_mood", S::scalar, false, "reading_mood"},
      {"life_stage", S::scalar, false, "life_stage"},
      {"recent_reads", S::list, false, "recent_reads"},
  };
  return kAttributes;
}

const AttributeInfo* find_attribute(std::string_view name) {
  for (const auto& info : persona_attributes()) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

std::vector<std::string> attribute_values(const ReaderPersona& p, std::string_view name) {
  if (name == "age_group") return {std::string(enum_name(p.age_group))};
  if (name == "gender") return {std::string(enum_name(p.gender))};
  if (name == "location") return {p.location};
  if (name == "income_tier") return {std::to_string(p.income_tier)};
  if (name == "education") return {std::string(enum_name(p.education))};
  if (name == "reading_level") return {std::string(enum_name(p.reading_level))};
  if (name == "books_per_year") return {std::to_string(p.books_per_year)};
  if (name == "preferred_genres") return p.preferred_genres;
  if (name == "disliked_genres") return p.disliked_genres;
  if (name == "preferred_length") return {std::string(enum_name(p.preferred_length))};
  if (name == "discovery_methods") return p.discovery_methods;
  if (name == "review_frequency") return {std::string(enum_name(p.review_frequency))};
  if (name == "social_sharing") return {std::string(enum_name(p.social_sharing))};
  if (name == "price_sensitivity") return {std::string(enum_name(p.price_sensitivity))};
  if (name == "format_preferences") return names_of(p.format_preferences);
  if (name == "reading_goals") return p.reading_goals;
  if (name == "personality_traits") return p.personality_traits;
  if (name == "content_sensitivities") return p.content_sensitivities;
  if (name == "reading_mood") return {std::string(enum_name(p.reading_mood))};
  if (name == "life_stage") return {p.life_stage};
  if (name == "recent_reads") return p.recent_reads;
  fail(ErrorKind::lookup, "unknown persona attribute '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// DistributionConfig
// ---------------------------------------------------------------------------

double WeightMap::weight_of(std::string_view value) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return weights[i];
  }
  return 0.0;
}

bool WeightMap::has_support() const {
  return std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
}

const WeightMap& DistributionConfig::weights_for(std::string_view key) const {
  auto it = weights.find(key);
  if (it == weights.end()) {
    fail(ErrorKind::configuration, "distribution has no weights for '" + std::string(key) + "'");
  }
  return it->second;
}

void DistributionConfig::validate() const {
  std::set<std::string_view> keys;
  for (const auto& info : persona_attributes()) keys.insert(info.weight_key);
  for (auto key : keys) {
    const auto& map = weights_for(key);
    if (map.values.size() != map.weights.size()) {
      fail(ErrorKind::configuration, "malformed weight map for '" + std::string(key) + "'");
    }
    for (double w : map.weights) {
      if (!(w >= 0.0)) fail(ErrorKind::configuration, "negative weight in '" + std::string(key) + "'");
    }
    if (!map.has_support()) {
      fail(ErrorKind::configuration, "empty support for attribute '" + std::string(key) + "'");
    }
    auto domain = enum_domain(key);
    for (const auto& v : map.values) {
      if (!domain.empty() && !contains(domain, v)) {
        fail(ErrorKind::configuration,
             "value '" + v + "' extends the fixed enum for '" + std::string(key) + "'");
      }
      if (is_numeric_attribute(key) && !parse_int(v)) {
        fail(ErrorKind::configuration, "non-integer value '" + v + "' for '" + std::string(key) + "'");
      }
    }
  }
  for (auto [name, range] : {std::pair{"preferred_genre_count", preferred_genre_count},
                             std::pair{"disliked_genre_count", disliked_genre_count},
                             std::pair{"tag_list_count", tag_list_count},
                             std::pair{"content_sensitivity_count", content_sensitivity_count}}) {
    if (range.min < 0 || range.max < range.min) {
      fail(ErrorKind::configuration, std::string("invalid count range ") + name);
    }
  }
  if (preferred_genre_count.min < 1) {
    fail(ErrorKind::configuration, "preferred_genre_count.min must be at least 1");
  }
  auto check_unit = [](double lo, double hi, const char* name) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
      fail(ErrorKind::configuration, std::string("invalid range for ") + name);
    }
  };
  check_unit(consistency_min, consistency_max, "consistency_score");
  check_unit(reliability_min, reliability_max, "reliability_score");
}

DistributionConfig DistributionConfig::from_json(const json& doc) {
  if (!doc.is_object()) fail(ErrorKind::configuration, "distribution config must be an object");
  DistributionConfig cfg;
  std::set<std::string> keys;
  for (const auto& info : persona_attributes()) keys.emplace(info.weight_key);
  for (const auto& key : keys) {
    if (!doc.contains(key)) continue;
    const auto& node = doc.at(key);
    if (!node.is_object()) fail(ErrorKind::configuration, "weights for '" + key + "' must be an object");
    std::vector<std::pair<std::string, double>> entries;
    for (const auto& [value, weight] : node.items()) {
      if (!weight.is_number()) fail(ErrorKind::configuration, "non-numeric weight in '" + key + "'");
      entries.emplace_back(value, weight.get<double>());
    }
    // json objects iterate alphabetically; restore the natural order.
    auto domain = enum_domain(key);
    if (!domain.empty()) {
      auto rank = [&](const std::string& v) {
        auto it = std::find(domain.begin(), domain.end(), v);
        return it - domain.begin();
      };
      std::stable_sort(entries.begin(), entries.end(),
                       [&](const auto& a, const auto& b) { return rank(a.first) < rank(b.first); });
    } else if (is_numeric_attribute(key)) {
      std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return parse_int(a.first).value_or(0) < parse_int(b.first).value_or(0);
      });
    }
    WeightMap map;
    for (auto& [value, weight] : entries) {
      map.values.push_back(value);
      map.weights.push_back(weight);
    }
    cfg.weights[key] = std::move(map);
  }
  auto read_range = [&](const char* key, CountRange& range) {
    if (!doc.contains(key)) return;
    range.min = doc.at(key).value("min", range.min);
    range.max = doc.at(key).value("max", range.max);
  };
  read_range("preferred_genre_count", cfg.preferred_genre_count);
  read_range("disliked_genre_count", cfg.disliked_genre_count);
  read_range("tag_list_count", cfg.tag_list_count);
  read_range("content_sensitivity_count", cfg.content_sensitivity_count);
  if (doc.contains("consistency_score")) {
    cfg.consistency_min = doc["consistency_score"].value("min", cfg.consistency_min);
    cfg.consistency_max = doc["consistency_score"].value("max", cfg.consistency_max);
  }
  if (doc.contains("reliability_score")) {
    cfg.reliability_min = doc["reliability_score"].value("min", cfg.reliability_min);
    cfg.reliability_max = doc["reliability_score"].value("max", cfg.reliability_max);
  }
  cfg.validate();
  return cfg;
}

const DistributionConfig& DistributionConfig::defaults() {
  static const DistributionConfig kDefaults =
      DistributionConfig::from_json(json::parse(shipped_data("distribution.json")));
  return kDefaults;
}

// ---------------------------------------------------------------------------
// DemographicProfile
// ---------------------------------------------------------------------------

bool DemographicProfile::satisfied_by(const ReaderPersona& persona) const {
  for (const auto& [name, c] : constraints) {
    auto values = attribute_values(persona, name);
    if (!c.allowed.empty()) {
      for (const auto& v : values) {
        if (!contains(c.allowed, v)) return false;
      }
    }
    for (const auto& required : c.include) {
      if (!contains(values, required)) return false;
    }
  }
  return true;
}

void DemographicProfile::validate(const DistributionConfig& dist) const {
  for (const auto& [name, c] : constraints) {
    const auto* info = find_attribute(name);
    if (info == nullptr) {
      fail(ErrorKind::constraint, "profile constrains unknown attribute '" + name + "'");
    }
    if (c.allowed.empty() && c.include.empty()) {
      fail(ErrorKind::constraint, "empty allowed-value set for '" + name + "'");
    }
    if (info->shape == AttributeShape::scalar && !c.include.empty()) {
      fail(ErrorKind::constraint, "'include' is only meaningful for list attribute, not '" + name + "'");
    }
    for (const auto& v : c.allowed) check_value(name, v);
    for (const auto& v : c.include) {
      check_value(name, v);
      if (!c.allowed.empty() && !contains(c.allowed, v)) {
        fail(ErrorKind::constraint, "required value '" + v + "' of '" + name + "' is not allowed");
      }
    }
  }
  auto get = [&](const char* name) -> const AttributeConstraint* {
    auto it = constraints.find(name);
    return it == constraints.end() ? nullptr : &it->second;
  };
  const auto* preferred = get("preferred_genres");
  const auto* disliked = get("disliked_genres");
  if (preferred && disliked) {
    for (const auto& g : preferred->include) {
      if (contains(disliked->include, g)) {
        fail(ErrorKind::constraint, "genre '" + g + "' required as both preferred and disliked");
      }
    }
  }
  if (preferred && !preferred->allowed.empty()) {
    std::size_t available = 0;
    for (const auto& g : preferred->allowed) {
      if (!disliked || !contains(disliked->include, g)) ++available;
    }
    if (available < static_cast<std::size_t>(std::max(1, dist.preferred_genre_count.min))) {
      fail(ErrorKind::constraint, "preferred genre constraint leaves too few genres");
    }
  }
}

DemographicProfile DemographicProfile::from_json(const json& doc) {
  DemographicProfile profile;
  if (doc.is_null()) return profile;
  if (!doc.is_object()) fail(ErrorKind::constraint, "profile must be an object");
  auto strings = [](const json& node) {
    std::vector<std::string> out;
    if (node.is_string()) {
      out.push_back(node.get<std::string>());
    } else if (node.is_array()) {
      for (const auto& v : node) {
        out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else if (node.is_number_integer()) {
      out.push_back(node.dump());
    } else {
      fail(ErrorKind::constraint, "constraint values must be strings or arrays");
    }
    return out;
  };
  for (const auto& [name, node] : doc.items()) {
    AttributeConstraint c;
    if (node.is_object()) {
      if (node.contains("allowed")) c.allowed = strings(node.at("allowed"));
      if (node.contains("include")) c.include = strings(node.at("include"));
    } else {
      c.allowed = strings(node);
    }
    profile.constraints.emplace(name, std::move(c));
  }
  return profile;
}

json DemographicProfile::to_json() const {
  json doc = json::object();
  for (const auto& [name, c] : constraints) {
    const auto* info = find_attribute(name);
    if (info && info->shape == AttributeShape::scalar && c.include.empty()) {
      doc[name] = c.allowed;
    } else {
      json node = json::object();
      if (!c.allowed.empty()) node["allowed"] = c.allowed;
      if (!c.include.empty()) node["include"] = c.include;
      doc[name] = std::move(node);
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Factory
// ---------------------------------------------------------------------------

namespace {

/// Candidate values and their weights after applying an allowed-set filter.
/// Falls back to uniform weights when the distribution gives the allowed set
/// no mass (profiles override the distribution).
std::pair<std::vector<std::string>, std::vector<double>> restricted(
    const WeightMap& map, const std::vector<std::string>& allowed,
    const std::vector<std::string>& excluded) {
  std::vector<std::string> values;
  std::vector<double> weights;
  if (allowed.empty()) {
    for (std::size_t i = 0; i < map.values.size(); ++i) {
      if (contains(excluded, map.values[i])) continue;
      values.push_back(map.values[i]);
      weights.push_back(map.weights[i]);
    }
  } else {
    for (const auto& v : allowed) {
      if (contains(excluded, v) || contains(values, v)) continue;
      values.push_back(v);
      weights.push_back(map.weight_of(v));
    }
  }
  bool any = std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
  if (!any) std::fill(weights.begin(), weights.end(), 1.0);
  return {std::move(values), std::move(weights)};
}

CountRange count_range_for(std::string_view name, const DistributionConfig& dist) {
  if (name == "preferred_genres") return dist.preferred_genre_count;
  if (name == "disliked_genres") return dist.disliked_genre_count;
  if (name == "content_sensitivities") return dist.content_sensitivity_count;
  if (name == "format_preferences") return {1, 3};
  return dist.tag_list_count;
}

std::vector<std::string> sample_list(Rng& rng, std::string_view name, const WeightMap& map,
                                     const AttributeConstraint* c, CountRange range,
                                     const std::vector<std::string>& excluded) {
  static const AttributeConstraint kNone{};
  if (c == nullptr) c = &kNone;
  int target = range.min + static_cast<int>(rng.index(static_cast<std::size_t>(range.max - range.min + 1)));
  target = std::max(target, static_cast<int>(c->include.size()));
  std::vector<std::string> chosen = c->include;
  auto [values, weights] = restricted(map, c->allowed, excluded);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (contains(chosen, values[i])) weights[i] = 0.0;
  }
  while (static_cast<int>(chosen.size()) < target) {
    bool any = std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
    if (!any) break;
    auto pick = rng.weighted(weights);
    chosen.push_back(values[pick]);
    weights[pick] = 0.0;
  }
  if (static_cast<int>(chosen.size()) < range.min) {
    fail(ErrorKind::constraint, "not enough admissible values for '" + std::string(name) + "'");
  }
  return chosen;
}

std::string sample_scalar(Rng& rng, std::string_view name, const WeightMap& map,
                          const AttributeConstraint* c) {
  static const std::vector<std::string> kNoExclusions;
  auto [values, weights] = restricted(map, c ? c->allowed : kNoExclusions, kNoExclusions);
  if (values.empty()) {
    fail(ErrorKind::constraint, "no admissible value for '" + std::string(name) + "'");
  }
  return values[rng.weighted(weights)];
}

template <NamedEnum E>
std::vector<E> parse_enum_list(const std::vector<std::string>& names) {
  std::vector<E> out;
  for (const auto& n : names) out.push_back(parse_enum<E>(n));
  return out;
}

}  // namespace

ReaderPersona generate_targeted(const DemographicProfile& profile, std::uint64_t seed,
                                const DistributionConfig& dist) {
  dist.validate();
  profile.validate(dist);

  Rng rng(seed);
  std::map<std::string, std::vector<std::string>, std::less<>> drawn;
  auto constraint_for = [&](std::string_view name) -> const AttributeConstraint* {
    auto it = profile.constraints.find(std::string(name));
    return it == profile.constraints.end() ? nullptr : &it->second;
  };

  for (const auto& info : persona_attributes()) {
    const auto& map = dist.weights_for(info.weight_key);
    const auto* c = constraint_for(info.name);
    if (info.shape == AttributeShape::scalar) {
      drawn[std::string(info.name)] = {sample_scalar(rng, info.name, map, c)};
      continue;
    }
    std::vector<std::string> excluded;
    if (info.name == "preferred_genres") {
      if (const auto* d = constraint_for("disliked_genres")) excluded = d->include;
    } else if (info.name == "disliked_genres") {
      excluded = drawn.at("preferred_genres");
    }
    drawn[std::string(info.name)] =
        sample_list(rng, info.name, map, c, count_range_for(info.name, dist), excluded);
  }

  ReaderPersona p;
  p.id = "reader-" + hex64(stable_hash(seed, {"reader-persona"}));
  auto one = [&](const char* name) -> const std::string& { return drawn.at(name).front(); };
  p.age_group = parse_enum<AgeGroup>(one("age_group"));
  p.gender = parse_enum<Gender>(one("gender"));
  p.location = one("location");
  p.income_tier = parse_int(one("income_tier")).value();
  p.education = parse_enum<Education>(one("education"));
  p.reading_level = parse_enum<ReadingLevel>(one("reading_level"));
  p.books_per_year = parse_int(one("books_per_year")).value();
  p.preferred_genres = drawn.at("preferred_genres");
  p.disliked_genres = drawn.at("disliked_genres");
  p.preferred_length = parse_enum<BookLength>(one("preferred_length"));
  p.discovery_methods = drawn.at("discovery_methods");
  p.review_frequency = parse_enum<ReviewFrequency>(one("review_frequency"));
  p.social_sharing = parse_enum<Level>(one("social_sharing"));
  p.price_sensitivity = parse_enum<Level>(one("price_sensitivity"));
  p.format_preferences = parse_enum_list<BookFormat>(drawn.at("format_preferences"));
  p.reading_goals = drawn.at("reading_goals");
  p.personality_traits = drawn.at("personality_traits");
  p.content_sensitivities = drawn.at("content_sensitivities");
  p.reading_mood = parse_enum<ReadingMood>(one("reading_mood"));
  p.life_stage = one("life_stage");
  p.recent_reads = drawn.at("recent_reads");
  p.consistency_score = rng.uniform(dist.consistency_min, dist.consistency_max);
  p.reliability_score = rng.uniform(dist.reliability_min, dist.reliability_max);

  validate(p);
  if (!profile.satisfied_by(p)) {
    fail(ErrorKind::constraint, "generated persona does not satisfy its profile");
  }
  return p;
}

ReaderPersona generate_random(std::uint64_t seed, const DistributionConfig& dist) {
  return generate_targeted(DemographicProfile{}, seed, dist);
}

// ---------------------------------------------------------------------------
// Registries
// ---------------------------------------------------------------------------

TemplateRegistry TemplateRegistry::parse(std::string_view jsonl) {
  TemplateRegistry registry;
  for (const auto& record : parse_versioned_jsonl(jsonl, "readerpanel.templates")) {
    PersonaTemplate t;
    t.id = record.at("id").get<std::string>();
    t.description = record.value("description", "");
    t.core = DemographicProfile::from_json(record.at("core"));
    for (const auto& existing : registry.templates_) {
      if (existing.id == t.id) fail(ErrorKind::configuration, "duplicate template id '" + t.id + "'");
    }
    registry.templates_.push_back(std::move(t));
  }
  return registry;
}

const TemplateRegistry& TemplateRegistry::shipped() {
  static const TemplateRegistry kRegistry = parse(shipped_data("templates.jsonl"));
  return kRegistry;
}

const PersonaTemplate& TemplateRegistry::find(std::string_view id) const {
  for (const auto& t : templates_) {
    if (t.id == id) return t;
  }
  fail(ErrorKind::lookup, "unknown persona template '" + std::string(id) + "'");
}

ReaderPersona generate_from_template(const TemplateRegistry& registry, std::string_view template_id,
                                     std::uint64_t seed, const DistributionConfig& dist) {
  const auto& t = registry.find(template_id);
  auto persona = generate_targeted(t.core, stable_hash(seed, {"template", t.id}), dist);
  persona.id = "reader-" + t.id + "-" + hex64(stable_hash(seed, {"template-persona", t.id}));
  return persona;
}

ReaderPersona generate_from_template(std::string_view template_id, std::uint64_t seed) {
  return generate_from_template(TemplateRegistry::shipped(), template_id, seed,
                                DistributionConfig::defaults());
}

PublisherRegistry PublisherRegistry::parse(std::string_view jsonl) {
  PublisherRegistry registry;
  for (const auto& record : parse_versioned_jsonl(jsonl, "readerpanel.publishers")) {
    PublisherPersona p;
    p.name = record.at("name").get<std::string>();
    p.imprint = record.at("imprint").get<std::string>();
    p.risk_tolerance = parse_enum<RiskTolerance>(record.at("risk_tolerance").get<std::string>());
    p.decision_style = parse_enum<DecisionStyle>(record.at("decision_style").get<std::string>());
    p.preferred_topics = record.at("preferred_topics").get<std::vector<std::string>>();
    p.vulnerabilities = record.value("vulnerabilities", std::vector<std::string>{});
    if (p.preferred_topics.empty()) {
      fail(ErrorKind::configuration, "publisher persona '" + p.name + "' has no preferred topics");
    }
    for (const auto& existing : registry.personas_) {
      if (existing.name == p.name) {
        fail(ErrorKind::configuration, "duplicate publisher persona '" + p.name + "'");
      }
    }
    registry.personas_.push_back(std::move(p));
  }
  return registry;
}

const PublisherRegistry& PublisherRegistry::shipped() {
  static const PublisherRegistry kRegistry = parse(shipped_data("publishers.jsonl"));
  return kRegistry;
}

const PublisherPersona& PublisherRegistry::find(std::string_view name) const {
  for (const auto& p : personas_) {
    if (p.name == name) return p;
  }
  fail(ErrorKind::lookup, "unknown publisher persona '" + std::string(name) + "'");
}

std::vector<PublisherPersona> PublisherRegistry::for_imprint(
    std::string_view imprint, const std::vector<std::string>& domain_topics) const {
  std::vector<PublisherPersona> out;
  for (const auto& p : personas_) {
    bool match = p.imprint == imprint;
    for (const auto& topic : p.preferred_topics) {
      if (contains(domain_topics, topic)) match = true;
    }
    if (match) out.push_back(p);
  }
  return out;
}

GenreClusters GenreClusters::parse(std::string_view jsonl) {
  GenreClusters clusters;
  for (const auto& record : parse_versioned_jsonl(jsonl, "readerpanel.genres")) {
    auto genre = record.at("genre").get<std::string>();
    auto cluster = record.at("cluster").get<std::string>();
    if (!clusters.genre_to_cluster_.emplace(genre, cluster).second) {
      fail(ErrorKind::configuration, "genre '" + genre + "' mapped twice");
    }
    if (!contains(clusters.clusters_, cluster)) clusters.clusters_.push_back(cluster);
  }
  return clusters;
}

const GenreClusters& GenreClusters::shipped() {
  static const GenreClusters kClusters = parse(shipped_data("genres.jsonl"));
  return kClusters;
}

std::string GenreClusters::cluster_of(std::string_view genre) const {
  auto it = genre_to_cluster_.find(genre);
  return it == genre_to_cluster_.end() ? std::string{} : it->second;
}

std::vector<std::string> GenreClusters::genres_in(std::string_view cluster) const {
  std::vector<std::string> out;
  for (const auto& [genre, c] : genre_to_cluster_) {
    if (c == cluster) out.push_back(genre);
  }
  return out;
}

}  // namespace readerpanel
