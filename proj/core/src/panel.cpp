#include "readerpanel/panel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

namespace readerpanel {

// ---------------------------------------------------------------------------
// Imprint registry
// ---------------------------------------------------------------------------

ImprintRegistry ImprintRegistry::parse(std::string_view jsonl) {
  ImprintRegistry registry;
  for (const auto& record : parse_versioned_jsonl(jsonl, "readerpanel.imprints")) {
    ImprintProfile p;
    p.imprint = record.at("imprint").get<std::string>();
    p.audience = DemographicProfile::from_json(record.value("audience", json::object()));
    p.domain_topics = record.value("domain_topics", std::vector<std::string>{});
    p.audience.validate(DistributionConfig::defaults());
    registry.profiles_.push_back(std::move(p));
  }
  return registry;
}

const ImprintRegistry& ImprintRegistry::shipped() {
  static const ImprintRegistry kRegistry = parse(shipped_data("imprints.jsonl"));
  return kRegistry;
}

const ImprintProfile& ImprintRegistry::find(std::string_view imprint) const {
  for (const auto& p : profiles_) {
    if (p.imprint == imprint) return p;
  }
  fail(ErrorKind::lookup, "unknown imprint '" + std::string(imprint) + "'");
}

// ---------------------------------------------------------------------------
// Quotas and panels
// ---------------------------------------------------------------------------

QuotaBreakdown apportion_quotas(int size) {
  if (size < 0) fail(ErrorKind::sizing, "panel size must be non-negative");
  constexpr std::array<int, 4> kPercent{40, 30, 20, 10};
  std::array<int, 4> seats{};
  std::array<int, 4> remainder{};
  int assigned = 0;
  for (std::size_t i = 0; i < kPercent.size(); ++i) {
    seats[i] = size * kPercent[i] / 100;
    remainder[i] = size * kPercent[i] % 100;
    assigned += seats[i];
  }
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  // stable_sort keeps the anchored > adjacent > wildcard > expert order on ties.
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < size; ++k, ++assigned) ++seats[order[k]];
  return {seats[0], seats[1], seats[2], seats[3]};
}

std::vector<PanelMember> Panel::all_members() const {
  std::vector<PanelMember> out;
  out.reserve(members.size() + experts.size());
  for (const auto& m : members) out.emplace_back(m);
  for (const auto& e : experts) out.emplace_back(e);
  return out;
}

void Panel::validate() const {
  if (origins.size() != members.size()) fail(ErrorKind::constraint, "panel origins do not match members");
  std::set<std::string> ids;
  for (const auto& m : members) {
    readerpanel::validate(m);
    if (!ids.insert(m.id).second) fail(ErrorKind::constraint, "duplicate panel member id " + m.id);
  }
  for (const auto& e : experts) {
    if (!ids.insert(e.name).second) fail(ErrorKind::constraint, "duplicate panel member id " + e.name);
  }
  QuotaBreakdown counted;
  for (auto o : origins) {
    switch (o) {
      case MemberOrigin::anchored: ++counted.anchored; break;
      case MemberOrigin::adjacent: ++counted.adjacent; break;
      case MemberOrigin::wildcard: ++counted.wildcard; break;
    }
  }
  counted.expert = static_cast<int>(experts.size());
  if (counted != quota_breakdown) fail(ErrorKind::constraint, "quota breakdown does not match panel members");
}

// ---------------------------------------------------------------------------
// Diversity
// ---------------------------------------------------------------------------

const std::vector<std::string_view>& share_checked_attributes() {
  static const std::vector<std::string_view> kAttributes{"age_group", "income_tier", "education",
                                                         "reading_level", "location"};
  return kAttributes;
}

namespace {

constexpr double kShareSlack = 1e-9;

/// Largest count that stays within `share` of `n`.
int share_limit(double share, std::size_t n) {
  return static_cast<int>(std::floor(share * static_cast<double>(n) + kShareSlack));
}

struct DiversityMeasure {
  DiversityReport report;
  int deficiency = 0;
};

std::map<std::string, int> value_counts(const std::vector<ReaderPersona>& readers, std::string_view attribute) {
  std::map<std::string, int> counts;
  for (const auto& r : readers) ++counts[attribute_values(r, attribute).front()];
  return counts;
}

DiversityMeasure measure(const std::vector<ReaderPersona>& readers, const GenreClusters& clusters,
                         const DiversityRules& rules) {
  DiversityMeasure m;
  auto& rep = m.report;
  const std::size_t n = readers.size();

  rep.age_group_count = static_cast<int>(value_counts(readers, "age_group").size());
  rep.reading_level_count = static_cast<int>(value_counts(readers, "reading_level").size());
  std::set<std::string> seen_clusters;
  for (const auto& r : readers) {
    for (const auto& g : r.preferred_genres) {
      auto c = clusters.cluster_of(g);
      if (!c.empty()) seen_clusters.insert(c);
    }
  }
  rep.genre_cluster_count = static_cast<int>(seen_clusters.size());

  int share_excess = 0;
  const int share_cap = share_limit(rules.max_attribute_share, n);
  for (auto attribute : share_checked_attributes()) {
    for (const auto& [value, count] : value_counts(readers, attribute)) {
      if (n > 0) rep.max_attribute_share = std::max(rep.max_attribute_share, double(count) / double(n));
      share_excess += std::max(0, count - share_cap);
    }
  }
  int gender_excess = 0;
  const int gender_cap = share_limit(rules.max_gender_share, n);
  for (const auto& [value, count] : value_counts(readers, "gender")) {
    if (n > 0) rep.gender_max_share = std::max(rep.gender_max_share, double(count) / double(n));
    gender_excess += std::max(0, count - gender_cap);
  }

  int age_gap = std::max(0, rules.min_age_groups - rep.age_group_count);
  int level_gap = std::max(0, rules.min_reading_levels - rep.reading_level_count);
  int cluster_gap = std::max(0, rules.min_genre_clusters - rep.genre_cluster_count);
  if (age_gap) rep.violations.emplace_back("age_groups");
  if (level_gap) rep.violations.emplace_back("reading_levels");
  if (cluster_gap) rep.violations.emplace_back("genre_clusters");
  if (share_excess) rep.violations.emplace_back("attribute_share");
  if (gender_excess) rep.violations.emplace_back("gender_balance");
  rep.passed = rep.violations.empty();
  m.deficiency = age_gap + level_gap + cluster_gap + share_excess + gender_excess;
  return m;
}

}  // namespace

DiversityReport check_diversity(const Panel& panel, const GenreClusters& clusters, const DiversityRules& rules) {
  return measure(panel.members, clusters, rules).report;
}

int diversity_deficiency(const std::vector<ReaderPersona>& readers, const GenreClusters& clusters,
                         const DiversityRules& rules) {
  return measure(readers, clusters, rules).deficiency;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

DemographicProfile adjacent_profile(const DemographicProfile& audience, std::uint64_t seed,
                                    const DistributionConfig& dist) {
  Rng rng(seed);
  DemographicProfile out;
  for (const auto& [name, c] : audience.constraints) {
    const auto* info = find_attribute(name);
    if (info == nullptr) fail(ErrorKind::constraint, "profile constrains unknown attribute '" + name + "'");
    if (info->ordinal && info->shape == AttributeShape::scalar && !c.allowed.empty()) {
      const auto& domain = dist.weights_for(info->weight_key).values;
      std::set<std::size_t> widened;
      for (const auto& v : c.allowed) {
        auto it = std::find(domain.begin(), domain.end(), v);
        if (it == domain.end()) continue;
        auto i = static_cast<std::size_t>(it - domain.begin());
        widened.insert(i);
        if (i > 0) widened.insert(i - 1);
        if (i + 1 < domain.size()) widened.insert(i + 1);
      }
      AttributeConstraint wide;
      for (auto i : widened) wide.allowed.push_back(domain[i]);
      if (wide.allowed.empty()) wide = c;
      out.constraints.emplace(name, std::move(wide));
    } else if (!rng.bernoulli(0.5)) {
      out.constraints.emplace(name, c);
    }
  }
  return out;
}

Panel compose_panel(const ImprintProfile& imprint, int size, const PublisherRegistry& registry,
                    std::uint64_t seed, const DistributionConfig& dist) {
  if (size < 5) fail(ErrorKind::sizing, "panel size must be at least 5, got " + std::to_string(size));
  imprint.audience.validate(dist);
  auto experts = registry.for_imprint(imprint.imprint, imprint.domain_topics);
  if (experts.empty()) {
    fail(ErrorKind::configuration, "no publisher persona is registered for imprint '" + imprint.imprint + "'");
  }

  Panel panel;
  panel.imprint = imprint.imprint;
  panel.id = "panel-" + hex64(stable_hash(seed, {"panel", imprint.imprint, std::to_string(size)}));
  panel.quota_breakdown = apportion_quotas(size);
  const auto& q = panel.quota_breakdown;

  std::set<std::string> ids;
  auto add = [&](ReaderPersona p, MemberOrigin origin) {
    if (!ids.insert(p.id).second) fail(ErrorKind::constraint, "persona id collision: " + p.id);
    panel.members.push_back(std::move(p));
    panel.origins.push_back(origin);
  };
  for (int i = 0; i < q.anchored; ++i) {
    add(generate_targeted(imprint.audience, stable_hash(seed, {"anchored", std::to_string(i)}), dist),
        MemberOrigin::anchored);
  }
  for (int i = 0; i < q.adjacent; ++i) {
    auto profile = adjacent_profile(imprint.audience, stable_hash(seed, {"adjacency", std::to_string(i)}), dist);
    add(generate_targeted(profile, stable_hash(seed, {"adjacent", std::to_string(i)}), dist),
        MemberOrigin::adjacent);
  }
  for (int i = 0; i < q.wildcard; ++i) {
    add(generate_random(stable_hash(seed, {"wildcard", std::to_string(i)}), dist), MemberOrigin::wildcard);
  }
  for (int i = 0; i < q.expert; ++i) {
    auto e = experts[static_cast<std::size_t>(i) % experts.size()];
    // A registry smaller than the expert quota is cycled; later copies get
    // a suffix so names stay unique within the panel.
    auto cycle = static_cast<std::size_t>(i) / experts.size();
    if (cycle > 0) e.name += "#" + std::to_string(cycle + 1);
    panel.experts.push_back(std::move(e));
  }
  panel.validate();
  return panel;
}

// ---------------------------------------------------------------------------
// Repair
// ---------------------------------------------------------------------------

namespace {

/// Profile steering a replacement toward whatever the panel currently lacks.
DemographicProfile repair_target(const std::vector<ReaderPersona>& readers, const GenreClusters& clusters,
                                 const DiversityRules& rules, const DistributionConfig& dist, Rng& rng) {
  DemographicProfile profile;
  const std::size_t n = readers.size();
  const int share_cap = share_limit(rules.max_attribute_share, n);

  auto steer = [&](std::string_view attribute, int min_distinct, int cap) {
    const auto* info = find_attribute(attribute);
    const auto& domain = dist.weights_for(info->weight_key).values;
    auto counts = value_counts(readers, attribute);
    std::vector<std::string> allowed;
    bool too_few = static_cast<int>(counts.size()) < min_distinct;
    for (const auto& v : domain) {
      auto it = counts.find(v);
      int count = it == counts.end() ? 0 : it->second;
      if (too_few && count > 0) continue;
      if (count >= cap) continue;  // adding another would not help
      allowed.push_back(v);
    }
    if (!allowed.empty() && allowed.size() < domain.size()) {
      profile.constraints[std::string(attribute)].allowed = std::move(allowed);
    }
  };
  steer("age_group", rules.min_age_groups, share_cap);
  steer("reading_level", rules.min_reading_levels, share_cap);
  steer("income_tier", 0, share_cap);
  steer("education", 0, share_cap);
  steer("location", 0, share_cap);
  steer("gender", 0, share_limit(rules.max_gender_share, n));

  std::set<std::string> present;
  for (const auto& r : readers) {
    for (const auto& g : r.preferred_genres) present.insert(clusters.cluster_of(g));
  }
  std::vector<std::string> missing;
  for (const auto& c : clusters.clusters()) {
    if (!present.count(c)) missing.push_back(c);
  }
  if (static_cast<int>(present.size() - present.count("")) < rules.min_genre_clusters && !missing.empty()) {
    auto genres = clusters.genres_in(missing[rng.index(missing.size())]);
    if (!genres.empty()) profile.constraints["preferred_genres"].include = {genres[rng.index(genres.size())]};
  }
  return profile;
}

}  // namespace

Panel repair_diversity(const Panel& panel, std::uint64_t seed, int max_rounds, const DistributionConfig& dist,
                       const GenreClusters& clusters, const DiversityRules& rules) {
  if (max_rounds < 1) fail(ErrorKind::input, "max_rounds must be positive");
  if (panel.size() < 5) {
    fail(ErrorKind::constraint, "a panel of " + std::to_string(panel.size()) + " cannot satisfy the diversity rules");
  }
  if (panel.origins.size() != panel.members.size()) fail(ErrorKind::constraint, "panel origins do not match members");

  auto current = measure(panel.members, clusters, rules);
  if (current.report.passed) return panel;

  // Anchored readers are fixed, so they alone must fit under every share cap.
  std::vector<ReaderPersona> anchored;
  std::vector<std::size_t> replaceable;
  for (std::size_t i = 0; i < panel.members.size(); ++i) {
    if (panel.origins[i] == MemberOrigin::anchored) anchored.push_back(panel.members[i]);
  }
  for (auto origin : {MemberOrigin::wildcard, MemberOrigin::adjacent}) {
    for (std::size_t i = 0; i < panel.members.size(); ++i) {
      if (panel.origins[i] == origin) replaceable.push_back(i);
    }
  }
  const std::size_t n = panel.members.size();
  for (auto attribute : share_checked_attributes()) {
    for (const auto& [value, count] : value_counts(anchored, attribute)) {
      if (count > share_limit(rules.max_attribute_share, n)) {
        fail(ErrorKind::constraint, "anchored readers alone exceed the share cap on " + std::string(attribute));
      }
    }
  }
  for (const auto& [value, count] : value_counts(anchored, "gender")) {
    if (count > share_limit(rules.max_gender_share, n)) {
      fail(ErrorKind::constraint, "anchored readers alone exceed the gender cap");
    }
  }
  if (replaceable.empty()) fail(ErrorKind::constraint, "panel has no replaceable readers");

  Panel out = panel;
  Rng rng(stable_hash(seed, {"repair", panel.id}));
  constexpr int kCandidates = 12;
  for (int round = 0; round < max_rounds; ++round) {
    std::set<std::string> ids;
    for (const auto& m : out.members) ids.insert(m.id);
    for (const auto& e : out.experts) ids.insert(e.name);

    std::vector<ReaderPersona> candidates;
    for (int k = 0; k < kCandidates; ++k) {
      auto target = repair_target(out.members, clusters, rules, dist, rng);
      auto candidate_seed = stable_hash(seed, {"repair-candidate", panel.id, std::to_string(round), std::to_string(k)});
      ReaderPersona candidate;
      try {
        candidate = generate_targeted(target, candidate_seed, dist);
      } catch (const Error&) {
        candidate = generate_random(candidate_seed, dist);
      }
      if (!ids.count(candidate.id)) candidates.push_back(std::move(candidate));
    }

    int best = current.deficiency;
    std::size_t best_slot = 0;
    const ReaderPersona* best_candidate = nullptr;
    for (auto slot : replaceable) {
      auto trial = out.members;
      for (const auto& c : candidates) {
        trial[slot] = c;
        int d = measure(trial, clusters, rules).deficiency;
        if (d < best) {
          best = d;
          best_slot = slot;
          best_candidate = &c;
        }
      }
    }
    if (best_candidate == nullptr) {
      // No improving swap this round; take a neutral one to move off the plateau.
      auto slot = replaceable[rng.index(replaceable.size())];
      for (const auto& c : candidates) {
        auto trial = out.members;
        trial[slot] = c;
        if (measure(trial, clusters, rules).deficiency == current.deficiency) {
          out.members[slot] = c;
          break;
        }
      }
      continue;
    }
    out.members[best_slot] = *best_candidate;
    current = measure(out.members, clusters, rules);
    if (current.report.passed) {
      out.validate();
      return out;
    }
  }
  throw RepairError("diversity repair did not converge within " + std::to_string(max_rounds) + " rounds",
                    current.report);
}

Panel compose_and_repair(const ImprintProfile& imprint, int size, const PublisherRegistry& registry,
                         std::uint64_t seed, int max_rounds, const DistributionConfig& dist) {
  auto panel = compose_panel(imprint, size, registry, seed, dist);
  return repair_diversity(panel, stable_hash(seed, {"repair-seed"}), max_rounds, dist);
}

}  // namespace readerpanel
