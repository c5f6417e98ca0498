#include "readerpanel/slop.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "readerpanel/data.hpp"

namespace readerpanel {

namespace {

bool is_token_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

std::string ngram_key(const std::vector<std::string>& tokens, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) key += '\x1f';
    key += tokens[start + i];
  }
  return key;
}

/// Occurrences of each token sequence in `tokens`, summed.
std::size_t count_sequences(const std::vector<std::string>& tokens,
                            const std::vector<std::vector<std::string>>& sequences) {
  std::size_t hits = 0;
  for (const auto& seq : sequences) {
    if (seq.empty() || seq.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
      if (std::equal(seq.begin(), seq.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) ++hits;
    }
  }
  return hits;
}

std::vector<std::vector<std::string>> tokenized_bank(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  for (const auto& entry : parse_line_bank(text)) {
    auto tokens = tokenize(entry);
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  return out;
}

std::set<std::string, std::less<>> word_bank(std::string_view text) {
  std::set<std::string, std::less<>> out;
  for (const auto& entry : parse_line_bank(text)) out.insert(to_lower(entry));
  return out;
}

/// Splits at sentence-final punctuation followed by whitespace, and at newlines.
std::vector<std::string> sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      if (!trim(current).empty()) out.push_back(trim(current));
      current.clear();
      continue;
    }
    current += c;
    bool terminal = c == '.' || c == '!' || c == '?';
    bool boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (terminal && boundary) {
      if (!trim(current).empty()) out.push_back(trim(current));
      current.clear();
    }
  }
  if (!trim(current).empty()) out.push_back(trim(current));
  return out;
}

struct Specificity {
  int numbers = 0;
  int proper_nouns = 0;
  int quotes = 0;
  int total() const { return numbers + proper_nouns + quotes; }
};

Specificity measure_specificity(std::string_view text) {
  Specificity s;
  bool sentence_start = true;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (std::isdigit(c)) {
      ++s.numbers;
      while (i < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[i])) ||
              ((text[i] == '.' || text[i] == ',') && i + 1 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[i + 1]))))) {
        ++i;
      }
      sentence_start = false;
      continue;
    }
    if (std::isalpha(c)) {
      std::size_t start = i;
      while (i < text.size() && (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '\'' ||
                                 text[i] == '-')) {
        ++i;
      }
      auto word = text.substr(start, i - start);
      if (!sentence_start && std::isupper(c) && word != "I") ++s.proper_nouns;
      sentence_start = false;
      continue;
    }
    if (c == '.' || c == '!' || c == '?') {
      if (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]))) {
        sentence_start = true;
      }
    } else if (c == '\n') {
      sentence_start = true;
    }
    ++i;
  }

  // Quoted spans: straight double quotes and curly quotes.
  for (std::size_t pos = 0;;) {
    auto open = text.find('"', pos);
    if (open == std::string_view::npos) break;
    auto close = text.find('"', open + 1);
    if (close == std::string_view::npos) break;
    if (close > open + 1) ++s.quotes;
    pos = close + 1;
  }
  constexpr std::string_view kOpen = "\xE2\x80\x9C";
  constexpr std::string_view kClose = "\xE2\x80\x9D";
  for (std::size_t pos = 0;;) {
    auto open = text.find(kOpen, pos);
    if (open == std::string_view::npos) break;
    auto close = text.find(kClose, open + kOpen.size());
    if (close == std::string_view::npos) break;
    if (close > open + kOpen.size()) ++s.quotes;
    pos = close + kClose.size();
  }
  return s;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_token_char(c)) {
      current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// ---------------------------------------------------------------------------
// Banks
// ---------------------------------------------------------------------------

SlopBanks SlopBanks::from_text(std::string_view phrases, std::string_view openers,
                               std::string_view qualifiers, std::string_view academic,
                               std::string_view adult, std::string_view cost) {
  SlopBanks banks;
  banks.slop_phrases = tokenized_bank(phrases);
  for (const auto& source : parse_line_bank(openers)) {
    try {
      banks.openers.push_back(
          {source, std::regex(source, std::regex::ECMAScript | std::regex::icase | std::regex::optimize)});
    } catch (const std::regex_error& e) {
      fail(ErrorKind::configuration, "invalid opener pattern '" + source + "': " + e.what());
    }
  }
  banks.qualifiers = tokenized_bank(qualifiers);
  banks.academic_vocabulary = word_bank(academic);
  banks.adult_register = word_bank(adult);
  banks.cost_vocabulary = word_bank(cost);
  return banks;
}

const SlopBanks& SlopBanks::shipped() {
  static const SlopBanks kBanks = from_text(
      shipped_data("slop_phrases.txt"), shipped_data("opener_patterns.txt"),
      shipped_data("qualifiers.txt"), shipped_data("academic_vocabulary.txt"),
      shipped_data("adult_register.txt"), shipped_data("cost_vocabulary.txt"));
  return kBanks;
}

SlopBanks SlopBanks::load(const std::filesystem::path& dir) {
  return from_text(read_text_file(dir / "slop_phrases.txt"), read_text_file(dir / "opener_patterns.txt"),
                   read_text_file(dir / "qualifiers.txt"), read_text_file(dir / "academic_vocabulary.txt"),
                   read_text_file(dir / "adult_register.txt"), read_text_file(dir / "cost_vocabulary.txt"));
}

double SlopWeights::weight(CheckName name) const {
  switch (name) {
    case CheckName::repetitive_phrasing: return repetitive_phrasing;
    case CheckName::generic_framing: return generic_framing;
    case CheckName::circular_reasoning: return circular_reasoning;
    case CheckName::score_clustering: return score_clustering;
    case CheckName::audience_mismatch: return audience_mismatch;
  }
  return 0.0;
}

double SlopWeights::total() const {
  return repetitive_phrasing + generic_framing + circular_reasoning + score_clustering +
         audience_mismatch;
}

Disposition disposition_for(double composite, const SlopThresholds& thresholds) {
  if (composite >= thresholds.reject_at) return Disposition::reject;
  if (composite >= thresholds.flag_at) return Disposition::flag;
  return Disposition::accept;
}

// ---------------------------------------------------------------------------
// Check 1: repetitive phrasing
// ---------------------------------------------------------------------------

CheckResult check_repetitive_phrasing(std::string_view text, const SlopBanks& banks) {
  CheckResult result;
  result.check_name = CheckName::repetitive_phrasing;
  auto tokens = tokenize(text);

  double trigram_rep_rate = 0.0;
  if (tokens.size() >= 3) {
    std::unordered_set<std::string> distinct;
    const std::size_t total = tokens.size() - 2;
    for (std::size_t i = 0; i < total; ++i) distinct.insert(ngram_key(tokens, i, 3));
    trigram_rep_rate = static_cast<double>(total - distinct.size()) / static_cast<double>(total);
  }

  double ttr = 1.0;
  if (!tokens.empty()) {
    std::unordered_set<std::string> types(tokens.begin(), tokens.end());
    ttr = static_cast<double>(types.size()) / static_cast<double>(tokens.size());
  }

  double phrase_density = 0.0;
  if (!tokens.empty()) {
    for (const auto& phrase : banks.slop_phrases) {
      auto hits = count_sequences(tokens, {phrase});
      if (hits > 0) result.flags.push_back("slop phrase: " + join(phrase, " "));
      phrase_density += static_cast<double>(hits);
    }
    phrase_density = phrase_density * 100.0 / static_cast<double>(tokens.size());
  }

  result.components = {{"trigram_rep_rate", trigram_rep_rate},
                       {"ttr", ttr},
                       {"phrase_density", phrase_density}};
  double trigram_sub = clamp01(trigram_rep_rate / 0.5);
  double ttr_sub = clamp01((0.35 - ttr) / 0.35);
  double phrase_sub = clamp01(phrase_density / 5.0);
  result.score = clamp01((trigram_sub + ttr_sub + phrase_sub) / 3.0);

  if (ttr < 0.35) result.flags.insert(result.flags.begin(), "type-token ratio below 0.35");
  if (trigram_rep_rate > 0.30) result.flags.insert(result.flags.begin(), "trigram repetition above 0.30");
  return result;
}

// ---------------------------------------------------------------------------
// Check 2: generic framing
// ---------------------------------------------------------------------------

CheckResult check_generic_framing(std::string_view text, const SlopBanks& banks) {
  CheckResult result;
  result.check_name = CheckName::generic_framing;

  int opener_hits = 0;
  for (const auto& sentence : sentences(text)) {
    // Leading quotes or brackets do not hide an opener.
    auto start = sentence.find_first_not_of("\"'([*- ");
    if (start == std::string::npos) continue;
    std::string body = sentence.substr(start);
    for (const auto& opener : banks.openers) {
      if (std::regex_search(body, opener.pattern, std::regex_constants::match_continuous)) {
        ++opener_hits;
        result.flags.push_back("cliche opener: " + opener.source);
        break;
      }
    }
  }

  auto tokens = tokenize(text);
  double qualifier_density = 0.0;
  if (!tokens.empty()) {
    qualifier_density = static_cast<double>(count_sequences(tokens, banks.qualifiers)) * 100.0 /
                        static_cast<double>(tokens.size());
  }
  auto spec = measure_specificity(text);
  double specificity = spec.total();

  result.components = {{"opener_hits", static_cast<double>(opener_hits)},
                       {"qualifier_density", qualifier_density},
                       {"specificity", specificity},
                       {"numbers", static_cast<double>(spec.numbers)},
                       {"proper_nouns", static_cast<double>(spec.proper_nouns)},
                       {"quotations", static_cast<double>(spec.quotes)}};
  result.score = clamp01(0.4 * clamp01(opener_hits / 2.0) + 0.3 * clamp01(qualifier_density / 5.0) +
                         0.3 * (1.0 - clamp01(specificity / 3.0)));

  if (qualifier_density >= 5.0) result.flags.push_back("dense vague qualifiers");
  if (spec.total() == 0) result.flags.push_back("no concrete numbers, names or quotations");
  return result;
}

// ---------------------------------------------------------------------------
// Check 3: circular reasoning
// ---------------------------------------------------------------------------

CheckResult check_circular_reasoning(std::string_view reasoning, std::string_view concept_text) {
  CheckResult result;
  result.check_name = CheckName::circular_reasoning;
  auto r = tokenize(reasoning);
  auto c = tokenize(concept_text);
  std::unordered_set<std::string> concept_types(c.begin(), c.end());

  double overlap = 0.0;
  double novelty = 1.0;
  double copy4 = 0.0;
  if (!r.empty()) {
    std::size_t shared = 0;
    for (const auto& t : r) shared += concept_types.count(t);
    overlap = static_cast<double>(shared) / static_cast<double>(r.size());

    std::unordered_set<std::string> reasoning_types(r.begin(), r.end());
    std::size_t novel = 0;
    for (const auto& t : reasoning_types) novel += concept_types.count(t) ? 0 : 1;
    novelty = static_cast<double>(novel) / static_cast<double>(reasoning_types.size());
  }
  if (r.size() >= 4) {
    std::unordered_set<std::string> concept_grams;
    for (std::size_t i = 0; i + 4 <= c.size(); ++i) concept_grams.insert(ngram_key(c, i, 4));
    std::size_t copied = 0;
    const std::size_t total = r.size() - 3;
    for (std::size_t i = 0; i < total; ++i) copied += concept_grams.count(ngram_key(r, i, 4));
    copy4 = static_cast<double>(copied) / static_cast<double>(total);
  }

  result.components = {{"overlap", overlap}, {"novelty", novelty}, {"copy4", copy4}};
  result.score = clamp01(0.4 * overlap + 0.4 * copy4 + 0.2 * (1.0 - novelty));
  if (copy4 > 0.25) result.flags.push_back("copies phrases from the concept");
  if (overlap >= 0.8 && novelty <= 0.2) result.flags.push_back("restates the concept with little new vocabulary");
  return result;
}

// ---------------------------------------------------------------------------
// Check 4: score clustering
// ---------------------------------------------------------------------------

CheckResult check_score_clustering(const std::vector<double>& scores) {
  CheckResult result;
  result.check_name = CheckName::score_clustering;
  if (scores.size() < 3) {
    result.components = {{"applicable", 0.0}, {"stddev", 0.0}};
    return result;
  }
  bool identical = std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores.front(); });
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  double sigma = identical ? 0.0 : std::sqrt(var / static_cast<double>(scores.size()));

  result.components = {{"applicable", 1.0}, {"stddev", sigma}};
  result.score = identical ? 1.0 : clamp01(1.0 - sigma / 0.3);
  if (identical) {
    result.flags.push_back("all criterion scores identical");
  } else if (sigma < 0.3) {
    result.flags.push_back("criterion scores clustered (stddev below 0.3)");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Check 5: audience mismatch
// ---------------------------------------------------------------------------

CheckResult check_audience_mismatch(const Evaluation& evaluation, const ReaderPersona* persona,
                                    const Concept& book, const Rubric& rubric,
                                    const SlopBanks& banks) {
  CheckResult result;
  result.check_name = CheckName::audience_mismatch;
  int applicable = 0;
  int triggered = 0;
  auto record = [&](const char* key, bool applies, bool fires, const std::string& finding) {
    result.components[key] = applies ? (fires ? 1.0 : 0.0) : -1.0;
    if (!applies) return;
    ++applicable;
    if (fires) {
      ++triggered;
      result.flags.push_back(finding);
    }
  };

  if (persona == nullptr) {
    result.components = {{"applicable", 0.0}};
    return result;
  }

  auto tokens = tokenize(evaluation.reasoning);
  auto first_in = [&](const std::set<std::string, std::less<>>& bank) -> std::string {
    for (const auto& t : tokens) {
      if (bank.count(t)) return t;
    }
    return {};
  };

  {
    bool applies = persona->reading_level == ReadingLevel::beginner;
    auto word = applies ? first_in(banks.academic_vocabulary) : std::string{};
    record("vocabulary_level", applies, !word.empty(),
           "academic term '" + word + "' from a beginner-level reader");
  }
  {
    std::string disliked_tag;
    for (const auto& tag : book.genre_tags) {
      if (std::find(persona->disliked_genres.begin(), persona->disliked_genres.end(), tag) !=
          persona->disliked_genres.end()) {
        disliked_tag = tag;
        break;
      }
    }
    bool applies = !disliked_tag.empty();
    bool fires = false;
    if (applies) {
      double mean = 0.0;
      try {
        mean = weighted_criterion_mean(evaluation.criterion_scores, rubric);
      } catch (const Error&) {
        mean = 0.0;
      }
      fires = mean >= 8.0;
    }
    record("genre_alignment", applies, fires, "high rating for disliked genre '" + disliked_tag + "'");
  }
  {
    bool applies = persona->age_group == AgeGroup::child;
    auto word = applies ? first_in(banks.adult_register) : std::string{};
    record("age_register", applies, !word.empty(), "adult-register term '" + word + "' from a child persona");
  }
  {
    bool applies = persona->price_sensitivity == Level::high;
    bool mentions_cost = !first_in(banks.cost_vocabulary).empty() ||
                         evaluation.reasoning.find('$') != std::string::npos;
    record("price_sensitivity", applies, !mentions_cost, "price-sensitive reader never mentions cost or value");
  }

  result.components["applicable"] = applicable;
  result.score = applicable == 0 ? 0.0 : static_cast<double>(triggered) / applicable;
  return result;
}

// ---------------------------------------------------------------------------
// Composite and batch
// ---------------------------------------------------------------------------

SlopReport composite_slop(const std::vector<CheckResult>& results, const SlopWeights& weights,
                          const SlopThresholds& thresholds) {
  std::array<const CheckResult*, 5> by_check{};
  for (const auto& r : results) {
    auto& slot = by_check[static_cast<std::size_t>(r.check_name)];
    if (slot != nullptr) {
      fail(ErrorKind::schema, "duplicate result for check " + std::string(enum_name(r.check_name)));
    }
    slot = &r;
  }
  SlopReport report;
  double weighted = 0.0;
  double total = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < by_check.size(); ++i) {
    if (by_check[i] == nullptr) {
      fail(ErrorKind::schema, "missing result for check " + std::string(enum_name(static_cast<CheckName>(i))));
    }
    const auto& r = *by_check[i];
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
      fail(ErrorKind::range, "check score outside [0,1] for " + std::string(enum_name(r.check_name)));
    }
    double w = weights.weight(r.check_name);
    weighted += w * r.score;
    total += w;
    lo = std::min(lo, r.score);
    hi = std::max(hi, r.score);
    report.per_check.push_back(r);
  }
  // A weighted mean lies between its extremes; clamping removes rounding
  // drift so that, e.g., five scores of exactly 0.4 give exactly 0.4.
  report.composite = std::clamp(weighted / total, lo, hi);
  report.disposition = disposition_for(report.composite, thresholds);
  return report;
}

const CheckResult& SlopReport::check(CheckName name) const {
  for (const auto& r : per_check) {
    if (r.check_name == name) return r;
  }
  fail(ErrorKind::lookup, "report has no result for " + std::string(enum_name(name)));
}

SlopReport SlopDetector::analyze(const Evaluation& evaluation, const ReaderPersona* persona,
                                 const Concept& book, const Rubric& rubric) const {
  std::vector<double> scores;
  for (const auto& c : rubric.criteria) {
    auto it = evaluation.criterion_scores.find(c.name);
    if (it != evaluation.criterion_scores.end()) scores.push_back(it->second);
  }
  std::vector<CheckResult> results{
      check_repetitive_phrasing(evaluation.reasoning, *banks_),
      check_generic_framing(evaluation.reasoning, *banks_),
      check_circular_reasoning(evaluation.reasoning, book.text()),
      check_score_clustering(scores),
      check_audience_mismatch(evaluation, persona, book, rubric, *banks_),
  };
  return composite_slop(results, weights_, thresholds_);
}

SlopReport SlopDetector::analyze(const Evaluation& evaluation, const PanelMember& member,
                                 const Concept& book, const Rubric& rubric) const {
  const auto* persona = std::get_if<ReaderPersona>(&member);
  return analyze(evaluation, persona, book, rubric);
}

BatchSummary batch_summary(const std::vector<SlopReport>& reports) {
  if (reports.empty()) fail(ErrorKind::input, "batch_summary needs at least one report");
  BatchSummary summary;
  summary.total = static_cast<int>(reports.size());
  for (const auto& r : reports) {
    switch (r.disposition) {
      case Disposition::accept: ++summary.accepted; break;
      case Disposition::flag: ++summary.flagged; break;
      case Disposition::reject: ++summary.rejected; break;
    }
    auto bin = static_cast<int>(std::floor(r.composite * 10.0));
    summary.score_histogram[static_cast<std::size_t>(std::clamp(bin, 0, 9))] += 1;
    for (const auto& check : r.per_check) {
      if (!check.flags.empty()) summary.flag_counts[static_cast<std::size_t>(check.check_name)] += 1;
    }
  }
  int best = 0;
  for (std::size_t i = 0; i < summary.flag_counts.size(); ++i) {
    if (summary.flag_counts[i] > best) {
      best = summary.flag_counts[i];
      summary.most_common_flag = static_cast<CheckName>(i);
    }
  }
  return summary;
}

}  // namespace readerpanel
