#include "readerpanel/judge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "readerpanel/data.hpp"

namespace readerpanel {

// ---------------------------------------------------------------------------
// Concept / Evaluation invariants
// ---------------------------------------------------------------------------

std::string Concept::text() const { return title + "\n" + description; }

void Concept::validate() const {
  if (id.empty()) fail(ErrorKind::input, "concept id is empty");
  if (trim(title).empty()) fail(ErrorKind::input, "concept " + id + " has an empty title");
  if (trim(description).empty()) fail(ErrorKind::input, "concept " + id + " has an empty description");
}

void Evaluation::validate(const Rubric& rubric) const {
  validate_scores(criterion_scores, rubric);
  if (trim(reasoning).empty()) fail(ErrorKind::schema, "evaluation reasoning is empty");
  if (fatal_flaw && trim(*fatal_flaw).empty()) fail(ErrorKind::schema, "fatal_flaw is present but empty");
  if (attempt < 1) fail(ErrorKind::range, "evaluation attempt must be positive");
}

Evaluation evaluate(JudgeBackend& backend, const PanelMember& member, const Concept& book,
                    const Rubric& rubric, const EvaluationContext& context) {
  rubric.validate();
  Evaluation e;
  try {
    e = backend.evaluate(member, book, rubric, context);
    e.validate(rubric);
  } catch (const RawTextError& err) {
    throw RawTextError(ErrorKind::judge, backend.describe() + ": " + err.what(), err.raw());
  } catch (const Error& err) {
    throw RawTextError(ErrorKind::judge, backend.describe() + ": " + err.what(), "");
  } catch (const std::exception& err) {
    throw RawTextError(ErrorKind::judge, backend.describe() + ": " + err.what(), "");
  }
  if (e.persona_id != member_id(member) || e.concept_id != book.id) {
    throw RawTextError(ErrorKind::judge,
                       backend.describe() + ": evaluation is for " + e.persona_id + "/" + e.concept_id +
                           ", expected " + member_id(member) + "/" + book.id,
                       "");
  }
  e.attempt = context.attempt;
  return e;
}

// ---------------------------------------------------------------------------
// Mock judge
// ---------------------------------------------------------------------------

namespace {

struct MockTraits {
  double reliability = 1.0;
  double consistency = 1.0;
  const std::vector<std::string>* preferred = nullptr;
  const std::vector<std::string>* disliked = nullptr;
};

const std::string* first_shared(const std::vector<std::string>& tags, const std::vector<std::string>* pool) {
  if (pool == nullptr) return nullptr;
  for (const auto& t : tags) {
    if (std::find(pool->begin(), pool->end(), t) != pool->end()) return &t;
  }
  return nullptr;
}

std::string score_text(double v) { return format_number(v, 1); }

std::string mock_reasoning(const PanelMember& member, const Concept& book, const Rubric& rubric,
                           const CriterionScores& scores, double mean, const std::string* liked,
                           const std::string* disliked, const std::optional<std::string>& flaw) {
  const Criterion* best = &rubric.criteria.front();
  const Criterion* worst = &rubric.criteria.front();
  for (const auto& c : rubric.criteria) {
    if (scores.find(c.name)->second > scores.find(best->name)->second) best = &c;
    if (scores.find(c.name)->second < scores.find(worst->name)->second) worst = &c;
  }

  std::ostringstream out;
  out << "\"" << book.title << "\" comes out at " << score_text(mean) << " on my sheet. " << best->name
      << " is the strongest part at " << score_text(scores.find(best->name)->second);
  if (worst != best) {
    out << ", while " << worst->name << " trails at " << score_text(scores.find(worst->name)->second);
  }
  out << ".";

  if (const auto* r = std::get_if<ReaderPersona>(&member)) {
    out << " Reading about " << r->books_per_year << " books a year as a " << human_label(enum_name(r->age_group))
        << " reader, ";
    if (disliked) {
      out << "I usually skip " << *disliked << " and that pulls my interest down.";
    } else if (liked) {
      out << "I reach for " << *liked << " first, so this has an easy path onto my list.";
    } else if (!book.genre_tags.empty()) {
      out << "I find " << book.genre_tags.front() << " outside my usual shelf, though not off-putting.";
    } else {
      out << "I would need a stronger hook before picking it up.";
    }
    if (r->price_sensitivity == Level::high) {
      out << " On my budget I would wait for a paperback discount unless friends pushed it on me.";
    }
  } else {
    const auto& p = std::get<PublisherPersona>(member);
    out << " For the " << human_label(p.imprint) << " list, ";
    if (liked) {
      out << "it sits on " << *liked << ", a topic we already know how to sell.";
    } else {
      out << "it falls outside the topics we usually acquire.";
    }
  }
  if (flaw) out << " One serious problem: " << *flaw << ".";
  return out.str();
}

}  // namespace

Evaluation mock_evaluate(const PanelMember& member, const Concept& book, const Rubric& rubric,
                         std::uint64_t seed, const EvaluationContext& context) {
  MockTraits traits;
  if (const auto* r = std::get_if<ReaderPersona>(&member)) {
    traits.reliability = r->reliability_score;
    traits.consistency = r->consistency_score;
    traits.preferred = &r->preferred_genres;
    traits.disliked = &r->disliked_genres;
  } else {
    traits.preferred = &std::get<PublisherPersona>(member).preferred_topics;
  }
  const std::string& pid = member_id(member);
  const std::string* liked = first_shared(book.genre_tags, traits.preferred);
  const std::string* disliked = first_shared(book.genre_tags, traits.disliked);
  double affinity = (liked ? 1.5 : 0.0) + (disliked ? -2.0 : 0.0);
  const std::string sampling = std::to_string(context.sampling_seed);

  Evaluation e;
  e.persona_id = pid;
  e.concept_id = book.id;
  e.attempt = context.attempt;
  for (const auto& c : rubric.criteria) {
    double base = 3.0 + 5.0 * unit_interval(stable_hash(seed, {"base", pid, book.id, c.name}));
    double u = 2.0 * unit_interval(stable_hash(seed, {"noise", pid, book.id, c.name})) - 1.0;
    double v = 2.0 * unit_interval(stable_hash(seed, {"jitter", pid, book.id, c.name, sampling})) - 1.0;
    double noise = (1.0 - traits.reliability) * 1.0 * u;
    double jitter = (1.0 - traits.consistency) * 0.5 * v;
    double raw = std::clamp(base + affinity + noise + jitter, 0.0, 10.0);
    e.criterion_scores[c.name] = c.min_score + (c.max_score - c.min_score) * raw / 10.0;
  }

  double mean = weighted_criterion_mean(e.criterion_scores, rubric);
  // would_read is judged on the 0-10 scale regardless of the rubric's ranges.
  double lo = 0.0;
  double hi = 0.0;
  double wsum = 0.0;
  for (const auto& c : rubric.criteria) {
    lo += c.weight * c.min_score;
    hi += c.weight * c.max_score;
    wsum += c.weight;
  }
  double normalized = 10.0 * (mean - lo / wsum) / ((hi - lo) / wsum);
  e.would_read = normalized >= 6.0;

  if (auto it = book.metadata.find("fatal_flaw"); it != book.metadata.end() && !trim(it->second).empty()) {
    e.fatal_flaw = trim(it->second);
  }
  e.reasoning = mock_reasoning(member, book, rubric, e.criterion_scores, mean, liked, disliked, e.fatal_flaw);
  return e;
}

// ---------------------------------------------------------------------------
// Response parsing
// ---------------------------------------------------------------------------

namespace {

/// End index (inclusive) of the balanced object starting at `open`, or npos.
std::size_t matching_brace(const std::string& text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string::npos;
}

std::optional<json> first_json_object(const std::string& raw) {
  for (std::size_t open = raw.find('{'); open != std::string::npos; open = raw.find('{', open + 1)) {
    auto close = matching_brace(raw, open);
    if (close == std::string::npos) continue;
    auto doc = json::parse(raw.begin() + static_cast<std::ptrdiff_t>(open),
                           raw.begin() + static_cast<std::ptrdiff_t>(close) + 1, nullptr, false);
    if (!doc.is_discarded() && doc.is_object()) return doc;
  }
  return std::nullopt;
}

[[noreturn]] void raw_fail(ErrorKind kind, const std::string& message, const std::string& raw) {
  throw RawTextError(kind, message, raw);
}

}  // namespace

Evaluation parse_evaluation_response(const std::string& raw, const Rubric& rubric,
                                     const std::string& persona_id, const std::string& concept_id) {
  auto doc = first_json_object(raw);
  if (!doc) raw_fail(ErrorKind::parse, "response contains no JSON object", raw);

  Evaluation e;
  e.persona_id = persona_id;
  e.concept_id = concept_id;

  auto scores = doc->find("scores");
  if (scores == doc->end() || !scores->is_object()) raw_fail(ErrorKind::schema, "missing \"scores\" object", raw);
  for (const auto& c : rubric.criteria) {
    auto it = scores->find(c.name);
    if (it == scores->end()) raw_fail(ErrorKind::schema, "missing score for criterion \"" + c.name + "\"", raw);
    if (!it->is_number()) raw_fail(ErrorKind::schema, "score for \"" + c.name + "\" is not a number", raw);
    double v = it->get<double>();
    if (!std::isfinite(v) || v < c.min_score || v > c.max_score) {
      raw_fail(ErrorKind::range,
               "score " + format_number(v, 3) + " for \"" + c.name + "\" outside [" + format_number(c.min_score) +
                   ", " + format_number(c.max_score) + "]",
               raw);
    }
    e.criterion_scores[c.name] = v;
  }
  for (const auto& [name, value] : scores->items()) {
    if (rubric.find(name) == nullptr) raw_fail(ErrorKind::schema, "unknown criterion \"" + name + "\"", raw);
  }

  auto reasoning = doc->find("reasoning");
  if (reasoning == doc->end() || !reasoning->is_string() || trim(reasoning->get<std::string>()).empty()) {
    raw_fail(ErrorKind::schema, "missing or empty \"reasoning\"", raw);
  }
  e.reasoning = reasoning->get<std::string>();

  auto would_read = doc->find("would_read");
  if (would_read == doc->end() || !would_read->is_boolean()) {
    raw_fail(ErrorKind::schema, "missing boolean \"would_read\"", raw);
  }
  e.would_read = would_read->get<bool>();

  if (auto flaw = doc->find("fatal_flaw"); flaw != doc->end() && !flaw->is_null()) {
    if (!flaw->is_string()) raw_fail(ErrorKind::schema, "\"fatal_flaw\" must be null or text", raw);
    // Models often send "" for "no flaw"; that is read as absent.
    if (!trim(flaw->get<std::string>()).empty()) e.fatal_flaw = flaw->get<std::string>();
  }
  return e;
}

std::string format_evaluation_response(const Evaluation& evaluation) {
  json scores = json::object();
  for (const auto& [name, value] : evaluation.criterion_scores) scores[name] = value;
  json doc = json::object();
  doc["scores"] = std::move(scores);
  doc["reasoning"] = evaluation.reasoning;
  doc["would_read"] = evaluation.would_read;
  doc["fatal_flaw"] = evaluation.fatal_flaw ? json(*evaluation.fatal_flaw) : json(nullptr);
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Regeneration
// ---------------------------------------------------------------------------

std::uint64_t attempt_seed(std::uint64_t base_seed, int attempt) {
  return stable_hash(base_seed, {"attempt", std::to_string(attempt)});
}

RegenerationOutcome evaluate_with_regeneration(JudgeBackend& backend, const SlopDetector& detector,
                                               const PanelMember& member, const Concept& book,
                                               const Rubric& rubric, int max_attempts, std::uint64_t base_seed,
                                               int first_attempt) {
  if (max_attempts < 1) fail(ErrorKind::input, "max_attempts must be at least 1");
  if (first_attempt < 1) fail(ErrorKind::input, "first_attempt must be at least 1");

  Failed failed;
  failed.attempts = first_attempt - 1;
  failed.error = "regeneration budget exhausted";
  for (int attempt = first_attempt; attempt <= max_attempts; ++attempt) {
    failed.attempts = attempt;
    Evaluation e;
    try {
      e = evaluate(backend, member, book, rubric, EvaluationContext{attempt, attempt_seed(base_seed, attempt)});
    } catch (const Error& err) {
      failed.error = err.what();
      return failed;
    }
    e.slop_report = detector.analyze(e, member, book, rubric);
    switch (e.slop_report->disposition) {
      case Disposition::accept: return Accepted{std::move(e)};
      case Disposition::flag: return FlaggedForReview{std::move(e)};
      case Disposition::reject: break;
    }
    failed.error = "slop score " + format_number(e.slop_report->composite, 3) + " rejected on attempt " +
                   std::to_string(attempt);
    failed.last_evaluation = std::move(e);
  }
  return failed;
}

}  // namespace readerpanel
