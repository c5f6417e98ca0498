#include "readerpanel/prompt.hpp"

#include <sstream>

namespace readerpanel {

namespace {

std::string list_or(const std::vector<std::string>& items, std::string_view fallback) {
  if (items.empty()) return std::string(fallback);
  if (items.size() == 1) return items.front();
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

template <NamedEnum E>
std::vector<std::string> labels(const std::vector<E>& values) {
  std::vector<std::string> out;
  for (auto v : values) out.push_back(human_label(enum_name(v)));
  return out;
}

std::string rubric_block(const Rubric& rubric) {
  std::ostringstream out;
  out << "Score the book on each criterion below. Use the stated range; higher is better.\n";
  for (const auto& c : rubric.criteria) {
    out << "- " << c.name << " (weight " << format_number(c.weight) << ", range "
        << format_number(c.min_score) << " to " << format_number(c.max_score) << ")\n";
  }
  out << "Judge each criterion on its own evidence; a strength on one does not excuse a weakness on another.";
  return out.str();
}

std::string schema_block(const Rubric& rubric) {
  std::ostringstream out;
  out << "Respond with a single JSON object and nothing else:\n{\n  \"scores\": {";
  for (std::size_t i = 0; i < rubric.criteria.size(); ++i) {
    out << (i ? ", " : "") << "\"" << rubric.criteria[i].name << "\": <number>";
  }
  out << "},\n  \"reasoning\": \"<your analysis, citing concrete details>\",\n"
      << "  \"would_read\": <true|false>,\n"
      << "  \"fatal_flaw\": <null or a short description of an ethical, legal or factual disqualifier>\n}";
  return out.str();
}

constexpr std::string_view kAntiAnchoring =
    "Do not default to moderate scores; use the full range. A score near the middle must be "
    "earned by the book, not chosen because it feels safe. Do not restate the concept; "
    "say what you think of it and why.";

std::string concept_block(const Concept& book) {
  std::ostringstream out;
  out << "Title: " << book.title << "\n";
  if (!book.genre_tags.empty()) out << "Genres: " << list_or(book.genre_tags, "") << "\n";
  out << "Description: " << book.description;
  return out.str();
}

}  // namespace

std::string PromptDocument::text() const {
  return persona_bio + "\n\n" + perspective_instruction + "\n\n" + rubric_block + "\n\n" +
         anti_anchoring_instruction + "\n\n" + output_schema_block;
}

std::string persona_summary(const ReaderPersona& p) {
  return "a " + human_label(enum_name(p.age_group)) + " reader at the " +
         human_label(enum_name(p.reading_level)) + " level";
}

PromptDocument render_judge_prompt(const ReaderPersona& p, const Rubric& rubric, const Concept& book) {
  rubric.validate();
  book.validate();
  PromptDocument doc;

  std::ostringstream bio;
  bio << "You are a " << human_label(enum_name(p.age_group)) << " " << human_label(enum_name(p.gender))
      << " reader living in " << p.location << ", currently " << p.life_stage << ". "
      << "Your household income sits in tier " << p.income_tier << " of 5 and your education is "
      << human_label(enum_name(p.education)) << ". "
      << "You read at the " << human_label(enum_name(p.reading_level)) << " level and finish about "
      << p.books_per_year << " books per year, preferring " << human_label(enum_name(p.preferred_length))
      << " books. You gravitate toward " << list_or(p.preferred_genres, "no particular genre")
      << " and avoid " << list_or(p.disliked_genres, "nothing in particular") << ". "
      << "You find books through " << list_or(p.discovery_methods, "chance") << ", "
      << human_label(enum_name(p.review_frequency)) << " write reviews, and your social sharing is "
      << enum_name(p.social_sharing) << ". Your price sensitivity is " << enum_name(p.price_sensitivity)
      << " and you read in " << list_or(labels(p.format_preferences), "print") << " formats. "
      << "You read for " << list_or(p.reading_goals, "pleasure") << "; people describe you as "
      << list_or(p.personality_traits, "even-tempered") << ". Content you are sensitive to: "
      << list_or(p.content_sensitivities, "none") << ". Right now your reading mood is "
      << human_label(enum_name(p.reading_mood)) << ", and you recently read "
      << list_or(p.recent_reads, "nothing memorable") << ".";
  doc.persona_bio = bio.str();

  std::ostringstream perspective;
  perspective << "As a " << human_label(enum_name(p.age_group)) << " reader who reads " << p.books_per_year
              << " books per year, evaluate the book concept below from your own perspective. "
              << "Ask yourself whether you would pick this book up, finish it, and recommend it.\n\n"
              << concept_block(book);
  doc.perspective_instruction = perspective.str();

  doc.rubric_block = rubric_block(rubric);
  doc.anti_anchoring_instruction = std::string(kAntiAnchoring);
  doc.output_schema_block = schema_block(rubric);
  return doc;
}

PromptDocument render_judge_prompt(const PublisherPersona& p, const Rubric& rubric, const Concept& book) {
  rubric.validate();
  book.validate();
  PromptDocument doc;

  std::ostringstream bio;
  bio << "You are " << p.name << ", an acquisitions editor for the " << human_label(p.imprint)
      << " imprint. Your risk tolerance is " << enum_name(p.risk_tolerance) << " and your decision style is "
      << human_label(enum_name(p.decision_style)) << ". You know the market for "
      << list_or(p.preferred_topics, "general nonfiction") << ". Known blind spots: "
      << list_or(p.vulnerabilities, "none recorded") << ".";
  doc.persona_bio = bio.str();

  std::ostringstream perspective;
  perspective << "As " << p.name << ", evaluate the book concept below as you would at an acquisitions "
              << "meeting: would you commission it, and what would you need to see first?\n\n"
              << concept_block(book);
  doc.perspective_instruction = perspective.str();

  doc.rubric_block = rubric_block(rubric);
  doc.anti_anchoring_instruction = std::string(kAntiAnchoring);
  doc.output_schema_block = schema_block(rubric);
  return doc;
}

PromptDocument render_judge_prompt(const PanelMember& member, const Rubric& rubric, const Concept& book) {
  return std::visit([&](const auto& m) { return render_judge_prompt(m, rubric, book); }, member);
}

}  // namespace readerpanel
