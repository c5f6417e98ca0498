#pragma once

#include <string>

#include "readerpanel/evaluation.hpp"
#include "readerpanel/persona.hpp"
#include "readerpanel/scoring.hpp"

namespace readerpanel {

/// The five parts of a judge prompt, in the order they are sent.
struct PromptDocument {
  std::string persona_bio;
  std::string perspective_instruction;
  std::string rubric_block;
  std::string anti_anchoring_instruction;
  std::string output_schema_block;

  /// All five parts joined with blank lines.
  std::string text() const;

  bool operator==(const PromptDocument&) const = default;
};

PromptDocument render_judge_prompt(const ReaderPersona& persona, const Rubric& rubric,
                                   const Concept& book);
PromptDocument render_judge_prompt(const PublisherPersona& persona, const Rubric& rubric,
                                   const Concept& book);
PromptDocument render_judge_prompt(const PanelMember& member, const Rubric& rubric,
                                   const Concept& book);

/// Short description of a reader, e.g. "a middle aged reader at the expert level".
std::string persona_summary(const ReaderPersona& persona);

}  // namespace readerpanel
