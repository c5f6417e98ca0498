#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "readerpanel/judge.hpp"
#include "readerpanel/tournament.hpp"

namespace readerpanel {

/// A tournament configuration file: `key = value` lines, '#' comments.
///
///   id = spring-thrillers          tournament id (default "tournament")
///   concepts = concepts.jsonl      relative to the config file
///   synthetic_concepts = 8         alternative to `concepts`
///   judge = mock                   mock | mock:<seed> | remote | remote:<url>
///   format = single_elim           single_elim | double_elim | round_robin | swiss
///   seeding = random               random | by_rating | manual
///   tiebreak = random              random | criteria_weighted | re_evaluation
///   imprint = ...
///   panel_size, concurrency, max_attempts, swiss_rounds, max_repair_rounds, seed
///   gates.min_score, gates.consensus_fraction, gates.consensus_score, gates.would_read_fraction
///   slop.flag_at, slop.reject_at
///   manual_order = c003, c001, c002
///   rating.<concept id> = 1510
struct TournamentFile {
  std::string id = "tournament";
  TournamentConfig config;
  std::string judge = "mock";
  std::optional<std::filesystem::path> concepts_path;
  int synthetic_concepts = 0;

  /// Concepts from the file, or synthetic ones for the configured imprint.
  std::vector<Concept> load_concepts() const;
};

/// Configuration error on unknown keys, malformed lines or bad values.
/// `base_dir` resolves relative paths.
TournamentFile parse_tournament_file(std::string_view text, const std::filesystem::path& base_dir = {});
TournamentFile read_tournament_file(const std::filesystem::path& path);

/// JSON Lines with a {"schema":"readerpanel.concepts","version":1} header.
std::vector<Concept> read_concepts(const std::filesystem::path& path);
std::vector<Concept> parse_concepts(std::string_view jsonl);

/// Backend from a judge spec: "mock" (uses `default_seed`), "mock:<seed>",
/// "remote" (environment) or "remote:<url>". Also accepts the strings
/// JudgeBackend::describe() produces, so a stored tournament can be resumed.
std::unique_ptr<JudgeBackend> make_judge(std::string_view spec, std::uint64_t default_seed = 0);

}  // namespace readerpanel
