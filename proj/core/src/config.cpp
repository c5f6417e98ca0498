#include "readerpanel/config.hpp"

#include <charconv>
#include <cstdlib>

#include "readerpanel/serialize.hpp"

namespace readerpanel {

namespace {

[[noreturn]] void bad_line(int line, const std::string& message) {
  fail(ErrorKind::configuration, "config line " + std::to_string(line) + ": " + message);
}

template <typename T>
T number(const std::string& value, int line, const std::string& key) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_line(line, key + " expects a number, got '" + value + "'");
  return out;
}

template <NamedEnum E>
E choice(const std::string& value, int line, const std::string& key) {
  if (auto v = try_parse_enum<E>(value)) return *v;
  std::vector<std::string> names;
  for (auto n : EnumNames<E>::names) names.emplace_back(n);
  bad_line(line, key + " must be one of " + join(names, ", ") + "; got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto comma = value.find(',', start);
    if (comma == std::string::npos) comma = value.size();
    auto item = trim(std::string_view(value).substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace

TournamentFile parse_tournament_file(std::string_view text, const std::filesystem::path& base_dir) {
  TournamentFile file;
  auto& c = file.config;
  int n = 0;
  for (const auto& raw : split_lines(text)) {
    ++n;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) bad_line(n, "expected key = value");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) bad_line(n, "empty key");

    if (key == "id") file.id = value;
    else if (key == "concepts") file.concepts_path = base_dir / value;
    else if (key == "synthetic_concepts") file.synthetic_concepts = number<int>(value, n, key);
    else if (key == "judge") file.judge = value;
    else if (key == "format") c.format = choice<TournamentFormat>(value, n, key);
    else if (key == "seeding") c.seeding = choice<Seeding>(value, n, key);
    else if (key == "tiebreak") c.tiebreak = choice<Tiebreak>(value, n, key);
    else if (key == "imprint") c.imprint = value;
    else if (key == "panel_size") c.panel_size = number<int>(value, n, key);
    else if (key == "concurrency") c.concurrency = number<int>(value, n, key);
    else if (key == "max_attempts") c.max_attempts = number<int>(value, n, key);
    else if (key == "swiss_rounds") c.swiss_rounds = number<int>(value, n, key);
    else if (key == "max_repair_rounds") c.max_repair_rounds = number<int>(value, n, key);
    else if (key == "seed") c.seed = number<std::uint64_t>(value, n, key);
    else if (key == "gates.min_score") c.gates.min_score = number<double>(value, n, key);
    else if (key == "gates.consensus_fraction") c.gates.consensus_fraction = number<double>(value, n, key);
    else if (key == "gates.consensus_score") c.gates.consensus_score = number<double>(value, n, key);
    else if (key == "gates.would_read_fraction") c.gates.would_read_fraction = number<double>(value, n, key);
    else if (key == "slop.flag_at") c.slop.flag_at = number<double>(value, n, key);
    else if (key == "slop.reject_at") c.slop.reject_at = number<double>(value, n, key);
    else if (key == "manual_order") c.manual_order = split_list(value);
    else if (key.rfind("rating.", 0) == 0 && key.size() > 7) c.ratings[key.substr(7)] = number<double>(value, n, key);
    else bad_line(n, "unknown key '" + key + "'");
  }
  if (file.concepts_path && file.synthetic_concepts > 0) {
    fail(ErrorKind::configuration, "set either concepts or synthetic_concepts, not both");
  }
  if (!file.concepts_path && file.synthetic_concepts <= 0) {
    fail(ErrorKind::configuration, "no concepts: set concepts = <file> or synthetic_concepts = <n>");
  }
  c.validate();
  return file;
}

TournamentFile read_tournament_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::configuration, std::string("cannot read config: ") + e.what());
  }
  return parse_tournament_file(text, path.parent_path());
}

std::vector<Concept> TournamentFile::load_concepts() const {
  if (concepts_path) return read_concepts(*concepts_path);
  return readerpanel::synthetic_concepts(synthetic_concepts, config.seed, config.imprint);
}

std::vector<Concept> parse_concepts(std::string_view jsonl) {
  std::vector<Concept> out;
  for (const auto& record : parse_versioned_jsonl(jsonl, "readerpanel.concepts")) {
    Concept c;
    try {
      c = record.get<Concept>();
    } catch (const json::exception& e) {
      fail(ErrorKind::schema, std::string("bad concept record: ") + e.what());
    }
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Concept> read_concepts(const std::filesystem::path& path) {
  return parse_concepts(read_text_file(path));
}

std::unique_ptr<JudgeBackend> make_judge(std::string_view spec, std::uint64_t default_seed) {
  if (spec == "mock") return std::make_unique<MockJudge>(default_seed);
  if (spec.rfind("mock:", 0) == 0) {
    auto digits = spec.substr(5);
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      fail(ErrorKind::configuration, "bad mock judge seed in '" + std::string(spec) + "'");
    }
    return std::make_unique<MockJudge>(seed);
  }
  if (spec == "remote") return std::make_unique<RemoteJudge>(RemoteJudgeConfig::from_env());
  if (spec.rfind("remote:", 0) == 0) {
    RemoteJudgeConfig config;
    config.url = std::string(spec.substr(7));
    if (const char* model = std::getenv("READERPANEL_JUDGE_MODEL")) config.model = model;
    if (const char* token = std::getenv("READERPANEL_JUDGE_TOKEN")) config.auth_token = token;
    return std::make_unique<RemoteJudge>(config);
  }
  fail(ErrorKind::configuration, "unknown judge '" + std::string(spec) + "'");
}

}  // namespace readerpanel
