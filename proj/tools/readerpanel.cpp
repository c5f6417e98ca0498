// readerpanel: command-line front end.
//
//   readerpanel panel --imprint <name> [--size N] [--seed S] [--out FILE]
//   readerpanel tournament --config FILE [--seed S] [--store DIR] [--id ID] [--out FILE]
//   readerpanel slop-audit <corpus dir or file> [--out FILE]
//   readerpanel report --store DIR --id ID [--json]
//   readerpanel serve --store DIR [--host H] [--port P]

#include <CLI11.hpp>

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "readerpanel/config.hpp"
#include "readerpanel/http_api.hpp"
#include "readerpanel/review.hpp"
#include "readerpanel/serialize.hpp"
#include "readerpanel/store.hpp"

namespace fs = std::filesystem;
using namespace readerpanel;

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration:
    case ErrorKind::constraint:
    case ErrorKind::sizing:
    case ErrorKind::repair: return 3;
    case ErrorKind::lookup: return 4;
    case ErrorKind::input:
    case ErrorKind::schema:
    case ErrorKind::range:
    case ErrorKind::parse: return 5;
    case ErrorKind::judge:
    case ErrorKind::match: return 6;
    case ErrorKind::integrity:
    case ErrorKind::io: return 7;
    case ErrorKind::state:
    case ErrorKind::concurrency: return 8;
  }
  return 1;
}

void write_output(const std::string& path, const json& doc) {
  std::string text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::io, "cannot write " + path);
}

// --- panel ------------------------------------------------------------------

struct PanelArgs {
  std::string imprint;
  int size = 10;
  std::uint64_t seed = 0;
  int max_rounds = 50;
  std::string out;
};

int run_panel(const PanelArgs& a) {
  const auto& profile = ImprintRegistry::shipped().find(a.imprint);
  Panel panel = compose_and_repair(profile, a.size, PublisherRegistry::shipped(), a.seed, a.max_rounds);
  auto report = check_diversity(panel);
  write_output(a.out, {{"panel", panel}, {"diversity", report}});
  std::cerr << "panel " << panel.id << ": " << panel.members.size() << " readers, " << panel.experts.size()
            << " experts, diversity " << (report.passed ? "passed" : "FAILED") << "\n";
  return report.passed ? 0 : 3;
}

// --- tournament -------------------------------------------------------------

struct TournamentArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string store;
  std::string id;
  std::string out;
};

json tournament_output(const TournamentState& state) {
  json pending = json::array();
  for (const auto& item : state.review_items) {
    if (item.status == ReviewStatus::pending) pending.push_back(item.item_id);
  }
  return {{"tournament_id", state.id},
          {"status", state.status},
          {"disposition", state.disposition},
          {"judge", state.judge},
          {"config", state.config},
          {"panel_id", state.panel ? json(state.panel->id) : json(nullptr)},
          {"result", state.result ? json(*state.result) : json(nullptr)},
          {"pending_review", pending}};
}

int run_tournament_cmd(const TournamentArgs& a) {
  TournamentFile file = read_tournament_file(a.config);
  if (a.seed) file.config.seed = *a.seed;
  if (!a.id.empty()) file.id = a.id;
  auto concepts = file.load_concepts();
  const Rubric& rubric = RubricRegistry::shipped().for_imprint(file.config.imprint);
  auto backend = make_judge(file.judge, file.config.seed);
  SlopDetector detector(SlopBanks::shipped(), SlopWeights{}, file.config.slop);

  TournamentState state;
  if (a.store.empty()) {
    TournamentEngine engine(state, *backend, detector);
    engine.create(file.id, file.config, concepts, rubric);
    engine.run();
  } else {
    EventStore store(a.store);
    const bool resume = store.exists(file.id);
    TournamentWriter writer(store, file.id, !resume);
    if (resume) state = store.load_tournament(file.id);
    writer.set_snapshot_interval(100, &state);
    std::unique_ptr<JudgeBackend> stored_backend;
    JudgeBackend* judge = backend.get();
    if (resume && !state.judge.empty()) {
      stored_backend = make_judge(state.judge, state.config.seed);
      judge = stored_backend.get();
    }
    TournamentEngine engine(state, *judge, detector, &writer);
    if (state.id.empty()) engine.create(file.id, file.config, concepts, rubric);
    if (!state.result) engine.run();
    store.write_snapshot(state);
  }

  write_output(a.out, tournament_output(state));
  std::cerr << "tournament " << state.id << ": " << enum_name(state.status);
  if (state.result) {
    std::cerr << ", champion " << state.result->champion << " ("
              << enum_name(state.result->gate_decision.outcome) << ")";
  }
  std::cerr << ", " << state.results.size() << " matches\n";
  return 0;
}

// --- slop-audit -------------------------------------------------------------

struct AuditArgs {
  std::string corpus;
  std::string out;
  double flag_at = 0.4;
  double reject_at = 0.6;
};

int run_slop_audit(const AuditArgs& a) {
  std::vector<fs::path> files;
  if (fs::is_directory(a.corpus)) {
    for (const auto& entry : fs::directory_iterator(a.corpus)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(a.corpus)) {
    files.push_back(a.corpus);
  } else {
    fail(ErrorKind::lookup, "no corpus at " + a.corpus);
  }

  SlopThresholds thresholds{a.flag_at, a.reject_at};
  SlopDetector detector(SlopBanks::shipped(), SlopWeights{}, thresholds);
  std::vector<SlopReport> reports;
  for (const auto& path : files) {
    int line_no = 0;
    for (const auto& line : split_lines(read_text_file(path))) {
      ++line_no;
      if (trim(line).empty()) continue;
      json doc = json::parse(line, nullptr, false);
      auto where = path.filename().string() + ":" + std::to_string(line_no);
      if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::parse, where + ": not a JSON object");
      if (doc.contains("schema")) continue;  // header record
      if (!doc.contains("evaluation") || !doc.contains("concept")) {
        fail(ErrorKind::schema, where + ": record needs \"evaluation\" and \"concept\"");
      }
      try {
        auto book = doc["concept"].get<Concept>();
        auto evaluation = doc["evaluation"].get<Evaluation>();
        Rubric rubric = doc.contains("rubric") ? doc["rubric"].get<Rubric>()
                                               : RubricRegistry::shipped().for_imprint(book.imprint);
        std::optional<ReaderPersona> persona;
        if (doc.contains("persona") && !doc["persona"].is_null()) persona = doc["persona"].get<ReaderPersona>();
        reports.push_back(detector.analyze(evaluation, persona ? &*persona : nullptr, book, rubric));
      } catch (const Error& e) {
        throw Error(e.kind(), where + ": " + e.what());
      }
    }
  }
  auto summary = batch_summary(reports);
  json doc = summary;
  doc["files"] = files.size();
  write_output(a.out, doc);
  std::cerr << "audited " << summary.total << " evaluations: " << summary.accepted << " accepted, "
            << summary.flagged << " flagged, " << summary.rejected << " rejected\n";
  return 0;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
  std::string store;
  std::string id;
  bool as_json = false;
};

int run_report(const ReportArgs& a) {
  EventStore store(a.store);
  if (!store.exists(a.id)) fail(ErrorKind::lookup, "unknown tournament '" + a.id + "'");
  auto state = store.load_tournament(a.id);
  if (a.as_json) {
    std::cout << tournament_view(state).dump(2) << "\n";
    return 0;
  }
  std::cout << "Tournament " << state.id << " [" << enum_name(state.config.format) << ", imprint "
            << (state.config.imprint.empty() ? "-" : state.config.imprint) << "]\n";
  std::cout << "Status: " << enum_name(state.status) << "; matches played: " << state.results.size() << "\n";
  if (!state.result) {
    auto open = open_pairings(state);
    std::cout << "Open matches: " << open.size() << "\n";
    for (const auto& item : state.review_items) {
      if (item.status == ReviewStatus::pending) std::cout << "  pending review " << item.item_id << "\n";
    }
    return 0;
  }
  const auto& r = *state.result;
  std::map<std::string, std::pair<double, int>> totals;
  for (const auto& m : r.match_results) {
    totals[m.concept_a].first += m.aggregate_a.value;
    ++totals[m.concept_a].second;
    totals[m.concept_b].first += m.aggregate_b.value;
    ++totals[m.concept_b].second;
  }
  std::cout << "\n  #  concept  matches  cumulative  title\n";
  for (std::size_t i = 0; i < r.final_ranking.size(); ++i) {
    const auto& id = r.final_ranking[i];
    std::ostringstream line;
    line << std::setw(3) << (i + 1) << "  " << std::left << std::setw(7) << id << std::right << "  " << std::setw(7)
         << totals[id].second << "  " << std::setw(10) << format_number(totals[id].first, 2) << "  "
         << state.concept_by_id(id).title;
    if (std::find(r.revisit_flags.begin(), r.revisit_flags.end(), id) != r.revisit_flags.end()) line << "  [revisit]";
    std::cout << line.str() << "\n";
  }
  const auto& g = r.gate_decision;
  auto mark = [](bool b) { return b ? "pass" : "FAIL"; };
  std::cout << "\nChampion: " << r.champion << " - " << state.concept_by_id(r.champion).title << "\n";
  std::cout << "Gates: min score " << mark(g.min_score_pass) << ", consensus " << mark(g.consensus_pass) << " ("
            << format_number(100 * g.consensus_share, 1) << "%), would read " << mark(g.would_read_pass) << " ("
            << format_number(100 * g.would_read_share, 1) << "%), fatal flaws " << mark(g.fatal_flaw_free) << "\n";
  for (const auto& f : g.fatal_flaws) std::cout << "  flaw: " << f << "\n";
  std::cout << "Outcome: " << enum_name(g.outcome) << "; disposition: " << enum_name(state.disposition) << "\n";
  return 0;
}

// --- serve ------------------------------------------------------------------

ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

struct ServeArgs {
  std::string store;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int run_serve(const ServeArgs& a) {
  EventStore store(a.store);
  ApiServer server(store);
  int port = server.bind(a.host, a.port);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << a.host << ":" << port << "/v1" << std::endl;
  server.serve();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reader-panel tournaments for book concepts"};
  app.require_subcommand(1);

  PanelArgs panel_args;
  auto* panel = app.add_subcommand("panel", "Compose and repair a judging panel for an imprint");
  panel->add_option("--imprint", panel_args.imprint, "Imprint name")->required();
  panel->add_option("--size", panel_args.size, "Panel size (at least 5)");
  panel->add_option("--seed", panel_args.seed, "Random seed");
  panel->add_option("--max-rounds", panel_args.max_rounds, "Repair round budget");
  panel->add_option("--out", panel_args.out, "Output file (default stdout)");

  TournamentArgs tournament_args;
  auto* tournament = app.add_subcommand("tournament", "Run a tournament from a config file");
  tournament->add_option("--config", tournament_args.config, "Tournament config file")->required();
  tournament->add_option("--seed", tournament_args.seed, "Override the config seed");
  tournament->add_option("--store", tournament_args.store, "Store directory; resumes an existing tournament");
  tournament->add_option("--id", tournament_args.id, "Override the tournament id");
  tournament->add_option("--out", tournament_args.out, "Result file (default stdout)");

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("slop-audit", "Score an evaluation corpus for slop");
  audit->add_option("corpus", audit_args.corpus, "Directory of .jsonl files, or one file")->required();
  audit->add_option("--out", audit_args.out, "Summary file (default stdout)");
  audit->add_option("--flag-at", audit_args.flag_at, "Flag threshold");
  audit->add_option("--reject-at", audit_args.reject_at, "Reject threshold");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Show standings and gates for a stored tournament");
  report->add_option("--store", report_args.store, "Store directory")->required();
  report->add_option("--id", report_args.id, "Tournament id")->required();
  report->add_flag("--json", report_args.as_json, "Print the full JSON view");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Serve the /v1 HTTP API over a store");
  serve->add_option("--store", serve_args.store, "Store directory")->required();
  serve->add_option("--host", serve_args.host, "Bind address");
  serve->add_option("--port", serve_args.port, "Port (0 picks a free one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*panel) return run_panel(panel_args);
    if (*tournament) return run_tournament_cmd(tournament_args);
    if (*audit) return run_slop_audit(audit_args);
    if (*report) return run_report(report_args);
    if (*serve) return run_serve(serve_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
