#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "readerpanel/tournament.hpp"

namespace readerpanel {

// On-disk layout, one directory per tournament under the store root:
//
//   <root>/<id>/events.jsonl      header line, then one event per line
//   <root>/<id>/LOCK              flock()ed by the single writer
//   <root>/<id>/snapshot-<seq>.json
//
// Header: {"schema":"readerpanel.events","version":1,"tournament_id":"<id>"}
// Event:  {"seq":N,"ts":"2026-01-01T00:00:00Z","kind":"<EventKind>","payload":{...}}

inline constexpr const char* kEventSchema = "readerpanel.events";
inline constexpr int kEventSchemaVersion = 1;

struct EventRecord {
  std::int64_t sequence = 0;
  /// Informational only; replay ignores it.
  std::string timestamp;
  Event event;
};

struct TournamentSummary {
  std::string id;
  std::string imprint;
  TournamentFormat format = TournamentFormat::single_elim;
  TournamentStatus status = TournamentStatus::created;
  std::optional<std::string> champion;
  ChampionDisposition disposition = ChampionDisposition::pending;

  bool operator==(const TournamentSummary&) const = default;
};

void to_json(json& j, const TournamentSummary& v);

class EventStore {
 public:
  /// Creates the root directory if needed.
  explicit EventStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  bool exists(const std::string& id) const;
  std::vector<std::string> tournament_ids() const;

  /// Creates an empty log. State error if the tournament already exists;
  /// input error for ids that are not safe directory names.
  void create(const std::string& id);

  /// Appends under the tournament's lock; returns the new sequence number.
  /// Lookup error for an unknown tournament, concurrency error if another
  /// writer holds the lock.
  std::int64_t append_event(const std::string& id, const Event& event);

  /// Every committed event, checked for gapless sequencing. Integrity error
  /// naming the offending sequence on a gap or an unparseable line.
  std::vector<EventRecord> read_events(const std::string& id) const;

  /// Replays the log. A stored snapshot is compared with the replayed state
  /// at the same sequence; any difference is an integrity error.
  TournamentState load_tournament(const std::string& id) const;

  void write_snapshot(const TournamentState& state) const;

  std::vector<TournamentSummary> list_tournaments(const std::optional<std::string>& imprint = std::nullopt) const;

  std::filesystem::path dir_for(const std::string& id) const { return root_ / id; }

 private:
  std::filesystem::path root_;
};

/// Exclusive writer for one tournament. Holds the lock for its lifetime and
/// implements EventSink, so an engine can append through it directly.
class TournamentWriter : public EventSink {
 public:
  /// `create` makes a fresh log; otherwise the tournament must exist.
  TournamentWriter(EventStore& store, const std::string& id, bool create = false);
  ~TournamentWriter() override;
  TournamentWriter(const TournamentWriter&) = delete;
  TournamentWriter& operator=(const TournamentWriter&) = delete;

  std::int64_t append(const Event& event) override;
  std::int64_t last_sequence() const { return last_sequence_; }
  /// Writes a snapshot every `interval` appends; 0 disables.
  void set_snapshot_interval(int interval, const TournamentState* state);

 private:
  EventStore& store_;
  std::string id_;
  int lock_fd_ = -1;
  std::int64_t last_sequence_ = 0;
  int snapshot_interval_ = 0;
  const TournamentState* snapshot_state_ = nullptr;
};

}  // namespace readerpanel
