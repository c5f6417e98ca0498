#include "readerpanel/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

#include "readerpanel/serialize.hpp"

namespace fs = std::filesystem;

namespace readerpanel {

namespace {

constexpr const char* kLogName = "events.jsonl";
constexpr const char* kLockName = "LOCK";

[[noreturn]] void io_fail(const std::string& what, const fs::path& path) {
  fail(ErrorKind::io, what + " " + path.string() + ": " + std::strerror(errno));
}

void check_id(const std::string& id) {
  bool ok = !id.empty() && id.size() <= 128 && id.front() != '.' &&
            std::all_of(id.begin(), id.end(), [](unsigned char c) {
              return std::isalnum(c) || c == '-' || c == '_' || c == '.';
            });
  if (!ok) fail(ErrorKind::input, "invalid tournament id '" + id + "'");
}

void write_all(int fd, const std::string& text, const fs::path& path) {
  const char* p = text.data();
  std::size_t left = text.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("cannot write", path);
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

/// Appends one line and fsyncs before returning.
void append_line(const fs::path& path, const std::string& line) {
  int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (fd < 0) io_fail("cannot open", path);
  try {
    write_all(fd, line + "\n", path);
    if (::fsync(fd) != 0) io_fail("cannot sync", path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

int acquire_lock(const fs::path& dir, const std::string& id) {
  fs::path path = dir / kLockName;
  int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("cannot open", path);
  if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
    int err = errno;
    ::close(fd);
    if (err == EWOULDBLOCK) fail(ErrorKind::concurrency, "tournament " + id + " is locked by another writer");
    errno = err;
    io_fail("cannot lock", path);
  }
  return fd;
}

std::string record_line(std::int64_t seq, const Event& event) {
  json line = {{"seq", seq}, {"ts", utc_timestamp()}, {"kind", event.kind}, {"payload", event.payload}};
  return line.dump();
}

std::int64_t snapshot_sequence(const fs::path& file) {
  auto name = file.filename().string();
  const std::string prefix = "snapshot-";
  if (name.rfind(prefix, 0) != 0 || file.extension() != ".json") return -1;
  auto digits = name.substr(prefix.size(), name.size() - prefix.size() - 5);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) return -1;
  return std::stoll(digits);
}

}  // namespace

void to_json(json& j, const TournamentSummary& v) {
  j = {{"id", v.id},
       {"imprint", v.imprint},
       {"format", v.format},
       {"status", v.status},
       {"champion", v.champion ? json(*v.champion) : json(nullptr)},
       {"disposition", v.disposition}};
}

EventStore::EventStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) fail(ErrorKind::io, "cannot create store root " + root_.string() + ": " + ec.message());
}

bool EventStore::exists(const std::string& id) const {
  return fs::exists(root_ / id / kLogName);
}

std::vector<std::string> EventStore::tournament_ids() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / kLogName)) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void EventStore::create(const std::string& id) {
  check_id(id);
  fs::path dir = dir_for(id);
  if (exists(id)) fail(ErrorKind::state, "tournament " + id + " already exists");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  json header = {{"schema", kEventSchema}, {"version", kEventSchemaVersion}, {"tournament_id", id}};
  fs::path log = dir / kLogName;
  int fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("cannot create", log);
  write_all(fd, header.dump() + "\n", log);
  ::fsync(fd);
  ::close(fd);
}

std::int64_t EventStore::append_event(const std::string& id, const Event& event) {
  TournamentWriter writer(*this, id);
  return writer.append(event);
}

std::vector<EventRecord> EventStore::read_events(const std::string& id) const {
  if (!exists(id)) fail(ErrorKind::lookup, "unknown tournament '" + id + "'");
  std::ifstream in(dir_for(id) / kLogName, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read log of " + id);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::integrity, "log of " + id + " has no header");
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("schema", "") != kEventSchema) {
    fail(ErrorKind::integrity, "log of " + id + " has a bad header");
  }
  if (header.value("version", 0) != kEventSchemaVersion) {
    fail(ErrorKind::integrity, "log of " + id + " has unsupported version");
  }

  std::vector<EventRecord> out;
  std::int64_t expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("seq") || !doc["seq"].is_number_integer()) {
      fail(ErrorKind::integrity, "log of " + id + ": unparseable record at sequence " + std::to_string(expected));
    }
    EventRecord r;
    r.sequence = doc["seq"].get<std::int64_t>();
    if (r.sequence != expected) {
      fail(ErrorKind::integrity, "log of " + id + ": sequence gap, expected " + std::to_string(expected) +
                                     " but found " + std::to_string(r.sequence));
    }
    auto kind = doc.contains("kind") && doc["kind"].is_string()
                    ? try_parse_enum<EventKind>(doc["kind"].get<std::string>())
                    : std::nullopt;
    if (!kind || !doc.contains("payload")) {
      fail(ErrorKind::integrity, "log of " + id + ": malformed record at sequence " + std::to_string(r.sequence));
    }
    r.timestamp = doc.value("ts", "");
    r.event = {*kind, doc["payload"]};
    out.push_back(std::move(r));
    ++expected;
  }
  return out;
}

TournamentState EventStore::load_tournament(const std::string& id) const {
  auto events = read_events(id);

  std::int64_t snap_seq = -1;
  fs::path snap_path;
  for (const auto& entry : fs::directory_iterator(dir_for(id))) {
    auto seq = snapshot_sequence(entry.path());
    if (seq > snap_seq && seq <= static_cast<std::int64_t>(events.size())) {
      snap_seq = seq;
      snap_path = entry.path();
    }
  }

  TournamentState state;
  auto compare = [&] {
    TournamentState stored;
    try {
      stored = parse_as<TournamentState>(read_text_file(snap_path));
    } catch (const Error& e) {
      fail(ErrorKind::integrity, "snapshot " + snap_path.string() + " is unreadable: " + e.what());
    }
    if (dump(stored) != dump(state)) {
      fail(ErrorKind::integrity, "snapshot at sequence " + std::to_string(snap_seq) + " disagrees with the log");
    }
  };
  if (snap_seq == 0) compare();
  for (const auto& r : events) {
    apply_event(state, r.event, r.sequence, r.timestamp);
    if (r.sequence == snap_seq) compare();
  }
  return state;
}

void EventStore::write_snapshot(const TournamentState& state) const {
  if (!exists(state.id)) fail(ErrorKind::lookup, "unknown tournament '" + state.id + "'");
  fs::path dir = dir_for(state.id);
  fs::path final_path = dir / ("snapshot-" + std::to_string(state.last_sequence) + ".json");
  fs::path tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + tmp.string());
    out << dump(state) << "\n";
    if (!out) fail(ErrorKind::io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, final_path, ec);
  if (ec) fail(ErrorKind::io, "cannot rename snapshot: " + ec.message());
}

std::vector<TournamentSummary> EventStore::list_tournaments(const std::optional<std::string>& imprint) const {
  std::vector<TournamentSummary> out;
  for (const auto& id : tournament_ids()) {
    auto state = load_tournament(id);
    if (state.id.empty()) continue;
    if (imprint && state.config.imprint != *imprint) continue;
    TournamentSummary s;
    s.id = state.id;
    s.imprint = state.config.imprint;
    s.format = state.config.format;
    s.status = state.status;
    s.disposition = state.disposition;
    if (state.result) s.champion = state.result->champion;
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------

TournamentWriter::TournamentWriter(EventStore& store, const std::string& id, bool create)
    : store_(store), id_(id) {
  check_id(id);
  if (create) {
    store_.create(id);
  } else if (!store_.exists(id)) {
    fail(ErrorKind::lookup, "unknown tournament '" + id + "'");
  }
  lock_fd_ = acquire_lock(store_.dir_for(id), id);
  try {
    auto events = store_.read_events(id);
    last_sequence_ = events.empty() ? 0 : events.back().sequence;
  } catch (...) {
    ::close(lock_fd_);
    throw;
  }
}

TournamentWriter::~TournamentWriter() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

void TournamentWriter::set_snapshot_interval(int interval, const TournamentState* state) {
  snapshot_interval_ = interval;
  snapshot_state_ = state;
}

std::int64_t TournamentWriter::append(const Event& event) {
  const std::int64_t seq = last_sequence_ + 1;
  append_line(store_.dir_for(id_) / kLogName, record_line(seq, event));
  last_sequence_ = seq;
  if (snapshot_interval_ > 0 && snapshot_state_ && seq % snapshot_interval_ == 0 &&
      snapshot_state_->last_sequence == seq - 1) {
    // The state has not seen this event yet; the snapshot is of seq - 1.
    store_.write_snapshot(*snapshot_state_);
  }
  return seq;
}

}  // namespace readerpanel
