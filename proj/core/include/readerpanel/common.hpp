#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace readerpanel {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  configuration,
  constraint,
  lookup,
  sizing,
  input,
  schema,
  range,
  parse,
  judge,
  repair,
  match,
  state,
  integrity,
  io,
  concurrency,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error raised by the library. The kind drives CLI exit codes
/// and HTTP status mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error that keeps the raw backend text so a regeneration loop or an
/// operator can inspect what the judge actually said.
class RawTextError : public Error {
 public:
  RawTextError(ErrorKind kind, const std::string& message, std::string raw)
      : Error(kind, message), raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

// ---------------------------------------------------------------------------
// Stable hashing and seeded randomness
// ---------------------------------------------------------------------------

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a over the parts (with separators), mixed with a seed. Stable across
/// platforms and runs; used wherever a value must be a pure function of ids.
std::uint64_t stable_hash(std::uint64_t seed,
                          std::initializer_list<std::string_view> parts) noexcept;

/// Maps a hash to [0, 1).
double unit_interval(std::uint64_t h) noexcept;

/// Lower-case hex rendering of a 64-bit value (16 chars).
std::string hex64(std::uint64_t value);

/// Deterministic random source. The distribution helpers are implemented here
/// rather than with <random> distributions, whose output differs between
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  /// Uniform real in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Index drawn proportionally to non-negative weights; at least one positive.
  std::size_t weighted(std::span<const double> weights);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Enum <-> string tables
// ---------------------------------------------------------------------------

/// Specialize with `static constexpr std::array<std::string_view, N> names`
/// listing enumerators in declaration order.
template <typename E>
struct EnumNames;

template <typename E>
concept NamedEnum = std::is_enum_v<E> && requires { EnumNames<E>::names; };

template <NamedEnum E>
constexpr std::size_t enum_count() {
  return EnumNames<E>::names.size();
}

template <NamedEnum E>
std::string_view enum_name(E value) {
  auto i = static_cast<std::size_t>(value);
  if (i >= EnumNames<E>::names.size()) fail(ErrorKind::input, "enum value out of range");
  return EnumNames<E>::names[i];
}

template <NamedEnum E>
std::optional<E> try_parse_enum(std::string_view text) {
  const auto& names = EnumNames<E>::names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

template <NamedEnum E>
E parse_enum(std::string_view text) {
  if (auto v = try_parse_enum<E>(text)) return *v;
  fail(ErrorKind::input, "unknown value '" + std::string(text) + "'");
}

template <NamedEnum E>
std::vector<E> all_values() {
  std::vector<E> out;
  for (std::size_t i = 0; i < enum_count<E>(); ++i) out.push_back(static_cast<E>(i));
  return out;
}

// Small string helpers shared across modules.
std::string to_lower(std::string_view text);
std::string trim(std::string_view text);
std::vector<std::string> split_lines(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string format_number(double value, int precision = 2);
/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace readerpanel
