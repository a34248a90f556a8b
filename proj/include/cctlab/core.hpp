#pragma once

// Shared vocabulary: slot time, protocol parameters, the channel trace model
// and its validation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cct {

/// Time in whole slots. Every event boundary and every duration is a Tick.
using Tick = std::int64_t;

/// Bit n is set when user n takes part in an event.
using UserMask = std::uint64_t;

inline constexpr std::size_t kMaxUsers = 64;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters or inputs that violate a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class OverlapError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OrderError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownUserError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MalformedEventError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooFewUsersError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A closed form whose denominator vanishes for the given arguments.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

class EmptyError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Unit conversion

/// Converts between microseconds and slots. Only exact multiples convert.
class SlotClock {
 public:
  static constexpr std::int64_t kDefaultMicrosPerSlot = 20;

  SlotClock() = default;
  explicit SlotClock(std::int64_t micros_per_slot);

  std::int64_t micros_per_slot() const noexcept { return micros_per_slot_; }

  /// Throws ValidationError unless `micros` is a non-negative multiple of one slot.
  Tick to_slots(std::int64_t micros) const;
  std::int64_t to_micros(Tick slots) const noexcept { return slots * micros_per_slot_; }
  double to_micros(double slots) const noexcept {
    return slots * static_cast<double>(micros_per_slot_);
  }

 private:
  std::int64_t micros_per_slot_ = kDefaultMicrosPerSlot;
};

// ---------------------------------------------------------------------------
// Protocol parameters

/// Two-user slotted Aloha. `slot` is both the slot and the packet duration.
struct AlohaParams {
  double p_a = 0.5;
  double p_b = 0.5;
  Tick slot = 1;

  void validate() const;
};

enum class CsmaMode { RtsCts, Basic };

std::string_view to_string(CsmaMode mode);

/// CSMA/CA with binary exponential backoff; all durations in slots.
struct CsmaParams {
  int cw_min = 32;
  int beta = 5;  ///< CW_max = 2^beta * cw_min
  Tick l_difs = 4;
  Tick l_pkt = 30;
  Tick l_ack = 1;
  Tick l_rts = 1;
  Tick l_cts = 1;

  Tick l_tran() const noexcept { return l_pkt + l_ack; }
  Tick l_rcts() const noexcept { return l_rts + l_cts; }
  /// Deferral of the losing user while the winner holds the channel.
  Tick l_nav() const noexcept { return l_tran() + l_rcts() - 1; }
  std::int64_t cw_max() const noexcept { return std::int64_t{cw_min} << beta; }
  /// CW_i = min(2^i CW_min, CW_max).
  std::int64_t contention_window(int stage) const noexcept;

  /// Channel time of a successful exchange in `mode`.
  Tick success_airtime(CsmaMode mode) const noexcept;
  /// Channel time wasted by a collision in `mode`.
  Tick collision_airtime(CsmaMode mode) const noexcept;

  void validate() const;

  /// The evaluation defaults: CW_min 32, CW_max 1024, 20 us slots, DIFS 80 us,
  /// ACK/RTS/CTS 20 us each.
  static CsmaParams reference(Tick l_pkt = 30);
};

// ---------------------------------------------------------------------------
// Trace model

enum class EventKind : std::uint8_t { Success, Collision, Idle };

char to_code(EventKind kind);

struct ChannelEvent {
  Tick start = 0;
  Tick end = 0;
  EventKind kind = EventKind::Idle;
  UserMask users = 0;

  static ChannelEvent success(Tick start, Tick end, std::size_t user);
  static ChannelEvent collision(Tick start, Tick end, UserMask users);
  static ChannelEvent idle(Tick start, Tick end);

  Tick duration() const noexcept { return end - start; }
  bool involves(std::size_t user) const noexcept {
    return user < kMaxUsers && ((users >> user) & 1U) != 0;
  }
  /// Index of the transmitting user of a Success event.
  std::size_t sole_user() const;

  friend bool operator==(const ChannelEvent&, const ChannelEvent&) = default;
};

/// An immutable record of what happened on the channel. Users are opaque
/// labels; events refer to them by index.
class ChannelTrace {
 public:
  ChannelTrace() = default;
  /// Throws ValidationError on duplicate, empty or unrepresentable user
  /// labels. Event-level invariants are checked by validate_trace.
  ChannelTrace(std::vector<std::string> users, std::vector<ChannelEvent> events, Tick horizon);

  const std::vector<std::string>& users() const noexcept { return users_; }
  const std::vector<ChannelEvent>& events() const noexcept { return events_; }
  Tick horizon() const noexcept { return horizon_; }
  std::size_t user_count() const noexcept { return users_.size(); }

  /// Throws UnknownUserError.
  std::size_t user_index(std::string_view user) const;
  std::optional<std::size_t> find_user(std::string_view user) const;

  friend bool operator==(const ChannelTrace&, const ChannelTrace&) = default;

 private:
  std::vector<std::string> users_;
  std::vector<ChannelEvent> events_;
  Tick horizon_ = 0;
};

/// True when `label` can appear in the trace file format.
bool is_valid_user_label(std::string_view label);

/// Returns `trace` if it is well formed, otherwise throws OrderError,
/// OverlapError, UnknownUserError, MalformedEventError or ValidationError.
const ChannelTrace& validate_trace(const ChannelTrace& trace);

/// Success events of `user`, in trace order.
std::vector<ChannelEvent> successes_of(const ChannelTrace& trace, std::string_view user);

/// Drops every event that starts before `t` (used for warm-up removal).
ChannelTrace discard_before(const ChannelTrace& trace, Tick t);

}  // namespace cct
