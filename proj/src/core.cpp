#include "cctlab/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

namespace cct {

SlotClock::SlotClock(std::int64_t micros_per_slot) : micros_per_slot_(micros_per_slot) {
  if (micros_per_slot <= 0) {
    throw ValidationError("micros_per_slot must be positive");
  }
}

Tick SlotClock::to_slots(std::int64_t micros) const {
  if (micros < 0) {
    throw ValidationError("negative duration: " + std::to_string(micros) + " us");
  }
  if (micros % micros_per_slot_ != 0) {
    throw ValidationError(std::to_string(micros) + " us is not a multiple of the " +
                          std::to_string(micros_per_slot_) + " us slot");
  }
  return micros / micros_per_slot_;
}

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void require_positive(Tick value, const char* name) {
  if (value < 1) {
    throw ValidationError(std::string(name) + " must be at least one slot");
  }
}

}  // namespace

void AlohaParams::validate() const {
  if (!is_probability(p_a) || !is_probability(p_b)) {
    throw ValidationError("transmit probabilities must lie in [0, 1]");
  }
  require_positive(slot, "slot");
}

std::string_view to_string(CsmaMode mode) {
  return mode == CsmaMode::RtsCts ? "rtscts" : "basic";
}

std::int64_t CsmaParams::contention_window(int stage) const noexcept {
  const int capped = std::clamp(stage, 0, beta);
  return std::int64_t{cw_min} << capped;
}

Tick CsmaParams::success_airtime(CsmaMode mode) const noexcept {
  return mode == CsmaMode::RtsCts ? l_rcts() + l_tran() : l_tran();
}

Tick CsmaParams::collision_airtime(CsmaMode mode) const noexcept {
  return mode == CsmaMode::RtsCts ? l_rcts() : l_tran();
}

void CsmaParams::validate() const {
  if (cw_min < 1) throw ValidationError("cw_min must be at least 1");
  // 2^beta * cw_min has to stay well inside 64 bits.
  if (beta < 0 || beta > 30) throw ValidationError("beta must lie in [0, 30]");
  require_positive(l_difs, "l_difs");
  require_positive(l_pkt, "l_pkt");
  require_positive(l_ack, "l_ack");
  require_positive(l_rts, "l_rts");
  require_positive(l_cts, "l_cts");
}

CsmaParams CsmaParams::reference(Tick l_pkt) {
  CsmaParams p;
  p.l_pkt = l_pkt;
  return p;
}

char to_code(EventKind kind) {
  switch (kind) {
    case EventKind::Success:
      return 'S';
    case EventKind::Collision:
      return 'C';
    case EventKind::Idle:
      return 'I';
  }
  return '?';
}

ChannelEvent ChannelEvent::success(Tick start, Tick end, std::size_t user) {
  if (user >= kMaxUsers) throw UnknownUserError("user index out of range");
  return {start, end, EventKind::Success, UserMask{1} << user};
}

ChannelEvent ChannelEvent::collision(Tick start, Tick end, UserMask users) {
  return {start, end, EventKind::Collision, users};
}

ChannelEvent ChannelEvent::idle(Tick start, Tick end) { return {start, end, EventKind::Idle, 0}; }

std::size_t ChannelEvent::sole_user() const {
  if (std::popcount(users) != 1) {
    throw MalformedEventError("event does not carry exactly one user");
  }
  return static_cast<std::size_t>(std::countr_zero(users));
}

bool is_valid_user_label(std::string_view label) {
  if (label.empty() || label.front() == '#') return false;
  return std::none_of(label.begin(), label.end(), [](char c) {
    return c == ',' || c == '+' || c == '\n' || c == '\r';
  });
}

ChannelTrace::ChannelTrace(std::vector<std::string> users, std::vector<ChannelEvent> events,
                           Tick horizon)
    : users_(std::move(users)), events_(std::move(events)), horizon_(horizon) {
  if (users_.size() > kMaxUsers) {
    throw ValidationError("at most " + std::to_string(kMaxUsers) + " users are supported");
  }
  if (horizon_ < 0) throw ValidationError("horizon must be non-negative");
  for (std::size_t i = 0; i < users_.size(); ++i) {
    if (!is_valid_user_label(users_[i])) {
      throw ValidationError("invalid user label '" + users_[i] + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (users_[i] == users_[j]) throw ValidationError("duplicate user '" + users_[i] + "'");
    }
  }
}

std::optional<std::size_t> ChannelTrace::find_user(std::string_view user) const {
  for (std::size_t i = 0; i < users_.size(); ++i) {
    if (users_[i] == user) return i;
  }
  return std::nullopt;
}

std::size_t ChannelTrace::user_index(std::string_view user) const {
  if (auto idx = find_user(user)) return *idx;
  throw UnknownUserError("unknown user '" + std::string(user) + "'");
}

const ChannelTrace& validate_trace(const ChannelTrace& trace) {
  const std::size_t n = trace.user_count();
  const UserMask known = n == kMaxUsers ? ~UserMask{0} : (UserMask{1} << n) - 1;
  const auto& events = trace.events();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const ChannelEvent& e = events[i];
    const std::string where = "event " + std::to_string(i);
    if (e.start < 0 || e.start >= e.end) {
      throw MalformedEventError(where + ": start must be non-negative and before end");
    }
    if ((e.users & ~known) != 0) throw UnknownUserError(where + ": references an unknown user");
    const int participants = std::popcount(e.users);
    switch (e.kind) {
      case EventKind::Success:
        if (participants != 1) throw MalformedEventError(where + ": success needs exactly one user");
        break;
      case EventKind::Collision:
        if (participants < 2) throw MalformedEventError(where + ": collision needs two or more users");
        break;
      case EventKind::Idle:
        if (participants != 0) throw MalformedEventError(where + ": idle event carries users");
        break;
    }
    if (i > 0) {
      const ChannelEvent& prev = events[i - 1];
      if (e.start < prev.start) throw OrderError(where + ": events are not sorted by start");
      if (e.start < prev.end) throw OverlapError(where + ": overlaps the previous event");
    }
    if (e.end > trace.horizon()) throw ValidationError(where + ": ends after the horizon");
  }
  return trace;
}

std::vector<ChannelEvent> successes_of(const ChannelTrace& trace, std::string_view user) {
  const std::size_t idx = trace.user_index(user);
  std::vector<ChannelEvent> out;
  for (const ChannelEvent& e : trace.events()) {
    if (e.kind == EventKind::Success && e.involves(idx)) out.push_back(e);
  }
  return out;
}

ChannelTrace discard_before(const ChannelTrace& trace, Tick t) {
  const auto& events = trace.events();
  auto first = std::find_if(events.begin(), events.end(),
                            [t](const ChannelEvent& e) { return e.start >= t; });
  return ChannelTrace(trace.users(), std::vector<ChannelEvent>(first, events.end()),
                      trace.horizon());
}

}  // namespace cct
