#pragma once

// Slot-granular, seeded simulators that emit channel traces: slotted Aloha,
// two-user saturated CSMA/CA (basic and RTS/CTS) and round-robin TDMA.
//
// Each user draws from its own random stream derived from (seed, user index),
// so a run is a pure function of its settings.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cctlab/core.hpp"

namespace cct {

inline constexpr Tick kDefaultWarmup = 1000;

struct RunSettings {
  std::uint64_t seed = 1;
  Tick horizon = 0;
  /// Events starting before this tick are dropped from the trace.
  Tick warmup = kDefaultWarmup;
  std::vector<std::string> users{"A", "B"};

  void validate() const;
};

ChannelTrace simulate_aloha(const RunSettings& settings, const AlohaParams& params);

/// N-user slotted Aloha; probs[i] belongs to settings.users[i].
ChannelTrace simulate_aloha(const RunSettings& settings, std::span<const double> probs, Tick slot);

enum class CsmaPhase { Difs, Contention, Nav, Rcts, Tran };

struct CsmaUserState {
  CsmaPhase phase = CsmaPhase::Difs;
  Tick phase_end = 0;  ///< first tick after the current timed phase
  std::int64_t backoff_counter = 0;
  int backoff_stage = 0;
  bool frozen = false;  ///< holds a residual counter from a lost contention
};

/// One contention resolution. Counters are the values each user held when
/// the contention round began, right after DIFS.
struct ContentionRecord {
  Tick t = 0;                        ///< first tick of the transmission
  std::optional<std::size_t> winner;  ///< empty on a collision
  std::array<int, 2> stage{};
  std::array<std::int64_t, 2> counter{};

  friend bool operator==(const ContentionRecord&, const ContentionRecord&) = default;
};

struct CsmaRun {
  ChannelTrace trace;
  std::vector<ContentionRecord> audit;  ///< empty unless requested
};

/// Two saturated users. Counters count down once per idle slot and a user
/// transmits in the slot after its counter reaches zero. The losing user
/// still decrements during the winner's first slot, then defers for the
/// remaining airtime minus one slot. A collision doubles both windows (capped
/// at beta) and both users redraw; after a success only the winner resets and
/// redraws.
CsmaRun simulate_csma(const RunSettings& settings, const CsmaParams& params, CsmaMode mode,
                      bool record_audit = false);

/// Back-to-back round-robin schedule; a packet that would cross the horizon is
/// omitted.
ChannelTrace simulate_tdma(const RunSettings& settings, std::span<const Tick> packet_lengths);

}  // namespace cct
