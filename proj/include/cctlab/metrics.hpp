#pragma once

// Short-term fairness measured on channel traces: refresh moments, cycle
// times, the channel cycle time, inter-transmission counts and the two-part
// split of a cycle.
//
// Conventions:
//  * A refresh moment is the end of a user's success whose next success in the
//    trace belongs to another user. A final success has no successor and is
//    never a refresh moment.
//  * M_n(t0, t1) counts the successes of user n that sit strictly between the
//    two bounding successes in trace order. For back-to-back transmissions this
//    is the same as counting events inside the closed interval [t0, t1].
//  * Only Success events take part; collisions and idle periods contribute
//    only through the timing of the successes around them.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cctlab/core.hpp"

namespace cct {

struct CycleInterval {
  Tick from = 0;  ///< earlier refresh moment t0
  Tick to = 0;    ///< later refresh moment t1
  Tick length() const noexcept { return to - from; }
  friend bool operator==(const CycleInterval&, const CycleInterval&) = default;
};

struct UserCycles {
  std::string user;
  std::vector<Tick> samples;
  std::optional<double> mean;  ///< empty when there are no samples
};

struct CycleTimeReport {
  std::vector<UserCycles> per_user;  ///< in trace user order
  std::optional<double> psi;         ///< channel cycle time in slots
  std::vector<std::string> users_without_samples;

  bool psi_undefined() const noexcept { return !psi.has_value(); }
};

struct InterTxReport {
  std::vector<std::pair<std::string, std::vector<std::int64_t>>> per_user_counts;
  std::map<std::int64_t, double> pooled_pmf;
  double mean = 0.0;
  std::size_t sample_count = 0;

  /// P(N_I = 0); zero when there are no samples.
  double p_zero() const;
};

/// One cycle of a user in a two-user trace, split at the end of the user's
/// first success inside the cycle.
struct PartDecomposition {
  Tick cycle_start = 0;
  Tick cycle_end = 0;
  std::int64_t n_b = 0;        ///< other user's successes in part 1
  std::int64_t n_a_prime = 0;  ///< the user's successes after the first one
  Tick t_part1 = 0;
  Tick t_part2 = 0;
};

std::vector<Tick> refresh_moments(const ChannelTrace& trace, std::string_view user);

/// Every qualifying (t0, t1) pair, ordered by t1 and then t0. Consecutive
/// refresh moments qualify when every other user succeeds in between.
/// A nonconsecutive pair qualifies when every other user succeeds in between
/// and some other user is silent between t0 and the refresh moment just
/// before t1.
std::vector<CycleInterval> cycle_intervals(const ChannelTrace& trace, std::string_view user);
std::vector<Tick> cycle_times(const ChannelTrace& trace, std::string_view user);

/// Throws TooFewUsersError for fewer than two users.
CycleTimeReport channel_cycle_time(const ChannelTrace& trace);

/// Other users' successes between each adjacent pair of the user's successes.
std::vector<std::int64_t> inter_transmissions(const ChannelTrace& trace, std::string_view user);
InterTxReport inter_transmission_report(const ChannelTrace& trace);

/// Defined for exactly two users; throws TooFewUsersError below that and
/// DomainError above.
std::vector<PartDecomposition> part_decomposition(const ChannelTrace& trace, std::string_view user);

/// Fraction of the horizon covered by successes.
double throughput(const ChannelTrace& trace);

}  // namespace cct
