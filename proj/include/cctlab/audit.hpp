#pragma once

// Contention audit log of a CSMA/CA run, one line per contention resolution:
//
//   t,winner|collision,stage_a,stage_b,lambda_a,lambda_b
//
// where lambda is the counter each user held when the round started. A value
// is a fresh draw when the user won the previous round, or the previous round
// was a collision, or it is the first round; otherwise it is a frozen residual.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cctlab/core.hpp"
#include "cctlab/sim.hpp"

namespace cct {

void write_audit(std::ostream& out, std::span<const ContentionRecord> records,
                 std::span<const std::string> users);
void save_audit(const std::filesystem::path& path, std::span<const ContentionRecord> records,
                std::span<const std::string> users);
/// Throws ParseError.
std::vector<ContentionRecord> read_audit(std::istream& in, std::span<const std::string> users);

/// A cycle of one user rebuilt from the audit log alone: the counts come from
/// the sequence of round outcomes and the durations from the per-part
/// accounting of DIFS, deferral, RTS/CTS, transmission and backoff slots.
struct CycleAccount {
  Tick cycle_start = 0;  ///< end of the success that opens the cycle
  std::int64_t n_b = 0;
  std::int64_t n_a_prime = 0;
  std::int64_t collisions_part1 = 0;
  std::int64_t collisions_part2 = 0;
  std::int64_t backoff_part1 = 0;  ///< sum of the user's fresh draws in part 1
  std::int64_t backoff_part2 = 0;
  Tick t_part1 = 0;
  Tick t_part2 = 0;
};

/// Part 1 (RTS/CTS): n_B (difs + nav) + tran + sum_{i=0..rho1} (difs + rcts + lambda_i).
/// Part 1 (basic):   n_B (difs + tran - 1) + sum_{i=0..rho1} (difs + tran + lambda_i).
/// Part 2 adds, per later success j of the user, tran + sum_i (difs + rcts + lambda_i^(j))
/// (RTS/CTS) or sum_i (difs + tran + lambda_i^(j)) (basic).
std::vector<CycleAccount> account_cycles(std::span<const ContentionRecord> records,
                                         const CsmaParams& params, CsmaMode mode,
                                         std::size_t user);

}  // namespace cct
