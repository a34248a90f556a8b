#pragma once

// Parameter sweeps: every axis point is evaluated analytically and by
// replicated simulation. Replication r of every point and protocol uses the
// seed derive_seed(seed, r), so protocols are compared on common random
// numbers. Rows come out in axis order, then protocol order, whatever the
// number of worker threads.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cctlab/analytic.hpp"
#include "cctlab/core.hpp"
#include "cctlab/sim.hpp"

namespace cct {

enum class Protocol { Aloha, CsmaRtsCts, CsmaBasic, Tdma };

std::string_view to_string(Protocol protocol);
/// Accepts "aloha", "csma-rtscts", "csma-basic" and "tdma". Throws ValidationError.
Protocol parse_protocol(std::string_view text);

struct SweepConfig {
  std::vector<Protocol> protocols;
  std::uint64_t seed = 1;
  int repetitions = 10;
  Tick slots = 1'000'000;  ///< simulated horizon per replication
  Tick warmup = kDefaultWarmup;
  CsmaParams csma = CsmaParams::reference();
  AlohaParams aloha{};  ///< transmit probabilities for the packet-length axis
  InterTxStats stats{};
  unsigned jobs = 1;

  void validate() const;
};

struct SweepRow {
  std::string x;
  Protocol protocol = Protocol::Aloha;
  double psi_analytic_slots = 0.0;
  double psi_sim_mean_slots = 0.0;
  double psi_sim_ci95 = 0.0;  ///< half-width, Student t over replications

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Packet length axis. Aloha uses one packet per slot of length l_pkt and TDMA
/// gives each of the two users one l_pkt slot per round.
std::vector<SweepRow> sweep_packet_length(const SweepConfig& config, std::span<const Tick> lengths);

/// Aloha transmit-probability grid; x is "p_a:p_b". Only Aloha is accepted.
std::vector<SweepRow> sweep_aloha_grid(const SweepConfig& config, std::span<const double> p_a,
                                       std::span<const double> p_b, bool symmetric_only = false);

/// Minimum contention window axis. Only the CSMA/CA protocols are accepted.
std::vector<SweepRow> sweep_cw_min(const SweepConfig& config, std::span<const int> cw_mins);

/// Mean and 95% half-width of a sample; the half-width is NaN below two values.
std::pair<double, double> mean_ci95(std::span<const double> values);

/// "lo:hi:step" or a comma separated list. Throws ValidationError.
std::vector<double> parse_real_range(std::string_view text);
std::vector<std::int64_t> parse_int_range(std::string_view text);

inline constexpr std::string_view kSweepHeader =
    "x,protocol,psi_analytic_slots,psi_sim_mean_slots,psi_sim_ci95";

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
/// Throws ParseError on a wrong header or a malformed row.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

}  // namespace cct
