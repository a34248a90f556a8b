#pragma once

// Closed-form channel cycle times for two-user slotted Aloha and CSMA/CA, the
// collision-probability fixed point and the quantities derived from them.
// Every result is in slots.

#include <cstdint>
#include <span>
#include <utility>

#include "cctlab/core.hpp"

namespace cct {

enum class AnalyticMode { AlohaSlotted, CsmaRtsCts, CsmaBasic, TdmaRoundRobin };

/// Inter-transmission statistics fed into the CSMA/CA expressions. The
/// defaults are the commonly cited constants for two saturated 802.11 users.
struct InterTxStats {
  double p_ni0 = 0.32;  ///< P(N_I = 0)
  double e_ni = 1.0;    ///< E(N_I)
};

struct CctComponents {
  double part1_mean = 0.0;
  double part2_mean = 0.0;
  double mu = 0.0;   ///< expected backoff slots per successful transmission
  double p_c = 0.0;  ///< collision probability
  double p_ni0 = 0.0;
  double e_ni = 0.0;
};

struct AnalyticCct {
  double psi_slots = 0.0;
  CctComponents components;
  AnalyticMode mode = AnalyticMode::AlohaSlotted;
  /// Set when fewer than two users are involved, so no cycle exists even
  /// though psi_slots carries the round length.
  bool single_user = false;
};

// --- slotted Aloha ---------------------------------------------------------

struct SuccessSplit {
  double a = 0.0;  ///< P(packet is from A | success)
  double b = 0.0;
};

/// Throws DegenerateError when no slot can ever carry a success.
SuccessSplit aloha_success_split(double p_a, double p_b);

/// Mean time between successes, T_slot / P(success).
double aloha_mean_success_time(const AlohaParams& params);

/// Psi = P(success) / ((1-p_a)(1-p_b) p_a p_b) * T_slot.
AnalyticCct aloha_cct(const AlohaParams& params);

struct AlohaOptimum {
  double p_a = 0.5;
  double p_b = 0.5;
  double psi_slots = 8.0;
  double offered_load = 1.0;  ///< G = p_a + p_b at the optimum
};

AlohaOptimum aloha_optimum(Tick slot = 1);

// --- CSMA/CA ---------------------------------------------------------------

struct CollisionFixedPoint {
  double p_c = 0.0;
  double residual = 0.0;  ///< |p_c - rhs(p_c)|
  int iterations = 0;

  double tau() const noexcept { return p_c; }  // two users: tau == p_c
};

/// Right-hand side of p = 2(1-2p) / ((1-2p)(W+3) + p W (1-(2p)^beta)).
double collision_rhs(double p, int cw_min, int beta);

/// Bisection on p - rhs(p) over [1e-9, 0.5 - 1e-9]. Throws NoRootError when
/// the bracket holds no sign change (cw_min = 1, beta = 0 puts the root on
/// the boundary p = 0.5).
CollisionFixedPoint solve_collision_probability(int cw_min, int beta);

/// mu = sum_{i<beta} p^i (1 + 2^i W)/2 + p^beta/(1-p) (1 + 2^beta W)/2.
double expected_backoff_sum(double p_c, int cw_min, int beta);

/// Solves for p_c, then evaluates the closed form for `mode`.
AnalyticCct csma_cct(const CsmaParams& params, CsmaMode mode, InterTxStats stats = {});
/// Same with a caller-supplied collision probability in [0, 1).
AnalyticCct csma_cct_at(const CsmaParams& params, CsmaMode mode, double p_c,
                        InterTxStats stats = {});

/// Simplified RTS/CTS expression for CW_max = CW_min (beta is ignored):
/// (2(difs+rcts)/(W+1) + (W+1)/2 + C) / (1 - P0), C = 2 difs + nav + rcts + tran + 1.
double csma_cct_fixed_window(const CsmaParams& params, double p_ni0 = 0.32);

/// Continuous minimiser of csma_cct_fixed_window over CW_min: 2 sqrt(difs+rcts) - 1.
double cw_min_optimal(Tick l_difs, Tick l_rcts);

/// Integer CW_min in [lo, hi] minimising csma_cct_fixed_window; smallest on ties.
int cw_min_integer_optimum(const CsmaParams& params, int lo = 1, int hi = 64);

/// Packet length at which RTS/CTS and basic access have equal cycle times:
/// ((2 - p_c) / p_c) * l_rcts.
double rtscts_basic_inflection(double p_c, double l_rcts);

/// (E(n_B), E(n_A')) = (E(N_I), P0) / (1 - P0).
std::pair<double, double> part_count_means(double p_ni0, double e_ni);

// --- TDMA ------------------------------------------------------------------

/// Round-robin TDMA: the sum of packet lengths. Throws EmptyError.
AnalyticCct tdma_cct(std::span<const Tick> packet_lengths);

}  // namespace cct
