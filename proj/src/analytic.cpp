#include "cctlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cct {

namespace {

double success_probability(double p_a, double p_b) {
  return (1.0 - p_a) * p_b + (1.0 - p_b) * p_a;
}

void require_probability(double p, const char* name) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw DomainError(std::string(name) + " must lie in [0, 1]");
  }
}

void check_stats(const InterTxStats& stats) {
  if (!std::isfinite(stats.p_ni0) || stats.p_ni0 <= 0.0 || stats.p_ni0 >= 1.0) {
    throw DomainError("P(N_I = 0) must lie strictly between 0 and 1, got " +
                      std::to_string(stats.p_ni0));
  }
  if (!std::isfinite(stats.e_ni) || stats.e_ni < 0.0) {
    throw DomainError("E(N_I) must be non-negative");
  }
}

constexpr double kBracketLow = 1e-9;
constexpr double kBracketHigh = 0.5 - 1e-9;
constexpr double kResidualTolerance = 1e-12;

}  // namespace

SuccessSplit aloha_success_split(double p_a, double p_b) {
  require_probability(p_a, "p_a");
  require_probability(p_b, "p_b");
  const double s = success_probability(p_a, p_b);
  if (s <= 0.0) throw DegenerateError("no slot can carry a success for these probabilities");
  return {(1.0 - p_b) * p_a / s, (1.0 - p_a) * p_b / s};
}

double aloha_mean_success_time(const AlohaParams& params) {
  params.validate();
  const double s = success_probability(params.p_a, params.p_b);
  if (s <= 0.0) throw DegenerateError("no slot can carry a success for these probabilities");
  return static_cast<double>(params.slot) / s;
}

AnalyticCct aloha_cct(const AlohaParams& params) {
  params.validate();
  // Sorted so that swapping the users gives a bit-identical result.
  const double pa = std::min(params.p_a, params.p_b);
  const double pb = std::max(params.p_a, params.p_b);
  const double denom = (1.0 - pa) * (1.0 - pb) * pa * pb;
  if (denom <= 0.0) {
    throw DegenerateError("channel cycle time is infinite unless 0 < p_a, p_b < 1");
  }
  AnalyticCct out;
  out.mode = AnalyticMode::AlohaSlotted;
  out.psi_slots = success_probability(pa, pb) / denom * static_cast<double>(params.slot);
  return out;
}

AlohaOptimum aloha_optimum(Tick slot) {
  if (slot < 1) throw ValidationError("slot must be at least one tick");
  AlohaOptimum opt;
  opt.psi_slots = aloha_cct({opt.p_a, opt.p_b, slot}).psi_slots;
  opt.offered_load = opt.p_a + opt.p_b;
  return opt;
}

double collision_rhs(double p, int cw_min, int beta) {
  const double w = cw_min;
  const double q = 1.0 - 2.0 * p;
  return 2.0 * q / (q * (w + 3.0) + p * w * (1.0 - std::pow(2.0 * p, beta)));
}

CollisionFixedPoint solve_collision_probability(int cw_min, int beta) {
  if (cw_min < 1 || beta < 0) throw DomainError("need cw_min >= 1 and beta >= 0");
  const auto f = [&](double p) { return p - collision_rhs(p, cw_min, beta); };
  double lo = kBracketLow;
  double hi = kBracketHigh;
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw NoRootError("no sign change of p - rhs(p) in (0, 0.5) for cw_min=" +
                      std::to_string(cw_min) + ", beta=" + std::to_string(beta));
  }
  CollisionFixedPoint out;
  double mid = 0.5 * (lo + hi);
  while (true) {
    mid = 0.5 * (lo + hi);
    ++out.iterations;
    const double f_mid = f(mid);
    if (std::abs(f_mid) <= kResidualTolerance / 4 || mid <= lo || mid >= hi) break;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  out.p_c = mid;
  out.residual = std::abs(mid - collision_rhs(mid, cw_min, beta));
  if (out.residual > kResidualTolerance) {
    throw NoRootError("bisection stalled with residual " + std::to_string(out.residual));
  }
  return out;
}

double expected_backoff_sum(double p_c, int cw_min, int beta) {
  if (!std::isfinite(p_c) || p_c < 0.0 || p_c >= 1.0) {
    throw DomainError("collision probability must lie in [0, 1)");
  }
  if (cw_min < 1 || beta < 0) throw DomainError("need cw_min >= 1 and beta >= 0");
  const auto mean_draw = [cw_min](int stage) {
    return (1.0 + std::ldexp(static_cast<double>(cw_min), stage)) / 2.0;
  };
  double mu = 0.0;
  double weight = 1.0;  // p_c^i
  for (int i = 0; i < beta; ++i) {
    mu += weight * mean_draw(i);
    weight *= p_c;
  }
  return mu + weight / (1.0 - p_c) * mean_draw(beta);
}

AnalyticCct csma_cct_at(const CsmaParams& params, CsmaMode mode, double p_c, InterTxStats stats) {
  params.validate();
  check_stats(stats);
  const double mu = expected_backoff_sum(p_c, params.cw_min, params.beta);
  const double difs = static_cast<double>(params.l_difs);
  const double tran = static_cast<double>(params.l_tran());
  const double rcts = static_cast<double>(params.l_rcts());
  const double scale = 1.0 / (1.0 - stats.p_ni0);

  // Deferral per success of the other user, and the cost of one own success
  // including the expected collisions before it.
  double defer = 0.0;
  double own = 0.0;
  if (mode == CsmaMode::RtsCts) {
    defer = difs + static_cast<double>(params.l_nav());
    own = tran + (difs + rcts) / (1.0 - p_c) + mu;
  } else {
    defer = difs + tran - 1.0;
    own = (difs + tran) / (1.0 - p_c) + mu;
  }

  AnalyticCct out;
  out.mode = mode == CsmaMode::RtsCts ? AnalyticMode::CsmaRtsCts : AnalyticMode::CsmaBasic;
  out.components.p_c = p_c;
  out.components.mu = mu;
  out.components.p_ni0 = stats.p_ni0;
  out.components.e_ni = stats.e_ni;
  out.components.part1_mean = defer * stats.e_ni * scale + own;
  out.components.part2_mean = stats.p_ni0 * scale * own;
  out.psi_slots = scale * (defer * stats.e_ni + own);
  return out;
}

AnalyticCct csma_cct(const CsmaParams& params, CsmaMode mode, InterTxStats stats) {
  params.validate();
  const CollisionFixedPoint fp = solve_collision_probability(params.cw_min, params.beta);
  return csma_cct_at(params, mode, fp.p_c, stats);
}

double csma_cct_fixed_window(const CsmaParams& params, double p_ni0) {
  params.validate();
  check_stats({p_ni0, 1.0});
  const double w1 = params.cw_min + 1.0;
  const double difs = static_cast<double>(params.l_difs);
  const double rcts = static_cast<double>(params.l_rcts());
  const double c = 2.0 * difs + static_cast<double>(params.l_nav()) + rcts +
                   static_cast<double>(params.l_tran()) + 1.0;
  return (2.0 * (difs + rcts) / w1 + w1 / 2.0 + c) / (1.0 - p_ni0);
}

double cw_min_optimal(Tick l_difs, Tick l_rcts) {
  if (l_difs < 0 || l_rcts < 0 || l_difs + l_rcts <= 0) {
    throw DomainError("durations must be positive");
  }
  return 2.0 * std::sqrt(static_cast<double>(l_difs + l_rcts)) - 1.0;
}

int cw_min_integer_optimum(const CsmaParams& params, int lo, int hi) {
  if (lo < 1 || hi < lo) throw DomainError("need 1 <= lo <= hi");
  CsmaParams probe = params;
  int best = lo;
  double best_psi = std::numeric_limits<double>::infinity();
  for (int w = lo; w <= hi; ++w) {
    probe.cw_min = w;
    const double psi = csma_cct_fixed_window(probe);
    if (psi < best_psi) {
      best_psi = psi;
      best = w;
    }
  }
  return best;
}

double rtscts_basic_inflection(double p_c, double l_rcts) {
  if (!std::isfinite(p_c) || p_c <= 0.0 || p_c > 1.0) {
    throw DomainError("collision probability must lie in (0, 1]");
  }
  return (2.0 - p_c) / p_c * l_rcts;
}

std::pair<double, double> part_count_means(double p_ni0, double e_ni) {
  if (!std::isfinite(p_ni0) || p_ni0 < 0.0 || p_ni0 >= 1.0) {
    throw DomainError("P(N_I = 0) must lie in [0, 1)");
  }
  if (!std::isfinite(e_ni) || e_ni < 0.0) throw DomainError("E(N_I) must be non-negative");
  return {e_ni / (1.0 - p_ni0), p_ni0 / (1.0 - p_ni0)};
}

AnalyticCct tdma_cct(std::span<const Tick> packet_lengths) {
  if (packet_lengths.empty()) throw EmptyError("TDMA needs at least one user");
  for (Tick l : packet_lengths) {
    if (l < 1) throw ValidationError("packet lengths must be positive");
  }
  AnalyticCct out;
  out.mode = AnalyticMode::TdmaRoundRobin;
  out.psi_slots = static_cast<double>(
      std::accumulate(packet_lengths.begin(), packet_lengths.end(), Tick{0}));
  out.single_user = packet_lengths.size() < 2;
  return out;
}

}  // namespace cct
