// Checks of two distributional statements about the two-user CSMA/CA model
// that the simulator does not reproduce. Kept out of the default run; see
// the README.

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "cctlab/analytic.hpp"
#include "cctlab/metrics.hpp"
#include "cctlab/sim.hpp"

using namespace cct;

namespace {

ChannelTrace reference_run(std::uint64_t seed, Tick horizon, int cw_min = 32) {
  RunSettings s;
  s.seed = seed;
  s.horizon = horizon;
  CsmaParams p = CsmaParams::reference();
  p.cw_min = cw_min;
  return simulate_csma(s, p, CsmaMode::RtsCts).trace;
}

}  // namespace

// n_A' ~ P0^k (1 - P0), tested by chi-square at the 1% level over >= 1e5 cycles.
TEST(Claims, RepeatCountIsGeometric) {
  const ChannelTrace t = reference_run(31, 30'000'000);
  const double p0 = inter_transmission_report(t).p_zero();
  std::vector<double> observed(8, 0.0);
  double n = 0;
  for (const std::string user : {"A", "B"}) {
    for (const auto& d : part_decomposition(t, user)) {
      observed[std::min<std::size_t>(d.n_a_prime, observed.size() - 1)] += 1;
      ++n;
    }
  }
  ASSERT_GE(n, 1e5);
  double chi2 = 0;
  int cells = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double prob = k + 1 < observed.size() ? std::pow(p0, k) * (1 - p0) : std::pow(p0, k);
    const double expected = n * prob;
    if (expected < 5) continue;
    chi2 += (observed[k] - expected) * (observed[k] - expected) / expected;
    ++cells;
  }
  const boost::math::chi_squared dist(cells - 2);  // one estimated parameter
  const double p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  std::printf("n_A' chi2=%.1f cells=%d p=%.3g (P0=%.4f)\n", chi2, cells, p_value, p0);
  EXPECT_GT(p_value, 0.01);
}

// collisions / contention resolutions ~ p_c from the fixed point.
TEST(Claims, CollisionsPerContentionMatchFixedPoint) {
  for (int w : {16, 32, 64}) {
    const ChannelTrace t = reference_run(32, 10'000'000, w);
    double collisions = 0, rounds = 0;
    for (const auto& e : t.events()) {
      collisions += e.kind == EventKind::Collision;
      rounds += e.kind != EventKind::Idle;
    }
    const double pc = solve_collision_probability(w, 5).p_c;
    std::printf("cw_min=%d collisions/rounds=%.4f p_c=%.4f\n", w, collisions / rounds, pc);
    EXPECT_NEAR(collisions / rounds, pc, 0.1 * pc);
  }
}
