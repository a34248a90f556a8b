#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "cctlab/analytic.hpp"
#include "cctlab/audit.hpp"
#include "cctlab/metrics.hpp"
#include "cctlab/rng.hpp"
#include "cctlab/sim.hpp"
#include "cctlab/trace_io.hpp"

using namespace cct;

namespace {

RunSettings run(std::uint64_t seed, Tick horizon, Tick warmup = 0) {
  RunSettings s;
  s.seed = seed;
  s.horizon = horizon;
  s.warmup = warmup;
  return s;
}

// Jumps from one contention round to the next instead of stepping slots.
ChannelTrace csma_by_rounds(const RunSettings& s, const CsmaParams& p, CsmaMode mode) {
  std::array<RandomStream, 2> rng{RandomStream(s.seed, 0), RandomStream(s.seed, 1)};
  std::array<int, 2> stage{0, 0};
  std::array<std::int64_t, 2> counter{};
  for (std::size_t u = 0; u < 2; ++u) counter[u] = rng[u].uniform_int(1, p.contention_window(0));

  std::vector<ChannelEvent> events;
  Tick free_at = 0;  // channel released
  for (;;) {
    const std::int64_t wait = std::min(counter[0], counter[1]);
    const Tick tx = free_at + p.l_difs + wait;
    const bool collision = counter[0] == counter[1];
    const Tick air = collision ? p.collision_airtime(mode) : p.success_airtime(mode);
    if (tx >= s.horizon || tx + air > s.horizon) break;
    if (tx > free_at) events.push_back(ChannelEvent::idle(free_at, tx));
    if (collision) {
      events.push_back(ChannelEvent::collision(tx, tx + air, 0b11));
      for (std::size_t u = 0; u < 2; ++u) {
        stage[u] = std::min(stage[u] + 1, p.beta);
        counter[u] = rng[u].uniform_int(1, p.contention_window(stage[u]));
      }
    } else {
      const std::size_t w = counter[0] < counter[1] ? 0 : 1;
      events.push_back(ChannelEvent::success(tx, tx + air, w));
      counter[1 - w] -= wait + 1;
      stage[w] = 0;
      counter[w] = rng[w].uniform_int(1, p.contention_window(0));
    }
    free_at = tx + air;
  }
  if (s.horizon > free_at) events.push_back(ChannelEvent::idle(free_at, s.horizon));
  return ChannelTrace(s.users, events, s.horizon);
}

double per_station_collision_rate(const ChannelTrace& t) {
  std::int64_t collisions = 0, successes = 0;
  for (const auto& e : t.events()) {
    collisions += e.kind == EventKind::Collision;
    successes += e.kind == EventKind::Success;
  }
  // Each station sees every collision and about half of the successes.
  return static_cast<double>(collisions) / (collisions + successes / 2.0);
}

double per_round_collision_rate(const ChannelTrace& t) {
  std::int64_t collisions = 0, rounds = 0;
  for (const auto& e : t.events()) {
    collisions += e.kind == EventKind::Collision;
    rounds += e.kind != EventKind::Idle;
  }
  return static_cast<double>(collisions) / static_cast<double>(rounds);
}

}  // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  RandomStream a(1, 0), b(1, 0), c(1, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Rng, UniformIntCoversRangeEvenly) {
  RandomStream r(4, 2);
  std::map<std::int64_t, int> hist;
  for (int i = 0; i < 64'000; ++i) ++hist[r.uniform_int(1, 32)];
  ASSERT_EQ(hist.size(), 32U);
  EXPECT_EQ(hist.begin()->first, 1);
  EXPECT_EQ(hist.rbegin()->first, 32);
  for (auto [k, n] : hist) EXPECT_NEAR(n, 2000, 250) << k;
}

TEST(Aloha, DeterministicAndWellFormed) {
  const ChannelTrace a = simulate_aloha(run(3, 20'000, 100), AlohaParams{});
  const ChannelTrace b = simulate_aloha(run(3, 20'000, 100), AlohaParams{});
  EXPECT_EQ(format_trace(a), format_trace(b));
  EXPECT_NO_THROW(validate_trace(a));
  EXPECT_GE(a.events().front().start, 100);
  EXPECT_NE(format_trace(a), format_trace(simulate_aloha(run(4, 20'000, 100), AlohaParams{})));
}

TEST(Aloha, SuccessFraction) {
  const ChannelTrace t = simulate_aloha(run(9, 1'000'000), AlohaParams{0.5, 0.5, 1});
  EXPECT_NEAR(throughput(t), 0.5, 0.003);
  const ChannelTrace u = simulate_aloha(run(9, 1'000'000), AlohaParams{0.2, 0.7, 1});
  EXPECT_NEAR(throughput(u), 0.2 * 0.3 + 0.7 * 0.8, 0.003);
}

TEST(Aloha, DegenerateSingleTransmitter) {
  const ChannelTrace t = simulate_aloha(run(1, 100), AlohaParams{1.0, 0.0, 1});
  for (const auto& e : t.events()) ASSERT_EQ(e.kind, EventKind::Success);
  EXPECT_TRUE(channel_cycle_time(t).psi_undefined());
}

TEST(Aloha, ManyUsers) {
  RunSettings s = run(2, 100'000);
  s.users = {"A", "B", "C"};
  const std::vector<double> probs{0.3, 0.3, 0.3};
  const ChannelTrace t = simulate_aloha(s, probs, 2);
  EXPECT_NO_THROW(validate_trace(t));
  EXPECT_NEAR(throughput(t), 3 * 0.3 * 0.49, 0.01);
}

TEST(Aloha, ValidatesSettings) {
  EXPECT_THROW(simulate_aloha(run(1, 0), AlohaParams{}), ValidationError);
  RunSettings s = run(1, 10);
  s.users = {"A"};
  EXPECT_THROW(simulate_aloha(s, AlohaParams{}), ValidationError);
}

TEST(Csma, MatchesRoundBasedReference) {
  for (CsmaMode mode : {CsmaMode::RtsCts, CsmaMode::Basic}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      for (int w : {2, 8, 32}) {
        CsmaParams p = CsmaParams::reference(seed == 2 ? 5 : 30);
        p.cw_min = w;
        p.beta = w == 2 ? 1 : 5;
        const RunSettings s = run(seed, 200'000);
        ASSERT_EQ(simulate_csma(s, p, mode).trace, csma_by_rounds(s, p, mode))
            << to_string(mode) << " seed " << seed << " w " << w;
      }
    }
  }
}

TEST(Csma, DeterministicAndWellFormed) {
  const CsmaParams p = CsmaParams::reference();
  const auto a = simulate_csma(run(7, 300'000, 1000), p, CsmaMode::RtsCts, true);
  const auto b = simulate_csma(run(7, 300'000, 1000), p, CsmaMode::RtsCts, true);
  EXPECT_EQ(format_trace(a.trace), format_trace(b.trace));
  EXPECT_EQ(a.audit, b.audit);
  EXPECT_NO_THROW(validate_trace(a.trace));
  EXPECT_GE(a.trace.events().front().start, 1000);
}

TEST(Csma, UnitWindowOnlyCollides) {
  CsmaParams p = CsmaParams::reference();
  p.cw_min = 1;
  p.beta = 0;
  const ChannelTrace t = simulate_csma(run(1, 10'000), p, CsmaMode::Basic).trace;
  std::size_t collisions = 0;
  for (const auto& e : t.events()) {
    ASSERT_NE(e.kind, EventKind::Success);
    collisions += e.kind == EventKind::Collision;
  }
  EXPECT_GT(collisions, 100U);
}

TEST(Csma, CollisionProbabilityPerStation) {
  for (int w : {16, 32, 64}) {
    CsmaParams p = CsmaParams::reference();
    p.cw_min = w;
    const ChannelTrace t = simulate_csma(run(5, 10'000'000), p, CsmaMode::RtsCts).trace;
    const double pc = solve_collision_probability(w, 5).p_c;
    EXPECT_NEAR(per_station_collision_rate(t), pc, 0.1 * pc) << w;
    EXPECT_NEAR(per_round_collision_rate(t), pc / (2 - pc), 0.1 * pc / (2 - pc)) << w;
  }
}

TEST(Csma, UsersAreSymmetric) {
  const ChannelTrace t =
      simulate_csma(run(6, 10'000'000), CsmaParams::reference(), CsmaMode::RtsCts).trace;
  const CycleTimeReport r = channel_cycle_time(t);
  const double a = *r.per_user[0].mean, b = *r.per_user[1].mean;
  EXPECT_LT(std::abs(a - b) / ((a + b) / 2), 0.02);
}

TEST(Csma, PartCountMeans) {
  const ChannelTrace t =
      simulate_csma(run(8, 20'000'000), CsmaParams::reference(), CsmaMode::RtsCts).trace;
  const InterTxReport itx = inter_transmission_report(t);
  const auto [nb_expected, na_expected] = part_count_means(itx.p_zero(), itx.mean);
  double nb = 0, na = 0, n = 0;
  for (const std::string user : {"A", "B"}) {
    for (const PartDecomposition& d : part_decomposition(t, user)) {
      nb += static_cast<double>(d.n_b);
      na += static_cast<double>(d.n_a_prime);
      ++n;
    }
  }
  EXPECT_NEAR(nb / n, nb_expected, 0.05 * nb_expected);
  EXPECT_NEAR(na / n, na_expected, 0.05 * na_expected);
}

TEST(Csma, NearClosedForm) {
  const CsmaParams p = CsmaParams::reference();
  const ChannelTrace t = simulate_csma(run(2, 5'000'000), p, CsmaMode::RtsCts).trace;
  const double psi = *channel_cycle_time(t).psi;
  EXPECT_NEAR(psi, csma_cct(p, CsmaMode::RtsCts).psi_slots, 0.05 * psi);
}

TEST(Audit, ReconstructsEveryCycle) {
  for (CsmaMode mode : {CsmaMode::RtsCts, CsmaMode::Basic}) {
    for (Tick pkt : {3, 30}) {
      const CsmaParams p = CsmaParams::reference(pkt);
      const auto result = simulate_csma(run(11, 2'000'000, 0), p, mode, true);
      for (std::size_t u = 0; u < 2; ++u) {
        const auto parts = part_decomposition(result.trace, result.trace.users()[u]);
        const auto accounts = account_cycles(result.audit, p, mode, u);
        ASSERT_EQ(parts.size(), accounts.size());
        ASSERT_GT(parts.size(), 1000U);
        for (std::size_t k = 0; k < parts.size(); ++k) {
          ASSERT_EQ(accounts[k].cycle_start, parts[k].cycle_start);
          ASSERT_EQ(accounts[k].n_b, parts[k].n_b);
          ASSERT_EQ(accounts[k].n_a_prime, parts[k].n_a_prime);
          ASSERT_EQ(accounts[k].t_part1, parts[k].t_part1) << k;
          ASSERT_EQ(accounts[k].t_part2, parts[k].t_part2) << k;
        }
      }
    }
  }
}

TEST(Audit, TextRoundTrip) {
  const auto result =
      simulate_csma(run(12, 100'000), CsmaParams::reference(), CsmaMode::RtsCts, true);
  std::stringstream text;
  write_audit(text, result.audit, result.trace.users());
  EXPECT_EQ(read_audit(text, result.trace.users()), result.audit);
  std::stringstream bad("#t,outcome,stage_a,stage_b,lambda_a,lambda_b\n5,Z,0,0,1,2\n");
  EXPECT_THROW(read_audit(bad, result.trace.users()), ParseError);
}

TEST(Tdma, ExactCycleTime) {
  const std::vector<Tick> two{30, 30};
  const ChannelTrace t = simulate_tdma(run(1, 100'000), two);
  EXPECT_DOUBLE_EQ(*channel_cycle_time(t).psi, tdma_cct(two).psi_slots);
  for (const auto& e : t.events()) {
    if (e.end <= 99'990) ASSERT_EQ(e.kind, EventKind::Success);
  }
}

TEST(Tdma, PartialPacketOmitted) {
  const std::vector<Tick> lengths{10, 20, 30};
  RunSettings s = run(1, 115);
  s.users = {"A", "B", "C"};
  const ChannelTrace t = simulate_tdma(s, lengths);
  EXPECT_NO_THROW(validate_trace(t));
  const auto& events = t.events();
  ASSERT_EQ(events.size(), 6U);  // A B C A B + trailing idle
  EXPECT_EQ(events[4].end, 90);
  EXPECT_EQ(events[5].kind, EventKind::Idle);
  EXPECT_EQ(events[5].end, 115);
}
