#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cctlab/metrics.hpp"
#include "cctlab/report.hpp"
#include "cctlab/rng.hpp"
#include "cctlab/sweep.hpp"

using namespace cct;

namespace {

SweepConfig small_config() {
  SweepConfig c;
  c.protocols = {Protocol::Aloha, Protocol::CsmaRtsCts, Protocol::CsmaBasic, Protocol::Tdma};
  c.repetitions = 3;
  c.slots = 200'000;
  c.seed = 17;
  return c;
}

std::string csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  write_sweep_csv(out, rows);
  return out.str();
}

}  // namespace

TEST(Ranges, ParseStepAndList) {
  EXPECT_EQ(parse_int_range("30:100:10"), (std::vector<std::int64_t>{30, 40, 50, 60, 70, 80, 90, 100}));
  EXPECT_EQ(parse_int_range("4,8"), (std::vector<std::int64_t>{4, 8}));
  EXPECT_EQ(parse_real_range("0.2:0.8:0.15"), (std::vector<double>{0.2, 0.35, 0.5, 0.65, 0.8}));
  EXPECT_THROW(parse_int_range("5:1:1"), ValidationError);
  EXPECT_THROW(parse_real_range("a,b"), ValidationError);
}

TEST(MeanCi, StudentT) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto [mean, half] = mean_ci95(v);
  EXPECT_DOUBLE_EQ(mean, 2.5);
  EXPECT_NEAR(half, 3.182446305 * std::sqrt(5.0 / 3.0) / 2.0, 1e-8);
  EXPECT_TRUE(std::isnan(mean_ci95(std::vector<double>{1.0}).second));
}

TEST(Sweep, RowsInAxisThenProtocolOrder) {
  const std::vector<Tick> lengths{30, 60};
  const auto rows = sweep_packet_length(small_config(), lengths);
  ASSERT_EQ(rows.size(), 8U);
  EXPECT_EQ(rows[0].x, "30");
  EXPECT_EQ(rows[0].protocol, Protocol::Aloha);
  EXPECT_EQ(rows[3].protocol, Protocol::Tdma);
  EXPECT_EQ(rows[4].x, "60");
  EXPECT_DOUBLE_EQ(rows[0].psi_analytic_slots, 240.0);
  EXPECT_DOUBLE_EQ(rows[3].psi_analytic_slots, 60.0);
  EXPECT_DOUBLE_EQ(rows[3].psi_sim_mean_slots, 60.0);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.psi_sim_mean_slots, r.psi_analytic_slots, 0.06 * r.psi_analytic_slots)
        << r.x << ' ' << to_string(r.protocol);
  }
}

TEST(Sweep, SeedDeterminesOutputAcrossThreadCounts) {
  const std::vector<Tick> lengths{20, 40};
  SweepConfig one = small_config();
  SweepConfig four = small_config();
  four.jobs = 4;
  const std::string a = csv(sweep_packet_length(one, lengths));
  EXPECT_EQ(a, csv(sweep_packet_length(one, lengths)));
  EXPECT_EQ(a, csv(sweep_packet_length(four, lengths)));
  SweepConfig other = small_config();
  other.seed = 18;
  EXPECT_NE(a, csv(sweep_packet_length(other, lengths)));
}

TEST(Sweep, SinglePointAgreesWithDirectRun) {
  SweepConfig c = small_config();
  c.protocols = {Protocol::CsmaRtsCts};
  c.repetitions = 1;
  const std::vector<Tick> lengths{30};
  const auto rows = sweep_packet_length(c, lengths);
  RunSettings s;
  s.seed = derive_seed(c.seed, 0);
  s.horizon = c.slots;
  s.warmup = c.warmup;
  const auto trace = simulate_csma(s, CsmaParams::reference(30), CsmaMode::RtsCts).trace;
  EXPECT_EQ(rows[0].psi_sim_mean_slots, *channel_cycle_time(trace).psi);
  EXPECT_EQ(rows[0].psi_analytic_slots, csma_cct(CsmaParams::reference(30), CsmaMode::RtsCts).psi_slots);
}

TEST(Sweep, AlohaGridLabels) {
  SweepConfig c = small_config();
  c.protocols = {Protocol::Aloha};
  const std::vector<double> p{0.2, 0.5};
  const auto rows = sweep_aloha_grid(c, p, p);
  ASSERT_EQ(rows.size(), 4U);
  EXPECT_EQ(rows[1].x, "0.2:0.5");
  EXPECT_EQ(sweep_aloha_grid(c, p, p, true).size(), 2U);
  c.protocols = {Protocol::Tdma};
  EXPECT_THROW(sweep_aloha_grid(c, p, p), ValidationError);
}

TEST(Sweep, ContentionWindowAxis) {
  SweepConfig c = small_config();
  c.protocols = {Protocol::CsmaRtsCts};
  const std::vector<int> w{8, 32};
  const auto rows = sweep_cw_min(c, w);
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[0].x, "8");
  c.protocols = {Protocol::Aloha};
  EXPECT_THROW(sweep_cw_min(c, w), ValidationError);
}

TEST(SweepCsv, RoundTripsThroughReader) {
  std::vector<SweepRow> rows{{"30", Protocol::Aloha, 240, 239.5, 1.25},
                             {"0.2:0.35", Protocol::CsmaBasic, 1.0 / 3.0, 2.0, std::nan("")}};
  std::istringstream in(csv(rows));
  const auto back = read_sweep_csv(in);
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[0], rows[0]);
  EXPECT_EQ(back[1].psi_analytic_slots, 1.0 / 3.0);
  EXPECT_TRUE(std::isnan(back[1].psi_sim_ci95));
  std::istringstream bad("x,protocol\n");
  EXPECT_THROW(read_sweep_csv(bad), ParseError);
  std::istringstream bad_row(std::string(kSweepHeader) + "\n30,aloha,1,2\n");
  EXPECT_THROW(read_sweep_csv(bad_row), ParseError);
}

TEST(Report, KeyValueAndJsonFields) {
  const ChannelTrace t({"A", "B"},
                       {ChannelEvent::success(0, 1, 0), ChannelEvent::success(1, 2, 1),
                        ChannelEvent::success(2, 3, 0), ChannelEvent::success(3, 4, 1),
                        ChannelEvent::success(4, 5, 0)},
                       5);
  std::ostringstream kv;
  write_summary_kv(kv, summarize(t, true));
  const std::string text = kv.str();
  EXPECT_NE(text.find("psi_slots=2\n"), std::string::npos) << text;
  EXPECT_NE(text.find("psi_undefined=0\n"), std::string::npos);
  EXPECT_NE(text.find("user=A\ncycle_samples=1\n"), std::string::npos);
  EXPECT_NE(text.find("refresh_moments=1,3\n"), std::string::npos);
  EXPECT_NE(text.find("intertx_pmf=1:1\n"), std::string::npos);
  const std::string json = summary_to_json(summarize(t), -1);
  EXPECT_NE(json.find("\"psi_slots\":2.0"), std::string::npos) << json;
  EXPECT_NE(json.find("\"cycle_samples\":1"), std::string::npos);
  EXPECT_NE(json.find("\"intertx_pmf\":{\"1\":1.0}"), std::string::npos);
}

TEST(Report, UndefinedPsi) {
  const ChannelTrace t({"A", "B"}, {ChannelEvent::success(0, 1, 0)}, 4);
  std::ostringstream kv;
  write_summary_kv(kv, summarize(t));
  EXPECT_NE(kv.str().find("psi_slots=nan\npsi_undefined=1\n"), std::string::npos);
  EXPECT_NE(summary_to_json(summarize(t), -1).find("\"psi_slots\":null"), std::string::npos);
}
