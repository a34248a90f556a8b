// cctlab: simulate MAC protocols, analyze channel traces, evaluate the closed
// forms and sweep parameters.
//
// Exit status: 0 on success, 1 on validation or domain errors, 2 on usage
// errors.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cctlab/analytic.hpp"
#include "cctlab/audit.hpp"
#include "cctlab/core.hpp"
#include "cctlab/report.hpp"
#include "cctlab/sim.hpp"
#include "cctlab/sweep.hpp"
#include "cctlab/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Durations are slots unless suffixed with "us".
cct::Tick parse_duration(const std::string& text, const cct::SlotClock& clock,
                         const std::string& flag) {
  std::string digits = text;
  const bool micros = digits.size() > 2 && digits.compare(digits.size() - 2, 2, "us") == 0;
  if (micros) digits.resize(digits.size() - 2);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw cct::ValidationError(flag + ": expected slots or <n>us, got '" + text + "'");
  }
  if (!micros) return value;
  try {
    return clock.to_slots(value);
  } catch (const cct::Error& e) {
    throw cct::ValidationError(flag + ": " + e.what());
  }
}

fs::path output_path(const std::string& path) {
  fs::path p(path);
  if (const char* dir = std::getenv("CCTLAB_OUTPUT_DIR"); dir && *dir && p.is_relative()) {
    fs::create_directories(dir);
    return fs::path(dir) / p;
  }
  return p;
}

struct CsmaFlags {
  int cw_min = 32;
  int beta = 5;
  std::string difs = "4", pkt = "30", ack = "1", rts = "1", cts = "1";

  void add(CLI::App& app) {
    app.add_option("--cw-min", cw_min, "minimum contention window")->capture_default_str();
    app.add_option("--beta", beta, "maximum backoff stage")->capture_default_str();
    app.add_option("--difs", difs, "DIFS duration")->capture_default_str();
    app.add_option("--pkt", pkt, "packet duration")->capture_default_str();
    app.add_option("--ack", ack, "ACK duration")->capture_default_str();
    app.add_option("--rts", rts, "RTS duration")->capture_default_str();
    app.add_option("--cts", cts, "CTS duration")->capture_default_str();
  }

  cct::CsmaParams params(const cct::SlotClock& clock) const {
    cct::CsmaParams p;
    p.cw_min = cw_min;
    p.beta = beta;
    p.l_difs = parse_duration(difs, clock, "--difs");
    p.l_pkt = parse_duration(pkt, clock, "--pkt");
    p.l_ack = parse_duration(ack, clock, "--ack");
    p.l_rts = parse_duration(rts, clock, "--rts");
    p.l_cts = parse_duration(cts, clock, "--cts");
    p.validate();
    return p;
  }
};

struct Common {
  std::int64_t micros_per_slot = 20;
  cct::SlotClock clock() const { return cct::SlotClock(micros_per_slot); }
};

void print_line(const std::string& key, double slots, const cct::SlotClock& clock) {
  std::cout << key << "_slots=" << cct::format_double(slots) << '\n'
            << key << "_us=" << cct::format_double(clock.to_micros(slots)) << '\n';
}

// --- simulate ----------------------------------------------------------------

struct SimulateCmd {
  std::string protocol;
  double pa = 0.5, pb = 0.5;
  std::string slot = "1";
  std::string slots;
  std::string warmup = std::to_string(cct::kDefaultWarmup);
  std::uint64_t seed = 1;
  std::string out, audit;
  bool json = false;
  CsmaFlags csma;

  void add(CLI::App& app) {
    app.add_option("--protocol", protocol, "aloha, csma-rtscts, csma-basic or tdma")
        ->required()
        ->check(CLI::IsMember({"aloha", "csma-rtscts", "csma-basic", "tdma"}));
    app.add_option("--slots", slots, "horizon")->required();
    app.add_option("--seed", seed)->capture_default_str();
    app.add_option("--warmup", warmup, "events starting earlier are dropped")
        ->capture_default_str();
    app.add_option("--pa", pa, "aloha transmit probability of A")->capture_default_str();
    app.add_option("--pb", pb, "aloha transmit probability of B")->capture_default_str();
    app.add_option("--slot", slot, "aloha slot length")->capture_default_str();
    app.add_option("--out", out, "trace file to write");
    app.add_option("--audit", audit, "contention log to write (csma only)");
    app.add_flag("--json", json, "print the summary as JSON");
    csma.add(app);
  }

  int run(const Common& common) const {
    const cct::SlotClock clock = common.clock();
    cct::RunSettings settings;
    settings.seed = seed;
    settings.horizon = parse_duration(slots, clock, "--slots");
    settings.warmup = parse_duration(warmup, clock, "--warmup");
    const cct::Protocol p = cct::parse_protocol(protocol);
    if (!audit.empty() && p != cct::Protocol::CsmaRtsCts && p != cct::Protocol::CsmaBasic) {
      throw cct::ValidationError("--audit applies to csma protocols only");
    }

    cct::ChannelTrace trace;
    std::vector<cct::ContentionRecord> log;
    switch (p) {
      case cct::Protocol::Aloha:
        trace = cct::simulate_aloha(settings, cct::AlohaParams{pa, pb, parse_duration(slot, clock, "--slot")});
        break;
      case cct::Protocol::CsmaRtsCts:
      case cct::Protocol::CsmaBasic: {
        const auto mode = p == cct::Protocol::CsmaRtsCts ? cct::CsmaMode::RtsCts : cct::CsmaMode::Basic;
        auto run = cct::simulate_csma(settings, csma.params(clock), mode, !audit.empty());
        trace = std::move(run.trace);
        log = std::move(run.audit);
        break;
      }
      case cct::Protocol::Tdma: {
        const cct::Tick len = parse_duration(csma.pkt, clock, "--pkt");
        const std::vector<cct::Tick> lengths(settings.users.size(), len);
        trace = cct::simulate_tdma(settings, lengths);
        break;
      }
    }
    if (!out.empty()) cct::save_trace(output_path(out), trace);
    if (!audit.empty()) cct::save_audit(output_path(audit), log, settings.users);

    const cct::TraceSummary summary = cct::summarize(trace);
    if (json) {
      std::cout << cct::summary_to_json(summary) << '\n';
    } else {
      cct::write_summary_kv(std::cout, summary);
      std::cout << "psi_us="
                << cct::format_double(clock.to_micros(summary.cycles.psi.value_or(std::nan(""))))
                << '\n';
    }
    return 0;
  }
};

// --- analyze -----------------------------------------------------------------

struct AnalyzeCmd {
  std::string trace_path;
  bool json = false;
  bool details = false;

  void add(CLI::App& app) {
    app.add_option("trace", trace_path, "trace file")->required();
    app.add_flag("--json", json, "print JSON instead of key=value lines");
    app.add_flag("--details", details, "include refresh moments and cycle intervals");
  }

  int run(const Common&) const {
    const cct::TraceFile file = cct::load_trace(trace_path);
    const cct::TraceSummary summary = cct::summarize(file.trace, details);
    if (json) {
      std::cout << cct::summary_to_json(summary) << '\n';
    } else {
      cct::write_summary_kv(std::cout, summary);
    }
    return 0;
  }
};

// --- analytic ----------------------------------------------------------------

struct AnalyticCmd {
  double pa = 0.5, pb = 0.5;
  std::string slot = "1";
  std::string mode = "rtscts";
  double p_ni0 = 0.32, e_ni = 1.0;
  std::optional<double> p_c;
  std::string lengths;
  CsmaFlags csma;

  CLI::App* aloha = nullptr;
  CLI::App* csma_cmd = nullptr;
  CLI::App* optimum = nullptr;
  CLI::App* fixed_point = nullptr;
  CLI::App* inflection = nullptr;
  CLI::App* cw_opt = nullptr;
  CLI::App* tdma = nullptr;

  void add(CLI::App& app) {
    app.require_subcommand(1);
    aloha = app.add_subcommand("aloha", "two-user slotted Aloha");
    aloha->add_option("--pa", pa)->capture_default_str();
    aloha->add_option("--pb", pb)->capture_default_str();
    aloha->add_option("--slot", slot)->capture_default_str();

    csma_cmd = app.add_subcommand("csma", "two-user saturated CSMA/CA");
    csma_cmd->add_option("--mode", mode)->check(CLI::IsMember({"rtscts", "basic"}))->capture_default_str();
    csma_cmd->add_option("--p-ni0", p_ni0, "P(N_I = 0)")->capture_default_str();
    csma_cmd->add_option("--e-ni", e_ni, "E(N_I)")->capture_default_str();
    csma_cmd->add_option("--p-c", p_c, "collision probability (default: solved)");
    csma.add(*csma_cmd);

    optimum = app.add_subcommand("optimum", "Aloha probabilities minimising the cycle time");
    optimum->add_option("--slot", slot)->capture_default_str();

    fixed_point = app.add_subcommand("fixed-point", "collision probability");
    fixed_point->add_option("--cw-min", csma.cw_min)->capture_default_str();
    fixed_point->add_option("--beta", csma.beta)->capture_default_str();

    inflection = app.add_subcommand("inflection", "RTS/CTS versus basic crossover");
    csma.add(*inflection);

    cw_opt = app.add_subcommand("cw-opt", "best fixed contention window");
    cw_opt->add_option("--p-ni0", p_ni0)->capture_default_str();
    csma.add(*cw_opt);

    tdma = app.add_subcommand("tdma", "round-robin TDMA");
    tdma->add_option("--lengths", lengths, "comma separated packet lengths")->required();
  }

  int run(const Common& common) const {
    const cct::SlotClock clock = common.clock();
    if (aloha->parsed()) {
      const cct::AlohaParams params{pa, pb, parse_duration(slot, clock, "--slot")};
      const cct::AnalyticCct r = cct::aloha_cct(params);
      print_line("psi", r.psi_slots, clock);
      print_line("mean_success_time", cct::aloha_mean_success_time(params), clock);
    } else if (csma_cmd->parsed()) {
      const cct::CsmaParams params = csma.params(clock);
      const cct::CsmaMode m = mode == "rtscts" ? cct::CsmaMode::RtsCts : cct::CsmaMode::Basic;
      const cct::InterTxStats stats{p_ni0, e_ni};
      const cct::AnalyticCct r =
          p_c ? cct::csma_cct_at(params, m, *p_c, stats) : cct::csma_cct(params, m, stats);
      std::cout << "mode=" << cct::to_string(m) << '\n';
      print_line("psi", r.psi_slots, clock);
      std::cout << "p_c=" << cct::format_double(r.components.p_c) << '\n';
      print_line("mu", r.components.mu, clock);
      print_line("part1", r.components.part1_mean, clock);
      print_line("part2", r.components.part2_mean, clock);
      std::cout << "p_ni0=" << cct::format_double(r.components.p_ni0) << '\n'
                << "e_ni=" << cct::format_double(r.components.e_ni) << '\n';
    } else if (optimum->parsed()) {
      const cct::AlohaOptimum o = cct::aloha_optimum(parse_duration(slot, clock, "--slot"));
      std::cout << "pa=" << cct::format_double(o.p_a) << '\n'
                << "pb=" << cct::format_double(o.p_b) << '\n';
      print_line("psi", o.psi_slots, clock);
      std::cout << "offered_load=" << cct::format_double(o.offered_load) << '\n';
    } else if (fixed_point->parsed()) {
      const cct::CollisionFixedPoint fp = cct::solve_collision_probability(csma.cw_min, csma.beta);
      std::cout << "p_c=" << cct::format_double(fp.p_c) << '\n'
                << "tau=" << cct::format_double(fp.tau()) << '\n'
                << "residual=" << cct::format_double(fp.residual) << '\n'
                << "iterations=" << fp.iterations << '\n';
    } else if (inflection->parsed()) {
      const cct::CsmaParams params = csma.params(clock);
      const double pc = cct::solve_collision_probability(params.cw_min, params.beta).p_c;
      const double tran = cct::rtscts_basic_inflection(pc, static_cast<double>(params.l_rcts()));
      std::cout << "p_c=" << cct::format_double(pc) << '\n';
      print_line("tran", tran, clock);
      print_line("pkt", tran - static_cast<double>(params.l_ack), clock);
    } else if (cw_opt->parsed()) {
      const cct::CsmaParams params = csma.params(clock);
      std::cout << "cw_min_continuous="
                << cct::format_double(cct::cw_min_optimal(params.l_difs, params.l_rcts())) << '\n'
                << "cw_min_integer=" << cct::cw_min_integer_optimum(params) << '\n';
      cct::CsmaParams best = params;
      best.cw_min = cct::cw_min_integer_optimum(params);
      print_line("psi", cct::csma_cct_fixed_window(best, p_ni0), clock);
    } else if (tdma->parsed()) {
      std::vector<cct::Tick> packets;
      std::stringstream ss(lengths);
      for (std::string item; std::getline(ss, item, ',');) {
        packets.push_back(parse_duration(item, clock, "--lengths"));
      }
      const cct::AnalyticCct r = cct::tdma_cct(packets);
      print_line("psi", r.psi_slots, clock);
      std::cout << "single_user=" << (r.single_user ? 1 : 0) << '\n';
    }
    return 0;
  }
};

// --- sweep -------------------------------------------------------------------

struct SweepCmd {
  std::string pkt_range, p_range, pb_range, cw_range;
  bool symmetric = false;
  std::vector<std::string> protocols;
  int reps = 10;
  std::uint64_t seed = 1;
  std::string slots = "1000000";
  std::string warmup = std::to_string(cct::kDefaultWarmup);
  unsigned jobs = 1;
  double pa = 0.5, pb = 0.5;
  double p_ni0 = 0.32, e_ni = 1.0;
  std::string out;
  CsmaFlags csma;

  void add(CLI::App& app) {
    auto* pkt = app.add_option("--pkt-range", pkt_range, "packet lengths, lo:hi:step or a list");
    auto* p = app.add_option("--p-range", p_range, "aloha probabilities for A (and B)");
    auto* cw = app.add_option("--cw-range", cw_range, "minimum contention windows");
    pkt->excludes(p)->excludes(cw);
    p->excludes(cw);
    app.add_option("--pb-range", pb_range, "aloha probabilities for B")->needs(p);
    app.add_flag("--symmetric", symmetric, "only grid points with pa == pb")->needs(p);
    app.add_option("--protocols", protocols, "protocols to include")
        ->delimiter(',')
        ->check(CLI::IsMember({"aloha", "csma-rtscts", "csma-basic", "tdma"}));
    app.add_option("--reps", reps, "seed replications per point")->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
    app.add_option("--slots", slots, "horizon per replication")->capture_default_str();
    app.add_option("--warmup", warmup)->capture_default_str();
    app.add_option("--jobs", jobs, "worker threads")->capture_default_str();
    app.add_option("--pa", pa)->capture_default_str();
    app.add_option("--pb", pb)->capture_default_str();
    app.add_option("--p-ni0", p_ni0)->capture_default_str();
    app.add_option("--e-ni", e_ni)->capture_default_str();
    app.add_option("--out", out, "CSV file (default: standard output)");
    csma.add(app);
  }

  int run(const Common& common) const {
    if (pkt_range.empty() && p_range.empty() && cw_range.empty()) {
      throw CLI::RequiredError("one of --pkt-range, --p-range, --cw-range");
    }
    const cct::SlotClock clock = common.clock();
    cct::SweepConfig config;
    config.seed = seed;
    config.repetitions = reps;
    config.slots = parse_duration(slots, clock, "--slots");
    config.warmup = parse_duration(warmup, clock, "--warmup");
    config.jobs = jobs;
    config.csma = csma.params(clock);
    config.aloha = cct::AlohaParams{pa, pb, 1};
    config.stats = cct::InterTxStats{p_ni0, e_ni};
    for (const auto& name : protocols) config.protocols.push_back(cct::parse_protocol(name));

    std::vector<cct::SweepRow> rows;
    if (!pkt_range.empty()) {
      if (config.protocols.empty()) {
        config.protocols = {cct::Protocol::Aloha, cct::Protocol::CsmaRtsCts,
                            cct::Protocol::CsmaBasic, cct::Protocol::Tdma};
      }
      std::vector<cct::Tick> lengths;
      for (const std::string& item : split_list(pkt_range)) {
        for (cct::Tick v : expand(item, clock)) lengths.push_back(v);
      }
      rows = cct::sweep_packet_length(config, lengths);
    } else if (!p_range.empty()) {
      if (config.protocols.empty()) config.protocols = {cct::Protocol::Aloha};
      const auto a = cct::parse_real_range(p_range);
      const auto b = pb_range.empty() ? a : cct::parse_real_range(pb_range);
      rows = cct::sweep_aloha_grid(config, a, b, symmetric);
    } else {
      if (config.protocols.empty()) config.protocols = {cct::Protocol::CsmaRtsCts};
      std::vector<int> windows;
      for (std::int64_t w : cct::parse_int_range(cw_range)) windows.push_back(static_cast<int>(w));
      rows = cct::sweep_cw_min(config, windows);
    }

    if (out.empty()) {
      cct::write_sweep_csv(std::cout, rows);
    } else {
      std::ofstream file(output_path(out), std::ios::binary);
      if (!file) throw cct::Error("cannot open '" + out + "' for writing");
      cct::write_sweep_csv(file, rows);
    }
    return 0;
  }

  static std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) items.push_back(item);
    return items;
  }

  // "lo:hi:step" with each part in slots or <n>us.
  static std::vector<cct::Tick> expand(const std::string& item, const cct::SlotClock& clock) {
    std::vector<std::string> parts;
    std::stringstream ss(item);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() == 1) return {parse_duration(parts[0], clock, "--pkt-range")};
    if (parts.size() != 3) throw cct::ValidationError("--pkt-range: bad range '" + item + "'");
    const cct::Tick lo = parse_duration(parts[0], clock, "--pkt-range");
    const cct::Tick hi = parse_duration(parts[1], clock, "--pkt-range");
    const cct::Tick step = parse_duration(parts[2], clock, "--pkt-range");
    if (step < 1 || hi < lo) throw cct::ValidationError("--pkt-range: bad range '" + item + "'");
    std::vector<cct::Tick> out;
    for (cct::Tick v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Short-term fairness of MAC protocols measured by the channel cycle time"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--micros-per-slot", common.micros_per_slot, "slot length in microseconds")
      ->capture_default_str();

  SimulateCmd simulate;
  AnalyzeCmd analyze;
  AnalyticCmd analytic;
  SweepCmd sweep;
  CLI::App* simulate_app = app.add_subcommand("simulate", "simulate a protocol and summarize the trace");
  CLI::App* analyze_app = app.add_subcommand("analyze", "measure a trace file");
  CLI::App* analytic_app = app.add_subcommand("analytic", "evaluate the closed forms");
  CLI::App* sweep_app = app.add_subcommand("sweep", "sweep one parameter and emit CSV");
  simulate.add(*simulate_app);
  analyze.add(*analyze_app);
  analytic.add(*analytic_app);
  sweep.add(*sweep_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate_app->parsed()) return simulate.run(common);
    if (analyze_app->parsed()) return analyze.run(common);
    if (analytic_app->parsed()) return analytic.run(common);
    if (sweep_app->parsed()) return sweep.run(common);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << sweep_app->help();
    return kExitUsage;
  } catch (const cct::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
