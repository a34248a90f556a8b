#include "cctlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "cctlab/metrics.hpp"
#include "cctlab/report.hpp"
#include "cctlab/rng.hpp"

namespace cct {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::Aloha: return "aloha";
    case Protocol::CsmaRtsCts: return "csma-rtscts";
    case Protocol::CsmaBasic: return "csma-basic";
    case Protocol::Tdma: return "tdma";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  for (Protocol p : {Protocol::Aloha, Protocol::CsmaRtsCts, Protocol::CsmaBasic, Protocol::Tdma}) {
    if (to_string(p) == text) return p;
  }
  throw ValidationError("unknown protocol '" + std::string(text) + "'");
}

void SweepConfig::validate() const {
  if (protocols.empty()) throw ValidationError("no protocol selected");
  if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
  if (slots < 1) throw ValidationError("slots must be positive");
  if (warmup < 0 || warmup >= slots) throw ValidationError("warm-up must lie inside the horizon");
  csma.validate();
  aloha.validate();
}

std::pair<double, double> mean_ci95(std::span<const double> values) {
  if (values.empty()) return {std::nan(""), std::nan("")};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, std::nan("")};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  const boost::math::students_t dist(n - 1);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean, t * sd / std::sqrt(n)};
}

namespace {

// One evaluated axis point for one protocol.
struct Job {
  std::string x;
  Protocol protocol;
  double analytic;
  std::function<ChannelTrace(std::uint64_t)> simulate;
};

double simulated_psi(const ChannelTrace& trace) {
  return channel_cycle_time(trace).psi.value_or(std::nan(""));
}

std::vector<SweepRow> run_jobs(const SweepConfig& config, const std::vector<Job>& jobs) {
  const std::size_t reps = static_cast<std::size_t>(config.repetitions);
  std::vector<double> psi(jobs.size() * reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < psi.size();) {
      try {
        const std::uint64_t seed = derive_seed(config.seed, k % reps);
        psi[k] = simulated_psi(jobs[k / reps].simulate(seed));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = psi.size();
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(config.jobs, psi.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto [mean, ci] = mean_ci95(std::span(psi).subspan(j * reps, reps));
    rows.push_back({jobs[j].x, jobs[j].protocol, jobs[j].analytic, mean, ci});
  }
  return rows;
}

RunSettings settings_for(const SweepConfig& config, std::uint64_t seed) {
  RunSettings s;
  s.seed = seed;
  s.horizon = config.slots;
  s.warmup = config.warmup;
  return s;
}

Job csma_job(const SweepConfig& config, std::string x, Protocol protocol, const CsmaParams& params) {
  const CsmaMode mode = protocol == Protocol::CsmaRtsCts ? CsmaMode::RtsCts : CsmaMode::Basic;
  return {std::move(x), protocol, csma_cct(params, mode, config.stats).psi_slots,
          [config, params, mode](std::uint64_t seed) {
            return simulate_csma(settings_for(config, seed), params, mode).trace;
          }};
}

}  // namespace

std::vector<SweepRow> sweep_packet_length(const SweepConfig& config,
                                          std::span<const Tick> lengths) {
  config.validate();
  std::vector<Job> jobs;
  for (Tick len : lengths) {
    if (len < 1) throw ValidationError("packet lengths must be positive");
    const std::string x = std::to_string(len);
    for (Protocol protocol : config.protocols) {
      switch (protocol) {
        case Protocol::Aloha: {
          const AlohaParams params{config.aloha.p_a, config.aloha.p_b, len};
          jobs.push_back({x, protocol, aloha_cct(params).psi_slots,
                          [config, params](std::uint64_t seed) {
                            return simulate_aloha(settings_for(config, seed), params);
                          }});
          break;
        }
        case Protocol::CsmaRtsCts:
        case Protocol::CsmaBasic: {
          CsmaParams params = config.csma;
          params.l_pkt = len;
          jobs.push_back(csma_job(config, x, protocol, params));
          break;
        }
        case Protocol::Tdma: {
          const std::array<Tick, 2> packets{len, len};
          jobs.push_back({x, protocol, tdma_cct(packets).psi_slots,
                          [config, packets](std::uint64_t seed) {
                            return simulate_tdma(settings_for(config, seed), packets);
                          }});
          break;
        }
      }
    }
  }
  return run_jobs(config, jobs);
}

std::vector<SweepRow> sweep_aloha_grid(const SweepConfig& config, std::span<const double> p_a,
                                       std::span<const double> p_b, bool symmetric_only) {
  config.validate();
  for (Protocol protocol : config.protocols) {
    if (protocol != Protocol::Aloha) {
      throw ValidationError("the probability axis applies to aloha only");
    }
  }
  std::vector<Job> jobs;
  for (double a : p_a) {
    for (double b : p_b) {
      if (symmetric_only && a != b) continue;
      const AlohaParams params{a, b, config.aloha.slot};
      params.validate();
      jobs.push_back({format_double(a) + ':' + format_double(b), Protocol::Aloha,
                      aloha_cct(params).psi_slots, [config, params](std::uint64_t seed) {
                        return simulate_aloha(settings_for(config, seed), params);
                      }});
    }
  }
  return run_jobs(config, jobs);
}

std::vector<SweepRow> sweep_cw_min(const SweepConfig& config, std::span<const int> cw_mins) {
  config.validate();
  for (Protocol protocol : config.protocols) {
    if (protocol != Protocol::CsmaRtsCts && protocol != Protocol::CsmaBasic) {
      throw ValidationError("the contention window axis applies to csma only");
    }
  }
  std::vector<Job> jobs;
  for (int w : cw_mins) {
    CsmaParams params = config.csma;
    params.cw_min = w;
    params.validate();
    for (Protocol protocol : config.protocols) {
      jobs.push_back(csma_job(config, std::to_string(w), protocol, params));
    }
  }
  return run_jobs(config, jobs);
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  for (std::size_t pos; (pos = text.find(sep)) != std::string_view::npos;) {
    out.push_back(text.substr(0, pos));
    text.remove_prefix(pos + 1);
  }
  out.push_back(text);
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    if (text == "nan") {
      out = std::nan("");
      return true;
    }
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

template <typename T>
std::vector<T> parse_range(std::string_view text) {
  const auto bad = [&] { return ValidationError("bad range '" + std::string(text) + "'"); };
  std::vector<T> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    T lo{}, hi{}, step{};
    if (parts.size() != 3 || !parse_number(parts[0], lo) || !parse_number(parts[1], hi) ||
        !parse_number(parts[2], step) || !(step > 0) || hi < lo) {
      throw bad();
    }
    for (std::int64_t i = 0;; ++i) {
      T v = lo + static_cast<T>(i) * step;
      if constexpr (std::is_floating_point_v<T>) {
        if (v > hi + step * 1e-9) break;
        v = std::round(v * 1e12) / 1e12;  // 0.2 + 0.15 * 1 prints as 0.35
      } else {
        if (v > hi) break;
      }
      out.push_back(v);
    }
  } else {
    for (std::string_view part : split(text, ',')) {
      T v{};
      if (!parse_number(part, v)) throw bad();
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

std::vector<double> parse_real_range(std::string_view text) { return parse_range<double>(text); }
std::vector<std::int64_t> parse_int_range(std::string_view text) {
  return parse_range<std::int64_t>(text);
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.x << ',' << to_string(r.protocol) << ',' << format_double(r.psi_analytic_slots) << ','
        << format_double(r.psi_sim_mean_slots) << ',' << format_double(r.psi_sim_ci95) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  std::size_t n = 1;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw ParseError(1, "expected header '" + std::string(kSweepHeader) + "'");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw ParseError(n, "expected 5 fields");
    SweepRow r;
    r.x = std::string(f[0]);
    try {
      r.protocol = parse_protocol(f[1]);
    } catch (const ValidationError& e) {
      throw ParseError(n, e.what());
    }
    if (!parse_number(f[2], r.psi_analytic_slots) || !parse_number(f[3], r.psi_sim_mean_slots) ||
        !parse_number(f[4], r.psi_sim_ci95)) {
      throw ParseError(n, "malformed number");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cct
