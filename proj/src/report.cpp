#include "cctlab/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace cct {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

TraceSummary summarize(const ChannelTrace& trace, bool details) {
  TraceSummary s;
  s.cycles = channel_cycle_time(trace);
  s.intertx = inter_transmission_report(trace);
  s.throughput = throughput(trace);
  s.horizon = trace.horizon();
  s.event_count = trace.events().size();
  if (details) {
    for (const auto& u : trace.users()) {
      s.refresh.emplace_back(u, refresh_moments(trace, u));
      s.intervals.emplace_back(u, cycle_intervals(trace, u));
    }
  }
  return s;
}

namespace {

template <typename Seq, typename F>
std::string join(const Seq& seq, F&& render) {
  std::string out;
  for (const auto& x : seq) {
    if (!out.empty()) out += ',';
    out += render(x);
  }
  return out;
}

std::string pmf_text(const std::map<std::int64_t, double>& pmf) {
  return join(pmf, [](const auto& kv) {
    return std::to_string(kv.first) + ':' + format_double(kv.second);
  });
}

}  // namespace

void write_summary_kv(std::ostream& out, const TraceSummary& s) {
  out << "psi_slots=" << format_double(s.cycles.psi.value_or(std::nan(""))) << '\n';
  out << "psi_undefined=" << (s.cycles.psi_undefined() ? 1 : 0) << '\n';
  if (!s.cycles.users_without_samples.empty()) {
    out << "users_without_samples="
        << join(s.cycles.users_without_samples, [](const std::string& u) { return u; }) << '\n';
  }
  for (std::size_t i = 0; i < s.cycles.per_user.size(); ++i) {
    const UserCycles& u = s.cycles.per_user[i];
    out << "user=" << u.user << '\n';
    out << "cycle_samples=" << u.samples.size() << '\n';
    out << "cycle_mean_slots=" << format_double(u.mean.value_or(std::nan(""))) << '\n';
    if (i < s.refresh.size()) {
      out << "refresh_moments="
          << join(s.refresh[i].second, [](Tick t) { return std::to_string(t); }) << '\n';
      out << "cycle_intervals=" << join(s.intervals[i].second, [](const CycleInterval& c) {
        return std::to_string(c.from) + '-' + std::to_string(c.to);
      }) << '\n';
    }
  }
  out << "intertx_samples=" << s.intertx.sample_count << '\n';
  out << "intertx_pmf=" << pmf_text(s.intertx.pooled_pmf) << '\n';
  out << "intertx_mean=" << format_double(s.intertx.mean) << '\n';
  out << "throughput=" << format_double(s.throughput) << '\n';
  out << "horizon=" << s.horizon << '\n';
  out << "events=" << s.event_count << '\n';
}

std::string summary_to_json(const TraceSummary& s, int indent) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["psi_slots"] = s.cycles.psi ? ordered_json(*s.cycles.psi) : ordered_json(nullptr);
  doc["psi_undefined"] = s.cycles.psi_undefined();
  doc["users_without_samples"] = s.cycles.users_without_samples;
  ordered_json users = ordered_json::array();
  for (std::size_t i = 0; i < s.cycles.per_user.size(); ++i) {
    const UserCycles& u = s.cycles.per_user[i];
    ordered_json entry;
    entry["user"] = u.user;
    entry["cycle_samples"] = u.samples.size();
    entry["cycle_mean_slots"] = u.mean ? ordered_json(*u.mean) : ordered_json(nullptr);
    if (i < s.refresh.size()) {
      entry["refresh_moments"] = s.refresh[i].second;
      ordered_json cycles = ordered_json::array();
      for (const CycleInterval& c : s.intervals[i].second) cycles.push_back({c.from, c.to});
      entry["cycle_intervals"] = cycles;
    }
    users.push_back(entry);
  }
  doc["users"] = users;
  ordered_json pmf = ordered_json::object();
  for (const auto& [k, p] : s.intertx.pooled_pmf) pmf[std::to_string(k)] = p;
  doc["intertx_samples"] = s.intertx.sample_count;
  doc["intertx_pmf"] = pmf;
  doc["intertx_mean"] = s.intertx.mean;
  doc["throughput"] = s.throughput;
  doc["horizon"] = s.horizon;
  doc["events"] = s.event_count;
  return doc.dump(indent);
}

}  // namespace cct
