#include "cctlab/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

namespace cct {

namespace {

// The successes of a trace in order. `floor[p]` is the smallest, over users
// other than the one at p, of the position of that user's latest success
// before p; -1 when some other user has not succeeded yet.
struct SuccessSequence {
  std::vector<std::size_t> user;
  std::vector<Tick> end;
  std::vector<std::int64_t> floor;

  std::size_t size() const noexcept { return user.size(); }
  bool is_refresh(std::size_t p) const noexcept {
    return p + 1 < user.size() && user[p + 1] != user[p];
  }
};

SuccessSequence build_sequence(const ChannelTrace& trace, bool with_floor) {
  SuccessSequence seq;
  for (const ChannelEvent& e : trace.events()) {
    if (e.kind != EventKind::Success) continue;
    seq.user.push_back(e.sole_user());
    seq.end.push_back(e.end);
  }
  if (!with_floor) return seq;

  const std::size_t n = trace.user_count();
  std::vector<std::int64_t> last(n, -1);
  seq.floor.resize(seq.size());
  for (std::size_t p = 0; p < seq.size(); ++p) {
    const std::size_t u = seq.user[p];
    std::int64_t lowest = n > 1 ? std::numeric_limits<std::int64_t>::max() : -1;
    for (std::size_t other = 0; other < n; ++other) {
      if (other != u) lowest = std::min(lowest, last[other]);
    }
    seq.floor[p] = lowest;
    last[u] = static_cast<std::int64_t>(p);
  }
  return seq;
}

std::vector<std::size_t> refresh_positions(const SuccessSequence& seq, std::size_t u) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < seq.size(); ++p) {
    if (seq.user[p] == u && seq.is_refresh(p)) out.push_back(p);
  }
  return out;
}

// Pairs of success positions (t0 event, t1 event) forming cycles of user u.
std::vector<std::pair<std::size_t, std::size_t>> cycle_positions(const SuccessSequence& seq,
                                                                 std::size_t u) {
  const std::vector<std::size_t> r = refresh_positions(seq, u);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t j = 1; j < r.size(); ++j) {
    const auto pos = [&](std::size_t i) { return static_cast<std::int64_t>(r[i]); };
    const std::int64_t reach = seq.floor[r[j]];  // need pos(i) < reach: all others between
    if (j >= 2) {
      // Some other user silent between t0 and the refresh moment before t1.
      const std::int64_t silent_after = seq.floor[r[j - 1]];
      auto first = std::upper_bound(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(j - 1),
                                    silent_after, [](std::int64_t v, std::size_t p) {
                                      return v < static_cast<std::int64_t>(p);
                                    });
      for (auto it = first; it != r.begin() + static_cast<std::ptrdiff_t>(j - 1); ++it) {
        if (static_cast<std::int64_t>(*it) >= reach) break;
        out.emplace_back(*it, r[j]);
      }
    }
    if (pos(j - 1) < reach) out.emplace_back(r[j - 1], r[j]);
  }
  return out;
}

}  // namespace

double InterTxReport::p_zero() const {
  auto it = pooled_pmf.find(0);
  return it == pooled_pmf.end() ? 0.0 : it->second;
}

std::vector<Tick> refresh_moments(const ChannelTrace& trace, std::string_view user) {
  const std::size_t u = trace.user_index(user);
  const SuccessSequence seq = build_sequence(trace, false);
  std::vector<Tick> out;
  for (std::size_t p : refresh_positions(seq, u)) out.push_back(seq.end[p]);
  return out;
}

std::vector<CycleInterval> cycle_intervals(const ChannelTrace& trace, std::string_view user) {
  const std::size_t u = trace.user_index(user);
  const SuccessSequence seq = build_sequence(trace, true);
  std::vector<CycleInterval> out;
  for (auto [a, b] : cycle_positions(seq, u)) out.push_back({seq.end[a], seq.end[b]});
  return out;
}

std::vector<Tick> cycle_times(const ChannelTrace& trace, std::string_view user) {
  std::vector<Tick> out;
  for (const CycleInterval& c : cycle_intervals(trace, user)) out.push_back(c.length());
  return out;
}

CycleTimeReport channel_cycle_time(const ChannelTrace& trace) {
  if (trace.user_count() < 2) {
    throw TooFewUsersError("the channel cycle time needs at least two users");
  }
  const SuccessSequence seq = build_sequence(trace, true);
  CycleTimeReport report;
  double total = 0.0;
  for (std::size_t u = 0; u < trace.user_count(); ++u) {
    UserCycles cycles{trace.users()[u], {}, std::nullopt};
    for (auto [a, b] : cycle_positions(seq, u)) cycles.samples.push_back(seq.end[b] - seq.end[a]);
    if (cycles.samples.empty()) {
      report.users_without_samples.push_back(cycles.user);
    } else {
      const double sum = std::accumulate(cycles.samples.begin(), cycles.samples.end(), 0.0);
      cycles.mean = sum / static_cast<double>(cycles.samples.size());
      total += *cycles.mean;
    }
    report.per_user.push_back(std::move(cycles));
  }
  if (report.users_without_samples.empty()) {
    report.psi = total / static_cast<double>(trace.user_count());
  }
  return report;
}

std::vector<std::int64_t> inter_transmissions(const ChannelTrace& trace, std::string_view user) {
  const std::size_t u = trace.user_index(user);
  const SuccessSequence seq = build_sequence(trace, false);
  std::vector<std::int64_t> out;
  std::optional<std::size_t> prev;
  for (std::size_t p = 0; p < seq.size(); ++p) {
    if (seq.user[p] != u) continue;
    if (prev) out.push_back(static_cast<std::int64_t>(p - *prev - 1));
    prev = p;
  }
  return out;
}

InterTxReport inter_transmission_report(const ChannelTrace& trace) {
  InterTxReport report;
  std::map<std::int64_t, std::size_t> histogram;
  for (const std::string& user : trace.users()) {
    auto counts = inter_transmissions(trace, user);
    for (std::int64_t k : counts) ++histogram[k];
    report.sample_count += counts.size();
    report.per_user_counts.emplace_back(user, std::move(counts));
  }
  if (report.sample_count == 0) return report;
  const double total = static_cast<double>(report.sample_count);
  for (auto [k, count] : histogram) {
    const double p = static_cast<double>(count) / total;
    report.pooled_pmf[k] = p;
    report.mean += static_cast<double>(k) * p;
  }
  return report;
}

std::vector<PartDecomposition> part_decomposition(const ChannelTrace& trace,
                                                  std::string_view user) {
  if (trace.user_count() < 2) throw TooFewUsersError("part decomposition needs two users");
  if (trace.user_count() > 2) throw DomainError("part decomposition is defined for two users only");
  const std::size_t u = trace.user_index(user);
  const SuccessSequence seq = build_sequence(trace, true);
  std::vector<PartDecomposition> out;
  for (auto [a, b] : cycle_positions(seq, u)) {
    std::size_t first_own = a + 1;
    while (seq.user[first_own] != u) ++first_own;
    PartDecomposition part;
    part.cycle_start = seq.end[a];
    part.cycle_end = seq.end[b];
    part.n_b = static_cast<std::int64_t>(first_own - a - 1);
    part.n_a_prime = static_cast<std::int64_t>(b - first_own);
    part.t_part1 = seq.end[first_own] - seq.end[a];
    part.t_part2 = seq.end[b] - seq.end[first_own];
    out.push_back(part);
  }
  return out;
}

double throughput(const ChannelTrace& trace) {
  if (trace.horizon() <= 0) return 0.0;
  Tick busy = 0;
  for (const ChannelEvent& e : trace.events()) {
    if (e.kind == EventKind::Success) busy += e.duration();
  }
  return static_cast<double>(busy) / static_cast<double>(trace.horizon());
}

}  // namespace cct
