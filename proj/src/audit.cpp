#include "cctlab/audit.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace cct {

namespace {

std::int64_t field_int(std::string_view text, std::size_t line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

void write_audit(std::ostream& out, std::span<const ContentionRecord> records,
                 std::span<const std::string> users) {
  if (users.size() != 2) throw ValidationError("audit logs describe two users");
  out << "#t,outcome,stage_a,stage_b,lambda_a,lambda_b\n";
  for (const ContentionRecord& r : records) {
    out << r.t << ',' << (r.winner ? users[*r.winner] : std::string("collision")) << ','
        << r.stage[0] << ',' << r.stage[1] << ',' << r.counter[0] << ',' << r.counter[1] << '\n';
  }
}

void save_audit(const std::filesystem::path& path, std::span<const ContentionRecord> records,
                std::span<const std::string> users) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_audit(out, records, users);
}

std::vector<ContentionRecord> read_audit(std::istream& in, std::span<const std::string> users) {
  if (users.size() != 2) throw ValidationError("audit logs describe two users");
  std::vector<ContentionRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty() || text.front() == '#') continue;
    std::vector<std::string_view> f;
    std::string_view rest(text);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    f.push_back(rest);
    if (f.size() != 6) throw ParseError(line, "expected 6 fields");
    ContentionRecord r;
    r.t = field_int(f[0], line);
    if (f[1] == users[0]) {
      r.winner = 0;
    } else if (f[1] == users[1]) {
      r.winner = 1;
    } else if (f[1] != "collision") {
      throw ParseError(line, "unknown outcome '" + std::string(f[1]) + "'");
    }
    r.stage = {static_cast<int>(field_int(f[2], line)), static_cast<int>(field_int(f[3], line))};
    r.counter = {field_int(f[4], line), field_int(f[5], line)};
    out.push_back(r);
  }
  return out;
}

std::vector<CycleAccount> account_cycles(std::span<const ContentionRecord> records,
                                         const CsmaParams& params, CsmaMode mode,
                                         std::size_t user) {
  params.validate();
  if (user > 1) throw UnknownUserError("audit logs describe users 0 and 1");
  const std::size_t n = records.size();

  // fresh[r]: the user's counter in round r is a new draw.
  std::vector<bool> fresh(n);
  for (std::size_t r = 0; r < n; ++r) {
    fresh[r] = r == 0 || !records[r - 1].winner || *records[r - 1].winner == user;
  }
  std::vector<std::size_t> wins;  // rounds that ended in a success
  for (std::size_t r = 0; r < n; ++r) {
    if (records[r].winner) wins.push_back(r);
  }
  const auto owner = [&](std::size_t k) { return *records[wins[k]].winner; };
  std::vector<std::size_t> refresh;  // indices into `wins`
  for (std::size_t k = 0; k + 1 < wins.size(); ++k) {
    if (owner(k) == user && owner(k + 1) != user) refresh.push_back(k);
  }

  const Tick difs = params.l_difs;
  const Tick tran = params.l_tran();
  const Tick rcts = params.l_rcts();
  const Tick nav = params.l_nav();
  const bool rts = mode == CsmaMode::RtsCts;

  std::vector<CycleAccount> out;
  for (std::size_t c = 1; c < refresh.size(); ++c) {
    const std::size_t k0 = refresh[c - 1];
    const std::size_t k1 = refresh[c];
    std::size_t first = k0 + 1;
    while (owner(first) != user) ++first;

    CycleAccount acc;
    acc.cycle_start = records[wins[k0]].t + params.success_airtime(mode);
    acc.n_b = static_cast<std::int64_t>(first - k0 - 1);
    acc.n_a_prime = static_cast<std::int64_t>(k1 - first);

    std::int64_t fresh_part1 = 0;
    for (std::size_t r = wins[k0] + 1; r <= wins[first]; ++r) {
      if (!records[r].winner) ++acc.collisions_part1;
      if (fresh[r]) {
        ++fresh_part1;
        acc.backoff_part1 += records[r].counter[user];
      }
    }
    for (std::size_t r = wins[first] + 1; r <= wins[k1]; ++r) {
      if (!records[r].winner) ++acc.collisions_part2;
      if (fresh[r]) acc.backoff_part2 += records[r].counter[user];
    }
    if (fresh_part1 != acc.collisions_part1 + 1) {
      throw Error("audit log is inconsistent: part 1 backoff draws do not match collisions");
    }

    const std::int64_t attempts1 = acc.collisions_part1 + 1;
    const std::int64_t attempts2 = acc.n_a_prime + acc.collisions_part2;
    if (rts) {
      acc.t_part1 = acc.n_b * (difs + nav) + tran + attempts1 * (difs + rcts) + acc.backoff_part1;
      acc.t_part2 = acc.n_a_prime * tran + attempts2 * (difs + rcts) + acc.backoff_part2;
    } else {
      acc.t_part1 = acc.n_b * (difs + tran - 1) + attempts1 * (difs + tran) + acc.backoff_part1;
      acc.t_part2 = attempts2 * (difs + tran) + acc.backoff_part2;
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace cct
