#include "cctlab/trace_io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace cct {

namespace {

void write_users(std::ostream& out, const ChannelTrace& trace, UserMask mask) {
  bool first = true;
  for (std::size_t i = 0; i < trace.user_count(); ++i) {
    if ((mask >> i) & 1U) {
      if (!first) out << '+';
      out << trace.users()[i];
      first = false;
    }
  }
}

std::int64_t parse_int(std::string_view field, std::size_t line, const char* what) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("expected an integer ") + what + ", got '" +
                               std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(text.substr(pos));
      return parts;
    }
    parts.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
}

class TraceParser {
 public:
  void header(std::string_view body, std::size_t line) {
    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) return;  // plain comment
    const std::string_view key = body.substr(0, eq);
    const std::string_view value = body.substr(eq + 1);
    if (key == "slots_per_unit") {
      slots_per_unit_ = parse_int(value, line, "slots_per_unit");
      if (*slots_per_unit_ <= 0) throw ParseError(line, "slots_per_unit must be positive");
    } else if (key == "users") {
      if (!events_.empty() || declared_users_) {
        throw ParseError(line, "#users must precede all events and appear once");
      }
      declared_users_ = true;
      users_.clear();
      if (!value.empty()) {
        for (std::string_view u : split(value, '+')) add_user(u, line);
      }
    } else if (key == "horizon") {
      horizon_ = parse_int(value, line, "horizon");
      if (*horizon_ < 0) throw ParseError(line, "horizon must be non-negative");
      horizon_line_ = line;
    }
  }

  void event(std::string_view text, std::size_t line) {
    const auto fields = split(text, ',');
    if (fields.size() != 4) {
      throw ParseError(line, "expected 4 comma-separated fields, got " +
                                 std::to_string(fields.size()));
    }
    ChannelEvent e;
    e.start = parse_int(fields[0], line, "start");
    e.end = parse_int(fields[1], line, "end");
    if (fields[2] == "S") {
      e.kind = EventKind::Success;
    } else if (fields[2] == "C") {
      e.kind = EventKind::Collision;
    } else if (fields[2] == "I") {
      e.kind = EventKind::Idle;
    } else {
      throw ParseError(line, "unknown event kind '" + std::string(fields[2]) + "'");
    }
    if (!fields[3].empty()) {
      for (std::string_view u : split(fields[3], '+')) {
        e.users |= UserMask{1} << user_for(u, line);
      }
    }
    check(e, line);
    events_.push_back(e);
  }

  TraceFile finish() {
    Tick horizon = events_.empty() ? 0 : events_.back().end;
    if (horizon_) {
      if (*horizon_ < horizon) throw ParseError(horizon_line_, "horizon precedes the last event");
      horizon = *horizon_;
    }
    TraceFile file{ChannelTrace(std::move(users_), std::move(events_), horizon), slots_per_unit_};
    validate_trace(file.trace);
    return file;
  }

 private:
  void add_user(std::string_view label, std::size_t line) {
    if (!is_valid_user_label(label)) {
      throw ParseError(line, "invalid user label '" + std::string(label) + "'");
    }
    for (const auto& u : users_) {
      if (u == label) throw ParseError(line, "duplicate user '" + std::string(label) + "'");
    }
    if (users_.size() == kMaxUsers) throw ParseError(line, "too many users");
    users_.emplace_back(label);
  }

  std::size_t user_for(std::string_view label, std::size_t line) {
    for (std::size_t i = 0; i < users_.size(); ++i) {
      if (users_[i] == label) return i;
    }
    if (declared_users_) {
      throw ParseError(line, "user '" + std::string(label) + "' is not declared in #users");
    }
    add_user(label, line);
    return users_.size() - 1;
  }

  void check(const ChannelEvent& e, std::size_t line) const {
    if (e.start < 0 || e.start >= e.end) throw ParseError(line, "start must be before end");
    const int n = std::popcount(e.users);
    if (e.kind == EventKind::Success && n != 1) {
      throw ParseError(line, "a success carries exactly one user");
    }
    if (e.kind == EventKind::Collision && n < 2) {
      throw ParseError(line, "a collision carries at least two users");
    }
    if (e.kind == EventKind::Idle && n != 0) throw ParseError(line, "an idle event carries no users");
    if (!events_.empty()) {
      const ChannelEvent& prev = events_.back();
      if (e.start < prev.start) throw ParseError(line, "events are not sorted by start");
      if (e.start < prev.end) throw ParseError(line, "event overlaps the previous one");
    }
  }

  std::vector<std::string> users_;
  bool declared_users_ = false;
  std::vector<ChannelEvent> events_;
  std::optional<std::int64_t> slots_per_unit_;
  std::optional<Tick> horizon_;
  std::size_t horizon_line_ = 0;
};

}  // namespace

void write_trace(std::ostream& out, const ChannelTrace& trace,
                 std::optional<std::int64_t> slots_per_unit) {
  if (slots_per_unit) out << "#slots_per_unit=" << *slots_per_unit << '\n';
  out << "#users=";
  const UserMask all = trace.user_count() == kMaxUsers ? ~UserMask{0}
                                                       : (UserMask{1} << trace.user_count()) - 1;
  write_users(out, trace, all);
  out << '\n' << "#horizon=" << trace.horizon() << '\n';
  for (const ChannelEvent& e : trace.events()) {
    out << e.start << ',' << e.end << ',' << to_code(e.kind) << ',';
    write_users(out, trace, e.users);
    out << '\n';
  }
}

std::string format_trace(const ChannelTrace& trace, std::optional<std::int64_t> slots_per_unit) {
  std::ostringstream out;
  write_trace(out, trace, slots_per_unit);
  return out.str();
}

void save_trace(const std::filesystem::path& path, const ChannelTrace& trace,
                std::optional<std::int64_t> slots_per_unit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_trace(out, trace, slots_per_unit);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

TraceFile read_trace(std::istream& in) {
  TraceParser parser;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    if (text.front() == '#') {
      parser.header(std::string_view(text).substr(1), line);
    } else {
      parser.event(text, line);
    }
  }
  try {
    return parser.finish();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(line, e.what());
  }
}

TraceFile parse_trace(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

TraceFile load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_trace(in);
}

}  // namespace cct
