#pragma once

// Line-oriented trace files, one event per line:
//
//   #slots_per_unit=50        (optional)
//   #users=A+B                (optional; otherwise order of first appearance)
//   #horizon=1000000          (optional; otherwise the last event end)
//   120,153,S,A
//   153,160,I,
//   200,206,C,A+B
//
// The writer always emits the users and horizon headers so that silent users
// and trailing idle time survive a round trip. Output is byte-identical on
// every platform.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cctlab/core.hpp"

namespace cct {

struct TraceFile {
  ChannelTrace trace;
  std::optional<std::int64_t> slots_per_unit;
};

void write_trace(std::ostream& out, const ChannelTrace& trace,
                 std::optional<std::int64_t> slots_per_unit = std::nullopt);
std::string format_trace(const ChannelTrace& trace,
                         std::optional<std::int64_t> slots_per_unit = std::nullopt);
void save_trace(const std::filesystem::path& path, const ChannelTrace& trace,
                std::optional<std::int64_t> slots_per_unit = std::nullopt);

/// Parses and validates. Syntax errors throw ParseError carrying the line
/// number; a well-formed file describing an invalid trace rethrows the
/// validation error as a ParseError too.
TraceFile read_trace(std::istream& in);
TraceFile parse_trace(const std::string& text);
TraceFile load_trace(const std::filesystem::path& path);

}  // namespace cct
