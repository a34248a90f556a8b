#pragma once

// Serialization of trace metrics. Two renderings share the field names:
//
//   key=value lines            psi_slots=8.01
//                              psi_undefined=0
//                              user=A
//                              cycle_samples=1203
//                              ...
//   JSON document              {"psi_slots": 8.01, "psi_undefined": false, ...}
//
// An undefined channel cycle time renders as `nan` in key=value form and as
// null in JSON.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cctlab/core.hpp"
#include "cctlab/metrics.hpp"

namespace cct {

/// Shortest decimal that round-trips; "nan", "inf" and "-inf" otherwise.
std::string format_double(double v);

struct TraceSummary {
  CycleTimeReport cycles;
  InterTxReport intertx;
  double throughput = 0.0;
  Tick horizon = 0;
  std::size_t event_count = 0;
  /// Filled only when details were requested, in trace user order.
  std::vector<std::pair<std::string, std::vector<Tick>>> refresh;
  std::vector<std::pair<std::string, std::vector<CycleInterval>>> intervals;
};

/// Throws TooFewUsersError for single-user traces.
TraceSummary summarize(const ChannelTrace& trace, bool details = false);

void write_summary_kv(std::ostream& out, const TraceSummary& summary);
std::string summary_to_json(const TraceSummary& summary, int indent = 2);

}  // namespace cct
