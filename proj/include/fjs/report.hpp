#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fjs/graph.hpp"
#include "fjs/metrics.hpp"

namespace fjs {

// Flat JSON object holding every MetricsReport field. Doubles are written in
// shortest round-trip form, so parse(serialize(r)) == r bit for bit.
std::string report_to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& text);

// Same object plus extra keys (e.g. "command", "seed"). Extra keys are
// ignored by report_from_json.
struct ReportContext {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::string graph_path;
  std::string distribution;
  std::size_t threads = 1;
};
std::string report_to_json(const MetricsReport& r, const ReportContext& ctx);

}  // namespace fjs
