#include "fjs/report.hpp"

#include <json.hpp>
#include <stdexcept>

#include "fjs/error.hpp"

namespace fjs {
namespace {

using nlohmann::json;

json to_object(const MetricsReport& r) {
  return json{
      {"conflict", r.conflict},
      {"disagreement", r.disagreement},
      {"polarization", r.polarization},
      {"pd_index", r.pd_index},
      {"sum_z", r.sum_z},
      {"weighted_sum_z", r.weighted_sum_z},
      {"mode", to_string(r.mode)},
      {"delta_used", r.delta_used},
      {"eps_requested", r.eps_requested},
      {"conservation_residual", r.conservation_residual},
      {"conservation_relative", r.conservation_relative},
      {"pd_identity_residual", r.pd_identity_residual},
      {"certified", r.certified},
      {"centered", r.centered},
      {"solver_iterations", r.solver_iterations},
      {"node_count", r.node_count},
      {"edge_count", r.edge_count},
      {"graph_fingerprint", r.graph_fingerprint},
      {"solve_seconds", r.solve_seconds},
      {"norms_seconds", r.norms_seconds},
      {"total_seconds", r.total_seconds},
  };
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("report is missing field '") + key + "'");
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("report field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string report_to_json(const MetricsReport& r) { return to_object(r).dump(); }

std::string report_to_json(const MetricsReport& r, const ReportContext& ctx) {
  json j = to_object(r);
  if (!ctx.command.empty()) j["command"] = ctx.command;
  if (ctx.seed) j["seed"] = *ctx.seed;
  if (!ctx.graph_path.empty()) j["graph"] = ctx.graph_path;
  if (!ctx.distribution.empty()) j["distribution"] = ctx.distribution;
  j["threads"] = ctx.threads;
  return j.dump();
}

MetricsReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  if (!j.is_object()) throw InputError("report must be a JSON object");
  MetricsReport r;
  read_field(j, "conflict", r.conflict);
  read_field(j, "disagreement", r.disagreement);
  read_field(j, "polarization", r.polarization);
  read_field(j, "pd_index", r.pd_index);
  read_field(j, "sum_z", r.sum_z);
  read_field(j, "weighted_sum_z", r.weighted_sum_z);
  std::string mode;
  read_field(j, "mode", mode);
  if (mode == "exact") {
    r.mode = MetricsMode::exact;
  } else if (mode == "approx") {
    r.mode = MetricsMode::approx;
  } else {
    throw InputError("report mode must be 'exact' or 'approx', got '" + mode + "'");
  }
  read_field(j, "delta_used", r.delta_used);
  read_field(j, "eps_requested", r.eps_requested);
  read_field(j, "conservation_residual", r.conservation_residual);
  read_field(j, "conservation_relative", r.conservation_relative);
  read_field(j, "pd_identity_residual", r.pd_identity_residual);
  read_field(j, "certified", r.certified);
  read_field(j, "centered", r.centered);
  read_field(j, "solver_iterations", r.solver_iterations);
  read_field(j, "node_count", r.node_count);
  read_field(j, "edge_count", r.edge_count);
  read_field(j, "graph_fingerprint", r.graph_fingerprint);
  read_field(j, "solve_seconds", r.solve_seconds);
  read_field(j, "norms_seconds", r.norms_seconds);
  read_field(j, "total_seconds", r.total_seconds);
  return r;
}

}  // namespace fjs
