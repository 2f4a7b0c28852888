#pragma once

// JSON views of library results for the srm tool.

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "srm/srm.hpp"

namespace srm::cli {

using json = nlohmann::ordered_json;

inline constexpr const char * format_version = "srm-output/1";

/// Ordered key/value pairs describing one run.
using RunConfig = std::vector<std::pair<std::string, std::string>>;

inline json config_json(const RunConfig & cfg)
{
  json j = json::object();
  for (const auto & [k, v] : cfg) { j[k] = v; }
  return j;
}

inline json envelope(const RunConfig & cfg)
{
  json j;
  j["format_version"] = format_version;
  j["run_config"]     = config_json(cfg);
  return j;
}

/// "# format_version=...", then "# key=value" per config entry.
inline std::string csv_preamble(const RunConfig & cfg)
{
  std::string out = std::string("# format_version=") + format_version + "\n";
  for (const auto & [k, v] : cfg) { out += "# " + k + "=" + v + "\n"; }
  return out;
}

inline json to_json(const VerificationReport & r)
{
  json j;
  j["check"]           = r.check;
  j["n"]               = r.n;
  j["seed"]            = r.seed;
  j["trials"]          = r.trials;
  j["max_residual"]    = r.max_residual;
  j["threshold"]       = r.threshold;
  j["pass"]            = r.pass;
  j["trial_residuals"] = r.trial_residuals;
  json m = json::object();
  for (const auto & [k, v] : r.metrics) { m[k] = v; }
  j["metrics"] = m;
  if (!r.labels.empty()) {
    j["labels"] = r.labels;
    j["table"]  = r.table;
  }
  return j;
}

inline json to_json(const DriftReport & d)
{
  json arr = json::array();
  for (std::size_t i = 0; i < d.names.size(); ++i) {
    arr.push_back({{"name", d.names[i]}, {"initial", d.initial[i]}, {"max_relative_drift", d.max_relative_drift[i]}});
  }
  return arr;
}

/// {"n", "entries": [{"k","r","value"}], "casimirs": [{"name","value"}]} at M.
inline json integral_table(const IntegralFamily & fam, const SkewMatrix & m)
{
  json j;
  j["n"]      = fam.n;
  json ents   = json::array();
  for (const auto & e : fam.entries) { ents.push_back({{"k", e.k}, {"r", e.r}, {"value", e.fn.value(m)}}); }
  j["entries"] = ents;
  json cas     = json::array();
  for (const auto & c : fam.casimirs) { cas.push_back({{"name", c.name}, {"value", c.value(m)}}); }
  j["casimirs"] = cas;
  return j;
}

inline json to_json(const LimitSweep & s)
{
  json j;
  j["k"]             = s.k;
  j["r"]             = s.r;
  j["s_values"]      = s.s_values;
  j["scaled_values"] = s.scaled_values;
  j["target"]        = s.target;
  j["abs_errors"]    = s.abs_errors;
  j["extrapolated"]  = s.extrapolated;
  j["observed_rate"] = s.observed_rate;
  return j;
}

}  // namespace srm::cli
