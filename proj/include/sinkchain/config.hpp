#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "sinkchain/sweep.hpp"

namespace sinkchain {

// JSON configuration schema. Every object rejects unknown keys; omitted keys
// keep their defaults.
//
//   {
//     "chain":    { "N": 3, "omega": 0, "lambda": 1.0, "gamma": 0.25,
//                   "Gamma": 0.5, "Gamma_s": 1.0, "convention": "population" },
//     "controls": { "dt_initial": 1e-3, "rel_tol": 1e-8, "abs_tol": 1e-10,
//                   "t_max": "auto", "steady_eps": 1e-7,
//                   "record_every": "auto", "auto_sample_cap": 1000000 },
//     "sweep":    { "axes": [ { "parameter": "gamma", "values": [0, 0.5] },
//                             { "parameter": "lambda", "range": [0.5, 3.0, 6] } ],
//                   "output": "summary" | "lambda_qc",
//                   "bracket": [0.1, 10.0], "tol": 1e-3, "unit_label": "a.u.",
//                   "max_points": 10000, "representation": "reduced" | "full" }
//   }
//
// Figure meta files carry the same three sections plus "figure",
// "integral_scale", "time_unit", "integral_unit", "columns" and "build".

using Json = nlohmann::ordered_json;

struct CliConfig {
  ChainSpec chain;
  PropagationControls controls;
  std::optional<SweepPlan> sweep;  // base spec is `chain`
};

Json to_json(const ChainSpec& spec);
Json to_json(const PropagationControls& controls);
Json to_json(const SweepPlan& plan);  // without the base chain
Json to_json(const CliConfig& config);

ChainSpec chain_from_json(const Json& j, ChainSpec defaults = {});
PropagationControls controls_from_json(const Json& j, PropagationControls defaults = {});
SweepPlan plan_from_json(const Json& j, const ChainSpec& base);
CliConfig config_from_json(const Json& j);

/// Reads and parses a config file. Throws ConfigError on I/O, syntax or
/// schema problems and ParameterError on out-of-range values.
CliConfig load_config(const std::filesystem::path& path);

Json preset_to_json(const FigurePreset& preset);
FigurePreset preset_from_json(const Json& j);

}  // namespace sinkchain
