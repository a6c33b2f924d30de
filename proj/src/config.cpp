#include "sinkchain/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

namespace sinkchain {

namespace {

void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void reject_unknown_keys(const Json& j, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
  require_object(j, where);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto candidate : allowed) known = known || key == candidate;
    if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double number_at(const Json& j, const char* key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

template <typename T>
void read_number(const Json& j, const char* key, T& target, const std::string& where) {
  if (j.contains(key)) target = static_cast<T>(number_at(j, key, where));
}

// "auto" or a number.
void read_auto(const Json& j, const char* key, std::optional<double>& target, const std::string& where) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "auto")
    target.reset();
  else if (v.is_number())
    target = v.get<double>();
  else
    throw ConfigError(where + "." + key + ": expected \"auto\" or a number");
}

Json auto_or_number(const std::optional<double>& value) {
  return value ? Json(*value) : Json("auto");
}

std::string string_at(const Json& j, const char* key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

Representation parse_representation(const std::string& name) {
  if (name == "reduced") return Representation::ReducedSingleExcitation;
  if (name == "full") return Representation::FullSpace;
  throw ConfigError("representation must be \"reduced\" or \"full\"");
}

}  // namespace

Json to_json(const ChainSpec& spec) {
  Json j;
  j["N"] = spec.N;
  j["omega"] = spec.omega;
  j["lambda"] = spec.lambda;
  j["gamma"] = spec.gamma;
  j["Gamma"] = spec.bigGamma;
  j["Gamma_s"] = spec.gammaSink;
  j["convention"] = to_string(spec.convention);
  return j;
}

ChainSpec chain_from_json(const Json& j, ChainSpec spec) {
  const std::string where = "chain";
  reject_unknown_keys(j, where, {"N", "omega", "lambda", "gamma", "Gamma", "Gamma_s", "convention"});
  if (j.contains("N")) {
    const double n = number_at(j, "N", where);
    if (n != static_cast<double>(static_cast<int>(n))) throw ParameterError("N", "N must be an integer");
    spec.N = static_cast<int>(n);
  }
  read_number(j, "omega", spec.omega, where);
  read_number(j, "lambda", spec.lambda, where);
  read_number(j, "gamma", spec.gamma, where);
  read_number(j, "Gamma", spec.bigGamma, where);
  read_number(j, "Gamma_s", spec.gammaSink, where);
  if (j.contains("convention")) {
    const std::string name = string_at(j, "convention", where);
    if (name == "population")
      spec.convention = RateConvention::Population;
    else if (name == "doubled")
      spec.convention = RateConvention::Doubled;
    else
      throw ConfigError("chain.convention must be \"population\" or \"doubled\"");
  }
  validate(spec);
  return spec;
}

Json to_json(const PropagationControls& c) {
  Json j;
  j["dt_initial"] = c.dtInitial;
  j["rel_tol"] = c.relTol;
  j["abs_tol"] = c.absTol;
  j["t_max"] = auto_or_number(c.tMax);
  j["steady_eps"] = c.steadyEps;
  j["record_every"] = auto_or_number(c.recordEvery);
  j["auto_sample_cap"] = c.autoSampleCap;
  return j;
}

PropagationControls controls_from_json(const Json& j, PropagationControls c) {
  const std::string where = "controls";
  reject_unknown_keys(j, where, {"dt_initial", "rel_tol", "abs_tol", "t_max", "steady_eps",
                                 "record_every", "auto_sample_cap"});
  read_number(j, "dt_initial", c.dtInitial, where);
  read_number(j, "rel_tol", c.relTol, where);
  read_number(j, "abs_tol", c.absTol, where);
  read_auto(j, "t_max", c.tMax, where);
  read_number(j, "steady_eps", c.steadyEps, where);
  read_auto(j, "record_every", c.recordEvery, where);
  if (j.contains("auto_sample_cap")) {
    const double cap = number_at(j, "auto_sample_cap", where);
    if (cap < 2) throw ParameterError("auto_sample_cap", "auto_sample_cap must be >= 2");
    c.autoSampleCap = static_cast<std::size_t>(cap);
  }
  validate(c);
  return c;
}

Json to_json(const SweepPlan& plan) {
  Json j;
  Json axes = Json::array();
  for (const auto& axis : plan.axes) {
    Json a;
    a["parameter"] = to_string(axis.parameter);
    a["values"] = axis.values;
    axes.push_back(std::move(a));
  }
  j["axes"] = std::move(axes);
  j["output"] = plan.output == SweepOutput::Summary ? "summary" : "lambda_qc";
  j["bracket"] = {plan.bracketLo, plan.bracketHi};
  j["tol"] = plan.lambdaTol;
  j["unit_label"] = plan.unitLabel;
  j["max_points"] = plan.maxPoints;
  j["representation"] = to_string(plan.representation);
  return j;
}

SweepPlan plan_from_json(const Json& j, const ChainSpec& base) {
  const std::string where = "sweep";
  reject_unknown_keys(j, where, {"axes", "output", "bracket", "tol", "unit_label", "max_points",
                                 "representation"});
  SweepPlan plan;
  plan.base = base;
  if (j.contains("axes")) {
    const Json& axes = j.at("axes");
    if (!axes.is_array()) throw ConfigError("sweep.axes: expected an array");
    for (const auto& a : axes) {
      reject_unknown_keys(a, "sweep.axes[]", {"parameter", "values", "range"});
      const std::string name = string_at(a, "parameter", "sweep.axes[]");
      const auto parameter = parse_sweep_parameter(name);
      if (!parameter)
        throw ConfigError("sweep.axes[]: unknown parameter '" + name +
                          "' (expected lambda, gamma, Gamma, Gamma_s or N)");
      SweepAxis axis{*parameter, {}};
      if (a.contains("values") == a.contains("range"))
        throw ConfigError("sweep.axes[" + name + "]: give exactly one of \"values\" or \"range\"");
      if (a.contains("values")) {
        for (const auto& v : a.at("values")) {
          if (!v.is_number()) throw ConfigError("sweep.axes[" + name + "].values: expected numbers");
          axis.values.push_back(v.get<double>());
        }
      } else {
        const Json& r = a.at("range");
        if (!r.is_array() || r.size() != 3 || !r[0].is_number() || !r[1].is_number() ||
            !r[2].is_number_unsigned())
          throw ConfigError("sweep.axes[" + name + "].range: expected [lo, hi, count]");
        axis.values = linspace(r[0].get<double>(), r[1].get<double>(), r[2].get<std::size_t>());
      }
      plan.axes.push_back(std::move(axis));
    }
  }
  if (j.contains("output")) {
    const std::string output = string_at(j, "output", where);
    if (output == "summary")
      plan.output = SweepOutput::Summary;
    else if (output == "lambda_qc")
      plan.output = SweepOutput::LambdaQc;
    else
      throw ConfigError("sweep.output must be \"summary\" or \"lambda_qc\"");
  }
  if (j.contains("bracket")) {
    const Json& b = j.at("bracket");
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
      throw ConfigError("sweep.bracket: expected [lo, hi]");
    plan.bracketLo = b[0].get<double>();
    plan.bracketHi = b[1].get<double>();
  }
  read_number(j, "tol", plan.lambdaTol, where);
  if (j.contains("unit_label")) plan.unitLabel = string_at(j, "unit_label", where);
  if (j.contains("max_points")) {
    const double cap = number_at(j, "max_points", where);
    if (cap < 1) throw ParameterError("max_points", "max_points must be >= 1");
    plan.maxPoints = static_cast<std::size_t>(cap);
  }
  if (j.contains("representation"))
    plan.representation = parse_representation(string_at(j, "representation", where));
  validate(plan);
  return plan;
}

Json to_json(const CliConfig& config) {
  Json j;
  j["chain"] = to_json(config.chain);
  j["controls"] = to_json(config.controls);
  if (config.sweep) j["sweep"] = to_json(*config.sweep);
  return j;
}

CliConfig config_from_json(const Json& j) {
  reject_unknown_keys(j, "config", {"chain", "controls", "sweep"});
  CliConfig config;
  if (j.contains("chain")) config.chain = chain_from_json(j.at("chain"));
  if (j.contains("controls")) config.controls = controls_from_json(j.at("controls"));
  if (j.contains("sweep")) config.sweep = plan_from_json(j.at("sweep"), config.chain);
  return config;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

Json preset_to_json(const FigurePreset& preset) {
  Json j;
  j["figure"] = to_string(preset.id);
  j["chain"] = to_json(preset.plan.base);
  j["controls"] = to_json(preset.controls);
  j["sweep"] = to_json(preset.plan);
  j["integral_scale"] = preset.integralScale;
  j["time_unit"] = preset.timeUnit;
  j["integral_unit"] = preset.integralUnit;
  Json columns = Json::array();
  for (auto c : preset.columns) columns.push_back(column_name(c));
  j["columns"] = std::move(columns);
  j["build"] = {{"version", SINKCHAIN_VERSION},
                {"compiler", __VERSION__},
                {"cxx_standard", __cplusplus}};
  return j;
}

FigurePreset preset_from_json(const Json& j) {
  reject_unknown_keys(j, "meta", {"figure", "chain", "controls", "sweep", "integral_scale",
                                  "time_unit", "integral_unit", "columns", "build"});
  const std::string name = string_at(j, "figure", "meta");
  const auto id = parse_figure_id(name);
  if (!id) throw ConfigError("meta.figure: unknown figure '" + name + "'");
  FigurePreset preset;
  preset.id = *id;
  preset.columns = figure_columns(*id);
  const ChainSpec base = chain_from_json(j.at("chain"));
  preset.controls = controls_from_json(j.at("controls"));
  preset.plan = plan_from_json(j.at("sweep"), base);
  if (j.contains("integral_scale")) preset.integralScale = number_at(j, "integral_scale", "meta");
  if (j.contains("time_unit")) preset.timeUnit = string_at(j, "time_unit", "meta");
  if (j.contains("integral_unit")) preset.integralUnit = string_at(j, "integral_unit", "meta");
  return preset;
}

}  // namespace sinkchain
