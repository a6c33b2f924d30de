#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sinkchain/analysis.hpp"
#include "sinkchain/config.hpp"
#include "sinkchain/sweep.hpp"

namespace sinkchain::cli {

namespace {

namespace fs = std::filesystem;

struct ChainFlags {
  std::optional<int> n;
  std::optional<double> omega, lambda, gamma, bigGamma, gammaSink;
  std::optional<std::string> convention;
  std::optional<std::string> config;
  std::optional<std::string> tMax;
  std::optional<std::string> representation;
};

void add_chain_flags(CLI::App* cmd, ChainFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON config file (flags override its values)");
  cmd->add_option("--n", flags.n, "number of chain sites N (sink excluded)");
  cmd->add_option("--omega", flags.omega, "site energy omega (default 0)");
  cmd->add_option("--lambda", flags.lambda, "hopping strength lambda");
  cmd->add_option("--gamma", flags.gamma, "local dephasing rate gamma");
  cmd->add_option("--big-gamma", flags.bigGamma, "local dissipation rate Gamma");
  cmd->add_option("--gamma-sink", flags.gammaSink, "sink transfer rate Gamma_s");
  cmd->add_option("--convention", flags.convention, "rate convention: population | doubled")
      ->check(CLI::IsMember({"population", "doubled"}));
  cmd->add_option("--t-max", flags.tMax, "propagation horizon: auto | <time>");
  cmd->add_option("--representation", flags.representation, "reduced | full")
      ->check(CLI::IsMember({"reduced", "full"}));
}

CliConfig resolve_config(const ChainFlags& flags, bool requireRates) {
  CliConfig config = flags.config ? load_config(*flags.config) : CliConfig{};
  if (requireRates && !flags.config) {
    const std::pair<const char*, bool> required[] = {
        {"--n", flags.n.has_value()},        {"--lambda", flags.lambda.has_value()},
        {"--gamma", flags.gamma.has_value()}, {"--big-gamma", flags.bigGamma.has_value()},
        {"--gamma-sink", flags.gammaSink.has_value()}};
    for (const auto& [name, present] : required)
      if (!present) throw CLI::RequiredError(name);
  }
  ChainSpec& spec = config.chain;
  if (flags.n) spec.N = *flags.n;
  if (flags.omega) spec.omega = *flags.omega;
  if (flags.lambda) spec.lambda = *flags.lambda;
  if (flags.gamma) spec.gamma = *flags.gamma;
  if (flags.bigGamma) spec.bigGamma = *flags.bigGamma;
  if (flags.gammaSink) spec.gammaSink = *flags.gammaSink;
  if (flags.convention)
    spec.convention = *flags.convention == "doubled" ? RateConvention::Doubled : RateConvention::Population;
  validate(spec);
  if (flags.tMax) {
    if (*flags.tMax == "auto") {
      config.controls.tMax.reset();
    } else {
      try {
        std::size_t used = 0;
        config.controls.tMax = std::stod(*flags.tMax, &used);
        if (used != flags.tMax->size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParameterError("t_max", "t_max must be 'auto' or a number (got '" + *flags.tMax + "')");
      }
    }
  }
  validate(config.controls);
  if (config.sweep) config.sweep->base = spec;
  return config;
}

Representation representation_of(const ChainFlags& flags, Representation fallback) {
  if (!flags.representation) return fallback;
  return *flags.representation == "full" ? Representation::FullSpace
                                         : Representation::ReducedSingleExcitation;
}

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
}

fs::path suffixed(const fs::path& path, const std::string& suffix) {
  fs::path result = path;
  result.replace_filename(path.stem().string() + "_" + suffix + path.extension().string());
  return result;
}

int cmd_simulate(const ChainFlags& flags, const std::string& scenario,
                 const std::optional<std::string>& outPath, bool dumpConfig, std::ostream& out) {
  CliConfig config = resolve_config(flags, true);
  if (dumpConfig) {
    out << to_json(config).dump(2) << '\n';
    return kOk;
  }
  const Representation representation =
      representation_of(flags, Representation::ReducedSingleExcitation);
  const ChainSpec& spec = config.chain;

  if (scenario == "both") {
    const auto [quantum, classical] = propagate_pair(spec, config.controls, representation);
    if (outPath) {
      write_file(suffixed(*outPath, "quantum"), [&](std::ostream& o) { write_trajectory_csv(o, quantum); });
      write_file(suffixed(*outPath, "classical"), [&](std::ostream& o) { write_trajectory_csv(o, classical); });
    }
    const RunSummary s = summarize(spec, quantum, classical);
    out << "eta_Q=" << fixed(s.etaQ) << " eta_C=" << fixed(s.etaC) << " eta_diff=" << fixed(s.etaDiff)
        << " |eta_Q-eta_C|=" << fmt::format("{:.3e}", std::abs(s.etaDiff))
        << " I=" << fixed(s.integratedCoherence) << " C_max=" << fixed(s.maxCoherence)
        << " t_Cmax=" << fixed(s.maxCoherenceTime)
        << " tau=" << (s.intersectionTime ? fixed(*s.intersectionTime) : std::string("none"))
        << " converged=" << (s.converged ? 1 : 0) << '\n';
    if (!s.converged) {
      out << "not converged: chain excitation above steady_eps at t=" << fixed(s.terminationTime) << '\n';
      return kNotConverged;
    }
    return kOk;
  }

  const ChainSpec run = with_scenario(spec, scenario == "classical" ? Scenario::Classical : Scenario::Quantum);
  const Trajectory traj =
      propagate(build_generator(run, representation), initial_state(run, representation), config.controls);
  if (outPath) write_file(*outPath, [&](std::ostream& o) { write_trajectory_csv(o, traj); });
  const CoherencePeak peak = max_coherence(traj);
  const double integral = trapezoid(traj.times, traj.coherence);
  out << "scenario=" << scenario << " eta=" << fixed(traj.sinkPopulation.back()) << " I=" << fixed(integral)
      << " C_max=" << fixed(peak.value) << " t_Cmax=" << fixed(peak.time)
      << " t_end=" << fixed(traj.terminationTime) << " converged=" << (traj.converged ? 1 : 0);
  if (traj.converged) out << " flux_discrepancy=" << fmt::format("{:.3e}", efficiency(traj).discrepancy);
  out << '\n';
  if (!traj.converged) {
    out << "not converged: chain excitation " << fmt::format("{:.3e}", traj.chainExcitation.back())
        << " > steady_eps at t=" << fixed(traj.terminationTime) << '\n';
    return kNotConverged;
  }
  return kOk;
}

int cmd_find_lambda_qc(const ChainFlags& flags, const std::vector<double>& bracket, double tol,
                       const std::optional<std::string>& outPath, std::ostream& out) {
  // λ itself is the unknown.
  ChainFlags withLambda = flags;
  if (!withLambda.lambda) withLambda.lambda = bracket.at(0);
  const CliConfig config = resolve_config(withLambda, true);
  const Representation representation =
      representation_of(flags, Representation::ReducedSingleExcitation);
  const LambdaQcResult result =
      find_lambda_qc(config.chain, bracket.at(0), bracket.at(1), tol, config.controls, representation);
  if (outPath) {
    std::vector<SweepRow> rows;
    for (const auto& evaluation : result.evaluations) {
      SweepRow row;
      row.index = rows.size();
      row.spec = evaluation.spec;
      row.summary = evaluation;
      rows.push_back(std::move(row));
    }
    write_file(*outPath, [&](std::ostream& o) { write_csv(o, rows, summary_columns()); });
  }
  out << "lambda_qc=" << fmt::format("{:.6f}", result.lambda)
      << " residual=" << fmt::format("{:.3e}", result.residual)
      << " evaluations=" << result.evaluations.size() << '\n';
  return kOk;
}

int cmd_sweep(const ChainFlags& flags, const std::string& outDir, const std::string& name,
              unsigned workers, bool dumpConfig, std::ostream& out) {
  if (!flags.config) throw CLI::RequiredError("--config");
  const CliConfig config = resolve_config(flags, false);
  if (!config.sweep) throw ConfigError("config has no \"sweep\" section");
  if (dumpConfig) {
    out << to_json(config).dump(2) << '\n';
    return kOk;
  }
  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_sweep(*config.sweep, config.controls, workers);
  const auto columns =
      config.sweep->output == SweepOutput::Summary ? summary_columns() : lambda_qc_columns();
  const fs::path dataPath = fs::path(outDir) / (name + "_data.csv");
  const fs::path metaPath = fs::path(outDir) / (name + "_meta.json");
  write_file(dataPath, [&](std::ostream& o) { write_csv(o, rows, columns); });
  Json meta = to_json(config);
  meta["build"] = {{"version", SINKCHAIN_VERSION}, {"compiler", __VERSION__}};
  write_file(metaPath, [&](std::ostream& o) { o << meta.dump(2) << '\n'; });
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
  out << "rows=" << rows.size() << " failed=" << failed << " elapsed=" << fmt::format("{:.2f}", elapsed)
      << "s data=" << dataPath.string() << '\n';
  return kOk;
}

std::string valid_figures() {
  std::string list;
  for (auto id : all_figures()) list += (list.empty() ? "" : ", ") + to_string(id);
  return list;
}

int cmd_reproduce(const std::optional<std::string>& figure, const std::optional<std::string>& metaPath,
                  const std::string& outDir, unsigned workers, std::ostream& out, std::ostream& err) {
  FigurePreset preset;
  if (metaPath) {
    std::ifstream in(*metaPath);
    if (!in) throw ConfigError("cannot open meta file " + *metaPath);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError(*metaPath + ": " + e.what());
    }
    preset = preset_from_json(j);
  } else if (figure) {
    const auto id = parse_figure_id(*figure);
    if (!id) {
      err << "unknown figure '" << *figure << "'; valid ids: " << valid_figures() << '\n';
      return kUsage;
    }
    preset = figure_preset(*id);
  } else {
    err << "reproduce needs --figure <id> or --meta <file>; valid ids: " << valid_figures() << '\n';
    return kUsage;
  }
  const auto start = std::chrono::steady_clock::now();
  const ReproduceResult result = reproduce_figure(preset, outDir, workers);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "figure=" << to_string(preset.id) << " rows=" << result.rows
      << " elapsed=" << fmt::format("{:.2f}", elapsed) << "s\n";
  for (const auto& file : result.files) out << "  " << file.string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy transport through a noisy two-level chain into a sink: quantum vs classical hopping", "sinkchain"};
  app.require_subcommand(1);

  ChainFlags simFlags;
  std::string scenario;
  std::optional<std::string> simOut;
  bool simDump = false;
  auto* simulate = app.add_subcommand("simulate", "propagate one parameter point");
  add_chain_flags(simulate, simFlags);
  simulate->add_option("--scenario", scenario, "quantum | classical | both")
      ->required()
      ->check(CLI::IsMember({"quantum", "classical", "both"}));
  simulate->add_option("--out", simOut, "trajectory CSV (t,p_sink,coherence); 'both' adds _quantum/_classical");
  simulate->add_flag("--dump-config", simDump, "print the resolved configuration as JSON and exit");

  ChainFlags qcFlags;
  std::vector<double> bracket;
  double tol = 1e-3;
  std::optional<std::string> qcOut;
  auto* findQc = app.add_subcommand("find-lambda-qc", "locate lambda where eta_Q = eta_C");
  add_chain_flags(findQc, qcFlags);
  findQc->add_option("--bracket", bracket, "lo,hi")->required()->delimiter(',')->expected(2);
  findQc->add_option("--tol", tol, "root tolerance on lambda")->check(CLI::PositiveNumber);
  findQc->add_option("--out", qcOut, "CSV of every evaluated point");

  ChainFlags sweepFlags;
  std::string sweepOutDir = ".";
  std::string sweepName = "sweep";
  unsigned sweepWorkers = 1;
  bool sweepDump = false;
  auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid from a config file");
  add_chain_flags(sweep, sweepFlags);
  sweep->add_option("--out-dir", sweepOutDir, "output directory");
  sweep->add_option("--name", sweepName, "file prefix (<name>_data.csv, <name>_meta.json)");
  sweep->add_option("--workers", sweepWorkers, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("--dump-config", sweepDump, "print the resolved configuration as JSON and exit");

  std::optional<std::string> figure;
  std::optional<std::string> metaPath;
  std::string reproOutDir = ".";
  unsigned reproWorkers = 1;
  auto* reproduce = app.add_subcommand("reproduce", "regenerate a figure dataset");
  reproduce->add_option("--figure", figure, "fig2 … fig9");
  reproduce->add_option("--meta", metaPath, "re-run from a previously written <id>_meta.json");
  reproduce->add_option("--out-dir", reproOutDir, "output directory");
  reproduce->add_option("--workers", reproWorkers, "worker threads")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(simFlags, scenario, simOut, simDump, out);
    if (findQc->parsed()) return cmd_find_lambda_qc(qcFlags, bracket, tol, qcOut, out);
    if (sweep->parsed()) return cmd_sweep(sweepFlags, sweepOutDir, sweepName, sweepWorkers, sweepDump, out);
    if (reproduce->parsed()) return cmd_reproduce(figure, metaPath, reproOutDir, reproWorkers, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    err << "error: invalid value for " << e.parameter() << ": " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BracketError& e) {
    err << "error: " << e.what() << '\n';
    return kBracketFailure;
  } catch (const NotConvergedError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}

}  // namespace sinkchain::cli
