#include "sinkchain/sweep.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "sinkchain/config.hpp"

namespace sinkchain {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void apply_axis_value(ChainSpec& spec, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::Lambda: spec.lambda = value; break;
    case SweepParameter::Gamma: spec.gamma = value; break;
    case SweepParameter::BigGamma: spec.bigGamma = value; break;
    case SweepParameter::GammaSink: spec.gammaSink = value; break;
    case SweepParameter::N: spec.N = static_cast<int>(std::lround(value)); break;
  }
}

SweepRow evaluate_point(const SweepPlan& plan, const PropagationControls& controls, std::size_t index) {
  SweepRow row;
  row.index = index;
  row.spec = grid_point(plan, index);
  row.summary.spec = row.spec;
  try {
    if (plan.output == SweepOutput::Summary) {
      row.summary = run_point(row.spec, controls, plan.representation);
    } else {
      row.lambdaQc = find_lambda_qc(row.spec, plan.bracketLo, plan.bracketHi, plan.lambdaTol,
                                    controls, plan.representation);
      row.spec.lambda = row.lambdaQc->lambda;
      row.summary = row.lambdaQc->evaluations.back();
      row.summary.converged = true;
      for (const auto& evaluation : row.lambdaQc->evaluations)
        row.summary.converged = row.summary.converged && evaluation.converged;
    }
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
    row.summary = RunSummary{};
    row.summary.spec = row.spec;
    row.summary.etaQ = row.summary.etaC = row.summary.etaDiff = kNaN;
    row.summary.integratedCoherence = row.summary.maxCoherence = row.summary.maxCoherenceTime = kNaN;
    row.summary.converged = false;
  }
  return row;
}

std::string cell(const SweepRow& row, Column column, double integralScale) {
  const RunSummary& s = row.summary;
  switch (column) {
    case Column::N: return std::to_string(row.spec.N);
    case Column::Omega: return format_number(row.spec.omega);
    case Column::Lambda: return format_number(row.spec.lambda);
    case Column::Gamma: return format_number(row.spec.gamma);
    case Column::BigGamma: return format_number(row.spec.bigGamma);
    case Column::GammaSink: return format_number(row.spec.gammaSink);
    case Column::EtaQ: return format_number(s.etaQ);
    case Column::EtaC: return format_number(s.etaC);
    case Column::EtaDiff: return format_number(s.etaDiff);
    case Column::IntegratedCoherence: return format_number(s.integratedCoherence);
    case Column::ScaledIntegratedCoherence: return format_number(s.integratedCoherence * integralScale);
    case Column::MaxCoherence: return format_number(s.maxCoherence);
    case Column::MaxCoherenceTime: return format_number(s.maxCoherenceTime);
    case Column::IntersectionTime: return s.intersectionTime ? format_number(*s.intersectionTime) : "";
    case Column::LambdaQc: return row.lambdaQc ? format_number(row.lambdaQc->lambda) : "nan";
    case Column::Residual: return row.lambdaQc ? format_number(row.lambdaQc->residual) : "nan";
    case Column::Converged: return s.converged && !row.failed ? "1" : "0";
  }
  return "";
}

}  // namespace

std::string to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::Lambda: return "lambda";
    case SweepParameter::Gamma: return "gamma";
    case SweepParameter::BigGamma: return "Gamma";
    case SweepParameter::GammaSink: return "Gamma_s";
    case SweepParameter::N: return "N";
  }
  return "";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  for (auto p : {SweepParameter::Lambda, SweepParameter::Gamma, SweepParameter::BigGamma,
                 SweepParameter::GammaSink, SweepParameter::N})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> values(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) values[i] = lo + step * static_cast<double>(i);
  values.back() = hi;
  return values;
}

void validate(const SweepPlan& plan) {
  validate(plan.base);
  for (const auto& axis : plan.axes) {
    if (axis.values.empty())
      throw ParameterError(to_string(axis.parameter), "sweep axis " + to_string(axis.parameter) + " is empty");
    for (double v : axis.values) {
      if (!std::isfinite(v))
        throw ParameterError(to_string(axis.parameter), "sweep axis values must be finite");
      if (axis.parameter == SweepParameter::N && v != std::round(v))
        throw ParameterError("N", "N axis values must be integers");
      ChainSpec probe = plan.base;
      apply_axis_value(probe, axis.parameter, v);
      validate(probe);
    }
  }
  if (plan.output == SweepOutput::LambdaQc) {
    if (!(plan.bracketLo >= 0.0) || !(plan.bracketHi > plan.bracketLo))
      throw ParameterError("bracket", "bracket must satisfy 0 <= lo < hi");
    if (!(plan.lambdaTol > 0.0)) throw ParameterError("tol", "tol must be positive");
  }
  // Product computed with an overflow guard.
  std::size_t size = 1;
  for (const auto& axis : plan.axes) {
    if (axis.values.size() > plan.maxPoints / size)
      throw ParameterError("max_points", "sweep grid exceeds max_points = " + std::to_string(plan.maxPoints));
    size *= axis.values.size();
  }
  if (size > plan.maxPoints)
    throw ParameterError("max_points", "sweep grid exceeds max_points = " + std::to_string(plan.maxPoints));
}

std::size_t grid_size(const SweepPlan& plan) {
  std::size_t size = 1;
  for (const auto& axis : plan.axes) size *= axis.values.size();
  return size;
}

ChainSpec grid_point(const SweepPlan& plan, std::size_t index) {
  ChainSpec spec = plan.base;
  for (auto axis = plan.axes.rbegin(); axis != plan.axes.rend(); ++axis) {
    const std::size_t n = axis->values.size();
    apply_axis_value(spec, axis->parameter, axis->values[index % n]);
    index /= n;
  }
  return spec;
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan, const PropagationControls& controls,
                                unsigned workers) {
  validate(plan);
  validate(controls);
  const std::size_t total = grid_size(plan);
  std::vector<SweepRow> rows(total);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) rows[i] = evaluate_point(plan, controls, i);
  };
  const std::size_t threadCount = std::min<std::size_t>(std::max(1u, workers), total);
  if (threadCount <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threadCount; ++t) pool.emplace_back(work);
  }
  return rows;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{}", value);
}

std::string column_name(Column column) {
  switch (column) {
    case Column::N: return "N";
    case Column::Omega: return "omega";
    case Column::Lambda: return "lambda";
    case Column::Gamma: return "gamma";
    case Column::BigGamma: return "Gamma";
    case Column::GammaSink: return "Gamma_s";
    case Column::EtaQ: return "eta_Q";
    case Column::EtaC: return "eta_C";
    case Column::EtaDiff: return "eta_diff";
    case Column::IntegratedCoherence: return "I";
    case Column::ScaledIntegratedCoherence: return "I_ns";
    case Column::MaxCoherence: return "C_max";
    case Column::MaxCoherenceTime: return "t_Cmax";
    case Column::IntersectionTime: return "tau";
    case Column::LambdaQc: return "lambda_qc";
    case Column::Residual: return "residual";
    case Column::Converged: return "converged";
  }
  return "";
}

std::vector<Column> summary_columns() {
  return {Column::N, Column::Omega, Column::Lambda, Column::Gamma, Column::BigGamma,
          Column::GammaSink, Column::EtaQ, Column::EtaC, Column::EtaDiff,
          Column::IntegratedCoherence, Column::MaxCoherence, Column::MaxCoherenceTime,
          Column::IntersectionTime, Column::Converged};
}

std::vector<Column> lambda_qc_columns() {
  return {Column::N, Column::Omega, Column::Gamma, Column::BigGamma, Column::GammaSink,
          Column::LambdaQc, Column::Residual, Column::Converged};
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows,
               const std::vector<Column>& columns, double integralScale) {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << column_name(columns[c]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << cell(row, columns[c], integralScale);
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,p_sink,coherence\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i)
    out << format_number(trajectory.times[i]) << ',' << format_number(trajectory.sinkPopulation[i])
        << ',' << format_number(trajectory.coherence[i]) << '\n';
}

// ---------------------------------------------------------------------------

std::string to_string(FigureId id) {
  return "fig" + std::to_string(static_cast<int>(id) + 2);
}

std::vector<FigureId> all_figures() {
  return {FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5,
          FigureId::Fig6, FigureId::Fig7, FigureId::Fig8, FigureId::Fig9};
}

std::optional<FigureId> parse_figure_id(std::string_view name) {
  for (auto id : all_figures()) {
    const std::string canonical = to_string(id);
    if (name == canonical) return id;
    if (name.size() == canonical.size() && (name[0] == 'F') && name.substr(1) == canonical.substr(1))
      return id;
  }
  return std::nullopt;
}

std::vector<Column> figure_columns(FigureId id) {
  switch (id) {
    case FigureId::Fig2:
      return {};
    case FigureId::Fig3:
      return {Column::Lambda, Column::MaxCoherence, Column::IntersectionTime, Column::Converged};
    case FigureId::Fig4:
      return {Column::Lambda, Column::MaxCoherence, Column::MaxCoherenceTime, Column::Converged};
    case FigureId::Fig5:
      return {Column::Gamma, Column::Lambda, Column::EtaQ, Column::EtaC, Column::EtaDiff, Column::Converged};
    case FigureId::Fig6:
      return {Column::BigGamma, Column::Gamma, Column::LambdaQc, Column::Residual, Column::Converged};
    case FigureId::Fig7:
      return {Column::Lambda, Column::Gamma, Column::IntegratedCoherence, Column::EtaQ, Column::EtaC,
              Column::EtaDiff, Column::Converged};
    case FigureId::Fig8:
      return {Column::N, Column::Lambda, Column::Gamma, Column::EtaQ, Column::EtaC,
              Column::IntegratedCoherence, Column::EtaDiff, Column::Converged};
    case FigureId::Fig9:
      return {Column::Lambda, Column::Gamma, Column::ScaledIntegratedCoherence, Column::EtaQ,
              Column::EtaC, Column::EtaDiff, Column::Converged};
  }
  return {};
}

FigurePreset figure_preset(FigureId id) {
  FigurePreset preset;
  preset.id = id;
  preset.columns = figure_columns(id);
  SweepPlan& plan = preset.plan;
  plan.base.N = 3;
  plan.base.bigGamma = 0.5;
  plan.base.gamma = 0.25;
  plan.base.gammaSink = 1.0;
  const std::vector<double> couplings{0.5, 1.0, 1.5, 3.0};
  const std::vector<double> dephasing{0.25, 0.5, 0.75, 1.0};

  switch (id) {
    case FigureId::Fig2: {
      const LambdaQcResult root = find_lambda_qc(plan.base, 0.1, 2.0, 1e-3, preset.controls);
      plan.axes = {{SweepParameter::Lambda, {root.lambda, 1.0, 1.5, 3.0}}};
      break;
    }
    case FigureId::Fig3:
      plan.axes = {{SweepParameter::Lambda, linspace(0.85, 3.0, 30)}};
      break;
    case FigureId::Fig4:
      plan.axes = {{SweepParameter::Lambda, linspace(0.1, 3.0, 30)}};
      break;
    case FigureId::Fig5:
      plan.axes = {{SweepParameter::Gamma, dephasing}, {SweepParameter::Lambda, linspace(0.1, 3.0, 30)}};
      break;
    case FigureId::Fig6:
      plan.output = SweepOutput::LambdaQc;
      plan.bracketLo = 0.1;
      plan.bracketHi = 10.0;
      plan.axes = {{SweepParameter::BigGamma, {0.5, 0.75, 1.0, 1.5}}, {SweepParameter::Gamma, dephasing}};
      break;
    case FigureId::Fig7:
      plan.axes = {{SweepParameter::Lambda, couplings}, {SweepParameter::Gamma, linspace(0.0, 2.0, 41)}};
      break;
    case FigureId::Fig8:
      plan.axes = {{SweepParameter::N, {2, 3, 4, 5}},
                   {SweepParameter::Lambda, couplings},
                   {SweepParameter::Gamma, linspace(0.0, 2.0, 41)}};
      break;
    case FigureId::Fig9:
      // Rates in MHz, so times come out in µs; I is reported in ns.
      plan.base.N = 2;
      plan.base.bigGamma = 5.0;
      plan.base.gammaSink = 10.0;
      plan.unitLabel = "MHz";
      preset.timeUnit = "us";
      preset.integralUnit = "ns";
      preset.integralScale = 1000.0;
      plan.axes = {{SweepParameter::Lambda, {2.5, 5.0, 10.0, 15.0}},
                   {SweepParameter::Gamma, linspace(0.0, 20.0, 41)}};
      break;
  }
  return preset;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string reproduce_fig2(const FigurePreset& preset, const std::filesystem::path& outDir,
                           ReproduceResult& result) {
  std::string data = "lambda,t,p_q,p_c,coherence\n";
  const auto& panels = preset.plan.axes.at(0).values;
  for (std::size_t k = 0; k < panels.size(); ++k) {
    ChainSpec spec = preset.plan.base;
    spec.lambda = panels[k];
    const auto [quantum, classical] = propagate_pair(spec, preset.controls, preset.plan.representation);
    std::string panel = "t,p_q,p_c,coherence\n";
    for (std::size_t i = 0; i < quantum.times.size(); ++i) {
      const std::string line = format_number(quantum.times[i]) + ',' +
                               format_number(quantum.sinkPopulation[i]) + ',' +
                               format_number(classical.sinkPopulation[i]) + ',' +
                               format_number(quantum.coherence[i]) + '\n';
      panel += line;
      data += format_number(spec.lambda) + ',' + line;
      ++result.rows;
    }
    const auto path = outDir / ("fig2_panel" + std::to_string(k + 1) + ".csv");
    write_text(path, panel);
    result.files.push_back(path);
  }
  return data;
}

}  // namespace

ReproduceResult reproduce_figure(const FigurePreset& preset, const std::filesystem::path& outDir,
                                 unsigned workers) {
  std::error_code ec;
  std::filesystem::create_directories(outDir, ec);
  if (ec) throw std::runtime_error("cannot create " + outDir.string() + ": " + ec.message());

  ReproduceResult result;
  const std::string id = to_string(preset.id);
  std::string data;
  if (preset.id == FigureId::Fig2) {
    data = reproduce_fig2(preset, outDir, result);
  } else {
    const auto rows = run_sweep(preset.plan, preset.controls, workers);
    std::ostringstream out;
    write_csv(out, rows, preset.columns, preset.integralScale);
    data = out.str();
    result.rows = rows.size();
  }
  const auto dataPath = outDir / (id + "_data.csv");
  write_text(dataPath, data);
  const auto metaPath = outDir / (id + "_meta.json");
  write_text(metaPath, preset_to_json(preset).dump(2) + "\n");
  result.files.insert(result.files.begin(), {dataPath, metaPath});
  return result;
}

}  // namespace sinkchain
