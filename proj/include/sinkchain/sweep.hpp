#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sinkchain/analysis.hpp"

namespace sinkchain {

enum class SweepParameter { Lambda, Gamma, BigGamma, GammaSink, N };

enum class SweepOutput {
  Summary,   // one RunSummary per grid point
  LambdaQc,  // λ_QC per grid point (the λ axis, if any, is ignored)
};

struct SweepAxis {
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<double> values;
};

struct SweepPlan {
  ChainSpec base;
  std::vector<SweepAxis> axes;  // first axis varies slowest
  SweepOutput output = SweepOutput::Summary;
  double bracketLo = 0.1;
  double bracketHi = 10.0;
  double lambdaTol = 1e-3;
  std::string unitLabel = "a.u.";
  std::size_t maxPoints = 10'000;
  Representation representation = Representation::ReducedSingleExcitation;
};

std::string to_string(SweepParameter parameter);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name);

/// `count` evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

void validate(const SweepPlan& plan);
std::size_t grid_size(const SweepPlan& plan);
ChainSpec grid_point(const SweepPlan& plan, std::size_t index);

struct SweepRow {
  std::size_t index = 0;
  ChainSpec spec;
  RunSummary summary;
  std::optional<LambdaQcResult> lambdaQc;
  bool failed = false;
  std::string error;
};

/// Evaluates every grid point on `workers` threads. Rows come back in grid
/// order; a failing point becomes a row with converged = false.
std::vector<SweepRow> run_sweep(const SweepPlan& plan, const PropagationControls& controls,
                                unsigned workers = 1);

enum class Column {
  N, Omega, Lambda, Gamma, BigGamma, GammaSink,
  EtaQ, EtaC, EtaDiff, IntegratedCoherence, ScaledIntegratedCoherence,
  MaxCoherence, MaxCoherenceTime, IntersectionTime,
  LambdaQc, Residual, Converged,
};

std::string column_name(Column column);

/// N,omega,lambda,gamma,Gamma,Gamma_s,eta_Q,eta_C,eta_diff,I,C_max,t_Cmax,tau,converged
std::vector<Column> summary_columns();
/// N,omega,gamma,Gamma,Gamma_s,lambda_qc,residual,converged
std::vector<Column> lambda_qc_columns();

/// Writes an LF-terminated CSV with a header row. Numbers use the shortest
/// round-trip decimal form; an absent τ is an empty field.
/// `integralScale` multiplies the ScaledIntegratedCoherence column.
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows,
               const std::vector<Column>& columns, double integralScale = 1.0);

/// Trajectory CSV: t,p_sink,coherence.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

std::string format_number(double value);

// ---------------------------------------------------------------------------
// Figure presets.

enum class FigureId { Fig2, Fig3, Fig4, Fig5, Fig6, Fig7, Fig8, Fig9 };

std::string to_string(FigureId id);
std::optional<FigureId> parse_figure_id(std::string_view name);
std::vector<FigureId> all_figures();

struct FigurePreset {
  FigureId id = FigureId::Fig2;
  SweepPlan plan;
  PropagationControls controls;
  std::vector<Column> columns;
  double integralScale = 1.0;  // I column unit conversion
  std::string timeUnit = "a.u.";
  std::string integralUnit = "a.u.";
};

/// Parameters of each figure. Fig2 resolves its first panel coupling with
/// find_lambda_qc, the others are plain tables.
FigurePreset figure_preset(FigureId id);

/// Columns written for a figure id.
std::vector<Column> figure_columns(FigureId id);

struct ReproduceResult {
  std::vector<std::filesystem::path> files;
  std::size_t rows = 0;
};

/// Writes `<id>_data.csv` and `<id>_meta.json` into `outDir` (created if
/// needed). Fig2 additionally writes one trajectory file per panel.
ReproduceResult reproduce_figure(const FigurePreset& preset, const std::filesystem::path& outDir,
                                 unsigned workers = 1);

}  // namespace sinkchain
