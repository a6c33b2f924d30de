#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sinkchain/model.hpp"

namespace sinkchain {

struct PropagationControls {
  double dtInitial = 1e-3;
  double relTol = 1e-8;
  double absTol = 1e-10;
  // Empty: run until the chain excitation drops to steadyEps ("auto").
  std::optional<double> tMax;
  double steadyEps = 1e-7;
  // Empty: default_record_interval(spec).
  std::optional<double> recordEvery;
  // Hard stop for auto runs that never reach steadyEps (e.g. Γ = λ = 0).
  std::size_t autoSampleCap = 1'000'000;
  // Keep every recorded state in Trajectory::states.
  bool keepStates = false;
};

/// Throws ParameterError on non-positive tolerances or intervals.
void validate(const PropagationControls& controls);

/// 0.01 / (r_λ + r_Γ + r_Γs + γ) with r_x the population rate of x under the
/// spec's convention. ω is excluded: no recorded observable depends on it.
double default_record_interval(const ChainSpec& spec);

// Observables sampled on the fixed grid t_k = k · recordEvery (the last
// sample sits exactly on tMax for finite-horizon runs).
struct Trajectory {
  Scenario scenario = Scenario::Quantum;
  std::vector<double> times;
  std::vector<double> sinkPopulation;
  std::vector<double> lastSitePopulation;  // ρ_NN
  std::vector<double> chainExcitation;     // Σ_j ρ_jj over the chain
  std::vector<double> coherence;           // relative entropy of coherence, nats
  std::vector<DensityState> states;        // only with keepStates
  DensityState finalState;
  bool converged = false;
  double terminationTime = 0.0;
  double recordEvery = 0.0;
  double steadyEps = 0.0;
  double sinkTransferRate = 0.0;  // population rate ρ_NN → sink
};

/// Integrates dρ/dt = gen.apply(ρ) with Dormand–Prince 5(4).
/// Throws IntegratorError if a recorded state has an eigenvalue below −1e-6.
Trajectory propagate(const Generator& gen, const DensityState& state0,
                     const PropagationControls& controls);

/// Tr[ρ |e><e|_s].
double sink_population(const DensityState& rho);

/// Population of chain site `site` (1-based).
double site_population(const DensityState& rho, SiteIndex site);

/// Total excitation left on the chain (sink excluded).
double chain_excitation(const DensityState& rho);

struct EfficiencyReport {
  double eta = 0.0;
  // r_sink ∫ ρ_NN dt by the trapezoid rule on the recorded grid.
  double fluxEta = 0.0;
  double discrepancy = 0.0;
};

/// Final sink population of a converged trajectory, cross-checked against
/// the flux integral. Throws NotConvergedError otherwise.
EfficiencyReport efficiency(const Trajectory& trajectory);

/// Trapezoid rule over a sampled function.
double trapezoid(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace sinkchain
