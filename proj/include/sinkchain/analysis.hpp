#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sinkchain/dynamics.hpp"

namespace sinkchain {

/// C(ρ) = S(ρ_diag) − S(ρ) in the product eigenbasis of H_F (sink included).
/// For the reduced form the vacuum population is one more diagonal entry.
double relative_entropy_of_coherence(const DensityState& rho, double negativityTol = 1e-9);

struct IntegratedCoherence {
  double value = 0.0;
  // Last recorded coherence exceeds 10 · steadyEps: the tail was cut off.
  bool truncationWarning = false;
};

/// I = ∫ C(ρ(t)) dt over [0, terminationTime]. Throws NotConvergedError.
IntegratedCoherence integrated_coherence(const Trajectory& trajectory);

struct CoherencePeak {
  double value = 0.0;
  double time = 0.0;
};

/// Global maximum of the recorded coherence, earliest time on ties.
CoherencePeak max_coherence(const Trajectory& trajectory);

/// Time after which P_Q(t) − P_C(t) stays strictly positive up to the end of
/// the record, located on the linear interpolant to 1e-6. Empty if the
/// difference is not positive at the last sample. Throws GridError when the
/// trajectories were not recorded on the same grid.
std::optional<double> intersection_time(const Trajectory& quantum, const Trajectory& classical);

struct RunSummary {
  ChainSpec spec;  // scenario field is not meaningful here
  double etaQ = 0.0;
  double etaC = 0.0;
  double etaDiff = 0.0;
  double integratedCoherence = 0.0;
  double maxCoherence = 0.0;
  double maxCoherenceTime = 0.0;
  std::optional<double> intersectionTime;
  bool converged = false;
  // Diagnostics.
  double fluxDiscrepancyQ = 0.0;
  double fluxDiscrepancyC = 0.0;
  bool coherenceTailWarning = false;
  double terminationTime = 0.0;
};

/// Quantum and classical trajectories from initial_state on one shared grid.
/// In auto mode both are run to the later of their two convergence times.
std::pair<Trajectory, Trajectory> propagate_pair(
    const ChainSpec& spec, const PropagationControls& controls,
    Representation representation = Representation::ReducedSingleExcitation);

/// All quantifiers at one parameter point (spec.scenario is ignored).
RunSummary run_point(const ChainSpec& spec, const PropagationControls& controls,
                     Representation representation = Representation::ReducedSingleExcitation);

/// Same quantifiers from an already propagated pair.
RunSummary summarize(const ChainSpec& spec, const Trajectory& quantum, const Trajectory& classical);

struct LambdaQcResult {
  double lambda = 0.0;
  double residual = 0.0;  // |η_Q − η_C| at `lambda`
  std::vector<RunSummary> evaluations;
};

/// Root of η_Q(λ) − η_C(λ) inside [lo, hi] by Brent's method, to an interval
/// no wider than `tol`. Throws BracketError without a strict sign change.
LambdaQcResult find_lambda_qc(const ChainSpec& spec, double lo, double hi, double tol,
                              const PropagationControls& controls,
                              Representation representation = Representation::ReducedSingleExcitation);

}  // namespace sinkchain
