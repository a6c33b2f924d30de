#pragma once

#include <functional>
#include <string>

#include "sinkchain/operators.hpp"

namespace sinkchain {

enum class Scenario { Quantum, Classical };

// How the Lindblad rates Γ, Γ_s and the classical hopping λ are read.
//
// Population: a jump J with rate r contributes r (J ρ J† − ½{J†J, ρ}), so r
//   is the population transfer rate. Default; with it N = 3, Γ = 0.5,
//   γ = 0.25, Γ_s = 1 gives λ_QC ≈ 0.84 and C_max ≈ 0.22 there.
// Doubled: the literal form r (2 J ρ J† − {J†J, ρ}); population moves at 2r.
//
// Dephasing is γ (σ^z ρ σ^z − ρ) under both conventions.
enum class RateConvention { Population, Doubled };

struct ChainSpec {
  int N = 3;
  double omega = 0.0;
  double lambda = 0.0;
  double bigGamma = 0.0;
  double gamma = 0.0;
  double gammaSink = 1.0;
  Scenario scenario = Scenario::Quantum;
  RateConvention convention = RateConvention::Population;
};

/// Throws ParameterError naming the first invalid field.
void validate(const ChainSpec& spec);

inline ChainSpec with_scenario(ChainSpec spec, Scenario scenario) {
  spec.scenario = scenario;
  return spec;
}

inline DensityState initial_state(const ChainSpec& spec,
                                  Representation representation = Representation::FullSpace) {
  return initial_state(spec.N, representation);
}

/// Prefactor k such that a jump of nominal `rate` enters as k (2JρJ† − {J†J, ρ}).
inline double dissipator_weight(double rate, RateConvention convention) {
  return convention == RateConvention::Doubled ? rate : 0.5 * rate;
}

/// Rate at which population moves through a jump of nominal `rate`.
inline double population_rate(double rate, RateConvention convention) {
  return 2.0 * dissipator_weight(rate, convention);
}

std::string to_string(Scenario scenario);
std::string to_string(RateConvention convention);
std::string to_string(Representation representation);

// Right-hand side of a master equation, bound to one representation.
// Immutable after construction; apply() may be called concurrently.
class Generator {
 public:
  using Rhs = std::function<DensityState(const DensityState&)>;

  Generator(ChainSpec spec, Representation representation, Rhs rhs)
      : spec_(spec), representation_(representation), rhs_(std::move(rhs)) {}

  DensityState apply(const DensityState& rho) const;

  const ChainSpec& spec() const { return spec_; }
  Representation representation() const { return representation_; }

  /// Population transfer rate from site N into the sink.
  double sink_transfer_rate() const {
    return population_rate(spec_.gammaSink, spec_.convention);
  }

 private:
  ChainSpec spec_;
  Representation representation_;
  Rhs rhs_;
};

/// H_F = (ω/2) Σ_j σ_j^z over the chain sites (identity on the sink).
OperatorMatrix build_free_hamiltonian(const ChainSpec& spec);

/// H_F + λ Σ_{j<N} (σ_j^+ σ_{j+1}^- + σ_j^- σ_{j+1}^+).
OperatorMatrix build_hamiltonian(const ChainSpec& spec);

/// rate · (2 J ρ J† − J†J ρ − ρ J†J).
OperatorMatrix dissipator(const OperatorMatrix& jump, double rate, const OperatorMatrix& rho);

/// Jump moving one excitation from site N into the sink: σ_N^+ σ_s^- in the
/// model's ladder notation, i.e. |g><e|_N ⊗ |e><g|_s.
OperatorMatrix sink_jump_operator(int nSites);

/// Jump moving one excitation from `from` to `to` (chain sites, |from − to| = 1).
OperatorMatrix hop_jump_operator(int nSites, int from, int to);

/// Quantum scenario, full space: −i[H, ρ] + L_sink(ρ) + Σ_j L_j(ρ).
Generator build_quantum_generator(const ChainSpec& spec);

/// Classical scenario, full space: −i[H_F, ρ] + λ(L_R + L_L)(ρ) + L_sink(ρ) + Σ_j L_j(ρ).
Generator build_classical_generator(const ChainSpec& spec);

/// Either scenario on the (N+1)-dimensional one-excitation block plus vacuum.
Generator build_reduced_generator(const ChainSpec& spec);

/// Dispatches on spec.scenario and `representation`.
Generator build_generator(const ChainSpec& spec, Representation representation);

}  // namespace sinkchain
