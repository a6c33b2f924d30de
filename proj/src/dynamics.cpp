#include "sinkchain/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "sinkchain/analysis.hpp"
#include "sinkchain/integrator.hpp"

namespace sinkchain {

namespace {

// Eigenvalues below this during propagation mean the integration broke down.
constexpr double kIntegratorNegativityTol = 1e-6;

int systems_in(const DensityState& rho) {
  return std::countr_zero(static_cast<unsigned long long>(rho.matrix.rows()));
}

Eigen::VectorXcd pack(const DensityState& rho) {
  const auto n = rho.matrix.size();
  const bool reduced = rho.representation == Representation::ReducedSingleExcitation;
  Eigen::VectorXcd y(n + (reduced ? 1 : 0));
  y.head(n) = Eigen::Map<const Eigen::VectorXcd>(rho.matrix.data(), n);
  if (reduced) y(n) = rho.vacuumPopulation;
  return y;
}

DensityState unpack(const Eigen::VectorXcd& y, Representation representation, Eigen::Index dim) {
  DensityState rho;
  rho.representation = representation;
  rho.matrix = Eigen::Map<const OperatorMatrix>(y.data(), dim, dim);
  if (representation == Representation::ReducedSingleExcitation)
    rho.vacuumPopulation = y(dim * dim).real();
  return rho;
}

}  // namespace

void validate(const PropagationControls& c) {
  if (!(c.dtInitial > 0.0)) throw ParameterError("dt_initial", "dt_initial must be positive");
  if (!(c.relTol > 0.0)) throw ParameterError("rel_tol", "rel_tol must be positive");
  if (!(c.absTol > 0.0)) throw ParameterError("abs_tol", "abs_tol must be positive");
  if (!(c.steadyEps > 0.0)) throw ParameterError("steady_eps", "steady_eps must be positive");
  if (c.tMax && !(*c.tMax > 0.0 && std::isfinite(*c.tMax)))
    throw ParameterError("t_max", "t_max must be positive and finite");
  if (c.recordEvery && !(*c.recordEvery > 0.0 && std::isfinite(*c.recordEvery)))
    throw ParameterError("record_every", "record_every must be positive");
  if (c.tMax && c.recordEvery && *c.recordEvery > *c.tMax)
    throw ParameterError("record_every", "record_every must not exceed t_max");
  if (c.autoSampleCap < 2) throw ParameterError("auto_sample_cap", "auto_sample_cap must be >= 2");
}

double default_record_interval(const ChainSpec& spec) {
  // Sum of the rates bounds the fastest decay; keeps the trapezoid flux
  // integral well inside 1e-5 of the sink population.
  const double scale = population_rate(1.0, spec.convention);
  return 0.01 / (scale * (spec.lambda + spec.bigGamma + spec.gammaSink) + spec.gamma);
}

double sink_population(const DensityState& rho) {
  if (rho.representation == Representation::ReducedSingleExcitation) {
    const auto sink = rho.matrix.rows() - 1;
    return rho.matrix(sink, sink).real();
  }
  // The sink is the fastest index: odd basis states have it excited.
  double total = 0.0;
  for (Eigen::Index i = 1; i < rho.matrix.rows(); i += 2) total += rho.matrix(i, i).real();
  return total;
}

double site_population(const DensityState& rho, SiteIndex site) {
  if (rho.representation == Representation::ReducedSingleExcitation) {
    if (site.value < 1 || site.value > rho.matrix.rows())
      throw IndexError("site_population: site out of range");
    return rho.matrix(site.value - 1, site.value - 1).real();
  }
  const int nSystems = systems_in(rho);
  if (site.value < 1 || site.value > nSystems) throw IndexError("site_population: site out of range");
  const int bit = nSystems - site.value;
  double total = 0.0;
  for (Eigen::Index i = 0; i < rho.matrix.rows(); ++i)
    if ((i >> bit) & 1) total += rho.matrix(i, i).real();
  return total;
}

double chain_excitation(const DensityState& rho) {
  if (rho.representation == Representation::ReducedSingleExcitation) {
    const auto n = rho.matrix.rows() - 1;
    return rho.matrix.diagonal().head(n).real().sum();
  }
  const int nSystems = systems_in(rho);
  double total = 0.0;
  for (int site = 1; site < nSystems; ++site) total += site_population(rho, SiteIndex{site});
  return total;
}

double trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw GridError("trapezoid: size mismatch");
  double total = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    total += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
  return total;
}

Trajectory propagate(const Generator& gen, const DensityState& state0,
                     const PropagationControls& controls) {
  validate(controls);
  if (state0.representation != gen.representation())
    throw DimensionError("propagate: initial state representation does not match generator");
  validate_state(state0);

  const ChainSpec& spec = gen.spec();
  const int lastSite = spec.N;
  const Representation representation = gen.representation();
  const Eigen::Index dim = state0.matrix.rows();

  Trajectory traj;
  traj.scenario = spec.scenario;
  traj.recordEvery = controls.recordEvery.value_or(default_record_interval(spec));
  traj.steadyEps = controls.steadyEps;
  traj.sinkTransferRate = gen.sink_transfer_rate();

  auto record = [&](double t, const DensityState& rho) {
    double coherence = 0.0;
    try {
      coherence = relative_entropy_of_coherence(rho, kIntegratorNegativityTol);
    } catch (const PositivityError& e) {
      throw IntegratorError("propagation lost positivity at t = " + std::to_string(t) + ": " + e.what());
    }
    traj.times.push_back(t);
    traj.sinkPopulation.push_back(sink_population(rho));
    traj.lastSitePopulation.push_back(site_population(rho, SiteIndex{lastSite}));
    traj.chainExcitation.push_back(chain_excitation(rho));
    traj.coherence.push_back(coherence);
    if (controls.keepStates) traj.states.push_back(rho);
  };

  auto rhs = [&](const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) {
    dydt = pack(gen.apply(unpack(y, representation, dim)));
  };
  DormandPrince45 stepper(rhs, controls.relTol, controls.absTol,
                          std::min(controls.dtInitial, traj.recordEvery));

  Eigen::VectorXcd y = pack(state0);
  double t = 0.0;
  DensityState current = state0;
  record(t, current);

  const double tolerance = 1e-9 * traj.recordEvery;
  for (std::size_t k = 1;; ++k) {
    double target = static_cast<double>(k) * traj.recordEvery;
    const bool finalSample = controls.tMax && target >= *controls.tMax - tolerance;
    if (finalSample) target = *controls.tMax;
    try {
      stepper.advance(t, target, y);
    } catch (const std::runtime_error& e) {
      throw IntegratorError(std::string("propagation failed: ") + e.what());
    }
    t = target;
    current = unpack(y, representation, dim);
    record(t, current);

    const bool steady = traj.chainExcitation.back() <= controls.steadyEps;
    if (finalSample) {
      traj.converged = steady;
      break;
    }
    if (!controls.tMax && steady) {
      traj.converged = true;
      break;
    }
    if (!controls.tMax && traj.times.size() >= controls.autoSampleCap) {
      traj.converged = false;
      break;
    }
  }
  traj.finalState = std::move(current);
  traj.terminationTime = t;
  return traj;
}

EfficiencyReport efficiency(const Trajectory& traj) {
  if (!traj.converged || traj.times.empty())
    throw NotConvergedError("efficiency: trajectory did not reach the steady-state threshold");
  EfficiencyReport report;
  report.eta = traj.sinkPopulation.back();
  report.fluxEta = traj.sinkTransferRate * trapezoid(traj.times, traj.lastSitePopulation);
  report.discrepancy = std::abs(report.eta - report.fluxEta);
  return report;
}

}  // namespace sinkchain
