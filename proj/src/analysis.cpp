#include "sinkchain/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sinkchain {

double relative_entropy_of_coherence(const DensityState& rho, double negativityTol) {
  const auto dim = rho.matrix.rows();
  const bool reduced = rho.representation == Representation::ReducedSingleExcitation;
  Eigen::VectorXd diagonal(dim + (reduced ? 1 : 0));
  diagonal.head(dim) = rho.matrix.diagonal().real();
  if (reduced) diagonal(dim) = rho.vacuumPopulation;

  const double diagonalEntropy = spectrum_entropy(diagonal, negativityTol);
  bool offDiagonalFree = true;
  for (Eigen::Index j = 0; j < dim && offDiagonalFree; ++j)
    for (Eigen::Index i = 0; i < dim; ++i)
      if (i != j && rho.matrix(i, j) != Complex(0.0, 0.0)) {
        offDiagonalFree = false;
        break;
      }
  if (offDiagonalFree) return 0.0;
  const double stateEntropy = spectrum_entropy(state_spectrum(rho), negativityTol);
  return std::max(0.0, diagonalEntropy - stateEntropy);
}

IntegratedCoherence integrated_coherence(const Trajectory& traj) {
  if (!traj.converged)
    throw NotConvergedError("integrated_coherence: trajectory did not converge");
  IntegratedCoherence result;
  result.value = trapezoid(traj.times, traj.coherence);
  result.truncationWarning = !traj.coherence.empty() && traj.coherence.back() > 10.0 * traj.steadyEps;
  return result;
}

CoherencePeak max_coherence(const Trajectory& traj) {
  CoherencePeak peak;
  for (std::size_t i = 0; i < traj.coherence.size(); ++i) {
    if (traj.coherence[i] > peak.value) {
      peak.value = traj.coherence[i];
      peak.time = traj.times[i];
    }
  }
  return peak;
}

std::optional<double> intersection_time(const Trajectory& quantum, const Trajectory& classical) {
  const auto& times = quantum.times;
  if (times.size() != classical.times.size() || times.empty())
    throw GridError("intersection_time: trajectories have different sample counts");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - classical.times[i]) > 1e-12 * std::max(1.0, std::abs(times[i])))
      throw GridError("intersection_time: trajectories were recorded on different time grids");

  auto gap = [&](std::size_t i) { return quantum.sinkPopulation[i] - classical.sinkPopulation[i]; };
  const std::size_t last = times.size() - 1;
  if (!(gap(last) > 0.0)) return std::nullopt;

  std::size_t lastNonPositive = last;
  while (lastNonPositive > 0 && gap(lastNonPositive) > 0.0) --lastNonPositive;
  if (gap(lastNonPositive) > 0.0) return times.front();  // positive from the very first sample

  // Bisection on the linear interpolant between the bracketing samples.
  const double t0 = times[lastNonPositive];
  const double t1 = times[lastNonPositive + 1];
  const double d0 = gap(lastNonPositive);
  const double d1 = gap(lastNonPositive + 1);
  auto interpolant = [&](double t) { return d0 + (d1 - d0) * (t - t0) / (t1 - t0); };
  double lo = t0;
  double hi = t1;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (interpolant(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

Trajectory propagate_tagged(const ChainSpec& spec, const PropagationControls& controls,
                            Representation representation) {
  try {
    const Generator gen = build_generator(spec, representation);
    return propagate(gen, initial_state(spec, representation), controls);
  } catch (const IntegratorError& e) {
    throw IntegratorError(to_string(spec.scenario) + " scenario: " + e.what());
  }
}

}  // namespace

std::pair<Trajectory, Trajectory> propagate_pair(const ChainSpec& spec,
                                                 const PropagationControls& controls,
                                                 Representation representation) {
  validate(spec);
  PropagationControls shared = controls;
  // Both scenarios must sample the same grid.
  if (!shared.recordEvery) shared.recordEvery = default_record_interval(spec);

  const ChainSpec quantumSpec = with_scenario(spec, Scenario::Quantum);
  const ChainSpec classicalSpec = with_scenario(spec, Scenario::Classical);
  Trajectory quantum = propagate_tagged(quantumSpec, shared, representation);
  Trajectory classical = propagate_tagged(classicalSpec, shared, representation);
  if (!shared.tMax && quantum.terminationTime != classical.terminationTime) {
    PropagationControls extended = shared;
    extended.tMax = std::max(quantum.terminationTime, classical.terminationTime);
    if (quantum.terminationTime < classical.terminationTime)
      quantum = propagate_tagged(quantumSpec, extended, representation);
    else
      classical = propagate_tagged(classicalSpec, extended, representation);
  }
  return {std::move(quantum), std::move(classical)};
}

RunSummary summarize(const ChainSpec& spec, const Trajectory& quantum, const Trajectory& classical) {
  RunSummary summary;
  summary.spec = spec;
  summary.converged = quantum.converged && classical.converged;
  if (summary.converged) {
    const EfficiencyReport q = efficiency(quantum);
    const EfficiencyReport c = efficiency(classical);
    summary.etaQ = q.eta;
    summary.etaC = c.eta;
    summary.fluxDiscrepancyQ = q.discrepancy;
    summary.fluxDiscrepancyC = c.discrepancy;
    const IntegratedCoherence integral = integrated_coherence(quantum);
    summary.integratedCoherence = integral.value;
    summary.coherenceTailWarning = integral.truncationWarning;
  } else {
    summary.etaQ = quantum.sinkPopulation.back();
    summary.etaC = classical.sinkPopulation.back();
    summary.integratedCoherence = trapezoid(quantum.times, quantum.coherence);
    summary.coherenceTailWarning = true;
  }
  summary.etaDiff = summary.etaQ - summary.etaC;
  const CoherencePeak peak = max_coherence(quantum);
  summary.maxCoherence = peak.value;
  summary.maxCoherenceTime = peak.time;
  summary.intersectionTime = intersection_time(quantum, classical);
  summary.terminationTime = quantum.terminationTime;
  return summary;
}

RunSummary run_point(const ChainSpec& spec, const PropagationControls& controls,
                     Representation representation) {
  const auto [quantum, classical] = propagate_pair(spec, controls, representation);
  return summarize(spec, quantum, classical);
}

LambdaQcResult find_lambda_qc(const ChainSpec& spec, double lo, double hi, double tol,
                              const PropagationControls& controls, Representation representation) {
  if (!(tol > 0.0)) throw ParameterError("tol", "tol must be positive");
  if (!(lo >= 0.0) || !(hi > lo)) throw ParameterError("bracket", "bracket must satisfy 0 <= lo < hi");

  LambdaQcResult result;
  auto f = [&](double lambda) {
    ChainSpec point = spec;
    point.lambda = lambda;
    result.evaluations.push_back(run_point(point, controls, representation));
    return result.evaluations.back().etaDiff;
  };

  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0 && fb == 0.0)
    throw BracketError("eta_Q - eta_C vanishes at both bracket ends; no isolated crossing");
  if (fa * fb > 0.0)
    throw BracketError("eta_Q - eta_C has the same sign at lambda = " + std::to_string(lo) +
                       " and " + std::to_string(hi) + "; try a wider bracket");
  if (fa == 0.0) {
    result.lambda = a;
    return result;
  }

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iteration = 0; iteration < 200; ++iteration) {
    if (fb * fc > 0.0) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
    const double half = 0.5 * (c - b);
    if (std::abs(half) <= tol1 || fb == 0.0) break;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points differ.
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * half * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * half * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, half);
    fb = f(b);
  }
  result.lambda = b;
  result.residual = std::abs(fb);
  return result;
}

}  // namespace sinkchain
