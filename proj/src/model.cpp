#include "sinkchain/model.hpp"

#include <cmath>
#include <vector>


namespace sinkchain {

namespace {

void require_finite_non_negative(double value, const char* name) {
  if (!std::isfinite(value))
    throw ParameterError(name, std::string(name) + " must be finite");
  if (value < 0.0)
    throw ParameterError(name, std::string(name) + " must be non-negative (got " +
                                   std::to_string(value) + ")");
}

OperatorMatrix site_op(const LocalOperator& local, int site, int nSystems) {
  return embed_site_op(local, SiteIndex{site}, nSystems);
}

// Σ_j γ (σ_j^z ρ σ_j^z − ρ) is the Hadamard product D ∘ ρ with
// D_ab = γ Σ_j (z_j(a) z_j(b) − 1), z_j = ±1 the σ_j^z eigenvalue of basis state a.
Eigen::MatrixXd full_space_dephasing_mask(const ChainSpec& spec) {
  const int nSystems = spec.N + 1;
  const auto dim = static_cast<Eigen::Index>(full_space_dimension(nSystems));
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(dim, dim);
  for (int site = 1; site <= spec.N; ++site) {
    const int bit = nSystems - site;
    for (Eigen::Index a = 0; a < dim; ++a) {
      const double za = ((a >> bit) & 1) ? 1.0 : -1.0;
      for (Eigen::Index b = 0; b < dim; ++b) {
        const double zb = ((b >> bit) & 1) ? 1.0 : -1.0;
        mask(a, b) += spec.gamma * (za * zb - 1.0);
      }
    }
  }
  return mask;
}

// Nonzero entries of a constant operator; every operator here has O(dim)
// nonzeros, so products are evaluated entry by entry.
struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

std::vector<Entry> nonzeros(const OperatorMatrix& m) {
  std::vector<Entry> entries;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != Complex(0.0, 0.0)) entries.push_back({r, c, m(r, c)});
  return entries;
}

struct WeightedJump {
  std::vector<Entry> entries;
  double weight;
};

Generator make_full_space_generator(const ChainSpec& spec, const OperatorMatrix& hamiltonian,
                                    const std::vector<std::pair<OperatorMatrix, double>>& jumps) {
  const auto dim = hamiltonian.rows();
  std::vector<WeightedJump> weighted;
  OperatorMatrix decay = OperatorMatrix::Zero(dim, dim);
  for (const auto& [jump, rate] : jumps) {
    const double weight = dissipator_weight(rate, spec.convention);
    if (weight == 0.0) continue;
    decay += weight * jump.adjoint() * jump;
    weighted.push_back({nonzeros(jump), weight});
  }
  // −i[H, ρ] − {K, ρ} = −i (H_eff ρ − ρ H_eff†) with H_eff = H − iK.
  const std::vector<Entry> effective = nonzeros(hamiltonian - Complex(0.0, 1.0) * decay);
  const Eigen::MatrixXcd dephasing = full_space_dephasing_mask(spec).cast<Complex>();
  const Complex i(0.0, 1.0);

  auto rhs = [=](const DensityState& rho) {
    const OperatorMatrix& m = rho.matrix;
    DensityState out;
    out.representation = Representation::FullSpace;
    out.matrix = (dephasing.array() * m.array()).matrix();
    for (const auto& e : effective) {
      out.matrix.row(e.row) -= (i * e.value) * m.row(e.col);
      out.matrix.col(e.row) += (i * std::conj(e.value)) * m.col(e.col);
    }
    // 2w J ρ J†: entry (a, b) collects J_ac ρ_cd conj(J_bd).
    for (const auto& term : weighted)
      for (const auto& left : term.entries)
        for (const auto& right : term.entries)
          out.matrix(left.row, right.row) +=
              (2.0 * term.weight) * left.value * std::conj(right.value) * m(left.col, right.col);
    return out;
  };
  return Generator(spec, Representation::FullSpace, std::move(rhs));
}

std::vector<std::pair<OperatorMatrix, double>> local_noise_and_sink_jumps(const ChainSpec& spec) {
  std::vector<std::pair<OperatorMatrix, double>> jumps;
  for (int site = 1; site <= spec.N; ++site)
    jumps.emplace_back(site_op(sigma_plus(), site, spec.N + 1), spec.bigGamma);
  jumps.emplace_back(sink_jump_operator(spec.N), spec.gammaSink);
  return jumps;
}

}  // namespace

void validate(const ChainSpec& spec) {
  if (spec.N < 1) throw ParameterError("N", "N must be >= 1 (got " + std::to_string(spec.N) + ")");
  // A full-space index must fit in the address space; reduced runs go further.
  if (spec.N > 60) throw ParameterError("N", "N must be <= 60");
  require_finite_non_negative(spec.omega, "omega");
  require_finite_non_negative(spec.lambda, "lambda");
  require_finite_non_negative(spec.bigGamma, "Gamma");
  require_finite_non_negative(spec.gamma, "gamma");
  require_finite_non_negative(spec.gammaSink, "Gamma_s");
  if (spec.gammaSink == 0.0) throw ParameterError("Gamma_s", "Gamma_s must be strictly positive");
}

std::string to_string(Scenario scenario) {
  return scenario == Scenario::Quantum ? "quantum" : "classical";
}

std::string to_string(RateConvention convention) {
  return convention == RateConvention::Population ? "population" : "doubled";
}

std::string to_string(Representation representation) {
  return representation == Representation::FullSpace ? "full" : "reduced";
}

DensityState Generator::apply(const DensityState& rho) const {
  if (rho.representation != representation_)
    throw DimensionError("generator applied to a state in the wrong representation");
  const auto expected = representation_ == Representation::FullSpace
                            ? static_cast<Eigen::Index>(full_space_dimension(spec_.N + 1))
                            : static_cast<Eigen::Index>(spec_.N + 1);
  if (rho.matrix.rows() != expected || rho.matrix.cols() != expected)
    throw DimensionError("state dimension " + std::to_string(rho.matrix.rows()) +
                         " does not match generator dimension " + std::to_string(expected));
  return rhs_(rho);
}

OperatorMatrix build_free_hamiltonian(const ChainSpec& spec) {
  validate(spec);
  const int nSystems = spec.N + 1;
  const auto dim = static_cast<Eigen::Index>(full_space_dimension(nSystems));
  OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
  for (int site = 1; site <= spec.N; ++site)
    h += (spec.omega / 2.0) * site_op(sigma_z(), site, nSystems);
  return h;
}

OperatorMatrix build_hamiltonian(const ChainSpec& spec) {
  OperatorMatrix h = build_free_hamiltonian(spec);
  const int nSystems = spec.N + 1;
  for (int site = 1; site < spec.N; ++site) {
    h += spec.lambda * (site_op(sigma_plus(), site, nSystems) * site_op(sigma_minus(), site + 1, nSystems) +
                        site_op(sigma_minus(), site, nSystems) * site_op(sigma_plus(), site + 1, nSystems));
  }
  return h;
}

OperatorMatrix dissipator(const OperatorMatrix& jump, double rate, const OperatorMatrix& rho) {
  if (jump.rows() != jump.cols() || rho.rows() != rho.cols() || jump.rows() != rho.rows())
    throw DimensionError("dissipator: jump " + std::to_string(jump.rows()) + "x" +
                         std::to_string(jump.cols()) + " vs state " + std::to_string(rho.rows()) +
                         "x" + std::to_string(rho.cols()));
  const OperatorMatrix jj = jump.adjoint() * jump;
  return rate * (2.0 * jump * rho * jump.adjoint() - jj * rho - rho * jj);
}

OperatorMatrix hop_jump_operator(int nSites, int from, int to) {
  const int nSystems = nSites + 1;
  if (std::abs(from - to) != 1)
    throw IndexError("hop_jump_operator: sites must be nearest neighbours");
  return site_op(sigma_plus(), from, nSystems) * site_op(sigma_minus(), to, nSystems);
}

OperatorMatrix sink_jump_operator(int nSites) {
  return hop_jump_operator(nSites, nSites, nSites + 1);
}

Generator build_quantum_generator(const ChainSpec& spec) {
  validate(spec);
  if (spec.scenario != Scenario::Quantum)
    throw std::invalid_argument("build_quantum_generator: spec.scenario must be Quantum");
  return make_full_space_generator(spec, build_hamiltonian(spec), local_noise_and_sink_jumps(spec));
}

Generator build_classical_generator(const ChainSpec& spec) {
  validate(spec);
  if (spec.scenario != Scenario::Classical)
    throw std::invalid_argument("build_classical_generator: spec.scenario must be Classical");
  auto jumps = local_noise_and_sink_jumps(spec);
  for (int site = 1; site < spec.N; ++site) {
    jumps.emplace_back(hop_jump_operator(spec.N, site + 1, site), spec.lambda);  // L_R
    jumps.emplace_back(hop_jump_operator(spec.N, site, site + 1), spec.lambda);  // L_L
  }
  return make_full_space_generator(spec, build_free_hamiltonian(spec), jumps);
}

// Block basis: index k < N is the excitation on site k + 1, index N the sink.
Generator build_reduced_generator(const ChainSpec& spec) {
  validate(spec);
  const int n = spec.N;
  const Eigen::Index dim = n + 1;
  const bool classical = spec.scenario == Scenario::Classical;
  const double wLoss = dissipator_weight(spec.bigGamma, spec.convention);
  const double wSink = dissipator_weight(spec.gammaSink, spec.convention);
  const double wHop = classical ? dissipator_weight(spec.lambda, spec.convention) : 0.0;

  OperatorMatrix hamiltonian = OperatorMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < n; ++k) hamiltonian(k, k) = spec.omega * (2 - n) / 2.0;
  hamiltonian(n, n) = -spec.omega * n / 2.0;
  if (!classical) {
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      hamiltonian(k, k + 1) = spec.lambda;
      hamiltonian(k + 1, k) = spec.lambda;
    }
  }

  // Anti-commutator rates: local loss everywhere on the chain, sink transfer
  // out of site N, and classical hops out of each site towards its neighbours.
  Eigen::VectorXd decay = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index k = 0; k < n; ++k) {
    decay(k) = wLoss;
    if (k > 0) decay(k) += wHop;
    if (k + 1 < n) decay(k) += wHop;
  }
  decay(n - 1) += wSink;
  const OperatorMatrix effective =
      hamiltonian - Complex(0.0, 1.0) * decay.cast<Complex>().asDiagonal().toDenseMatrix();
  const OperatorMatrix effectiveAdjoint = effective.adjoint();

  // Dephasing on the one-excitation block: σ_j^z has eigenvalue +1 on the
  // state excited at j and −1 on every other one-excitation state (sink included).
  Eigen::MatrixXd dephasing = Eigen::MatrixXd::Zero(dim, dim);
  for (int site = 0; site < n; ++site) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      const double za = a == site ? 1.0 : -1.0;
      for (Eigen::Index b = 0; b < dim; ++b) {
        const double zb = b == site ? 1.0 : -1.0;
        dephasing(a, b) += spec.gamma * (za * zb - 1.0);
      }
    }
  }
  const Eigen::MatrixXcd dephasingComplex = dephasing.cast<Complex>();
  const Complex minusI(0.0, -1.0);

  auto rhs = [=](const DensityState& rho) {
    const OperatorMatrix& block = rho.matrix;
    DensityState out;
    out.representation = Representation::ReducedSingleExcitation;
    out.matrix = minusI * (effective * block - block * effectiveAdjoint);
    out.matrix += (dephasingComplex.array() * block.array()).matrix();
    out.matrix(n, n) += 2.0 * wSink * block(n - 1, n - 1).real();
    if (wHop != 0.0) {
      for (Eigen::Index k = 0; k < n; ++k) {
        double inflow = 0.0;
        if (k > 0) inflow += block(k - 1, k - 1).real();
        if (k + 1 < n) inflow += block(k + 1, k + 1).real();
        out.matrix(k, k) += 2.0 * wHop * inflow;
      }
    }
    out.vacuumPopulation = 2.0 * wLoss * block.diagonal().head(n).real().sum();
    return out;
  };
  return Generator(spec, Representation::ReducedSingleExcitation, std::move(rhs));
}

Generator build_generator(const ChainSpec& spec, Representation representation) {
  if (representation == Representation::ReducedSingleExcitation) return build_reduced_generator(spec);
  return spec.scenario == Scenario::Quantum ? build_quantum_generator(spec)
                                            : build_classical_generator(spec);
}

}  // namespace sinkchain
