#include "sinkchain/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sinkchain {

DensityState initial_state(int nSites, Representation representation) {
  if (nSites < 1) throw ParameterError("N", "N must be >= 1");
  DensityState rho;
  rho.representation = representation;
  if (representation == Representation::FullSpace) {
    const auto dim = static_cast<Eigen::Index>(full_space_dimension(nSites + 1));
    // Site 1 is the most significant bit.
    const Eigen::Index index = dim / 2;
    rho.matrix = OperatorMatrix::Zero(dim, dim);
    rho.matrix(index, index) = 1.0;
  } else {
    rho.matrix = OperatorMatrix::Zero(nSites + 1, nSites + 1);
    rho.matrix(0, 0) = 1.0;
  }
  return rho;
}

double total_trace(const DensityState& rho) {
  double trace = rho.matrix.trace().real();
  if (rho.representation == Representation::ReducedSingleExcitation)
    trace += rho.vacuumPopulation;
  return trace;
}

Eigen::VectorXd state_spectrum(const DensityState& rho) {
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(rho.matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("state_spectrum: eigen decomposition failed");
  Eigen::VectorXd values = solver.eigenvalues();
  if (rho.representation == Representation::ReducedSingleExcitation) {
    values.conservativeResize(values.size() + 1);
    values(values.size() - 1) = rho.vacuumPopulation;
    std::sort(values.begin(), values.end());
  }
  return values;
}

double spectrum_entropy(const Eigen::Ref<const Eigen::VectorXd>& spectrum,
                        double negativityTol) {
  double entropy = 0.0;
  for (const double value : spectrum) {
    if (value < -negativityTol)
      throw PositivityError("eigenvalue " + std::to_string(value) +
                            " below negativity tolerance");
    const double p = std::clamp(value, 0.0, 1.0);
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return entropy;
}

double von_neumann_entropy(const DensityState& rho, double negativityTol) {
  return spectrum_entropy(state_spectrum(rho), negativityTol);
}

void validate_state(const DensityState& rho) {
  const auto rows = rho.matrix.rows();
  if (rows == 0 || rows != rho.matrix.cols())
    throw DimensionError("density matrix must be square and non-empty");
  if (rho.representation == Representation::FullSpace && (rows & (rows - 1)) != 0)
    throw DimensionError("full-space density matrix dimension must be a power of two");
  if (std::abs(total_trace(rho) - 1.0) > 1e-9)
    throw std::domain_error("density state trace differs from 1");
  if (hermiticity_error(rho.matrix) > 1e-12)
    throw std::domain_error("density state is not Hermitian");
  if (state_spectrum(rho).minCoeff() < -1e-9)
    throw PositivityError("density state has a negative eigenvalue");
}

}  // namespace sinkchain
