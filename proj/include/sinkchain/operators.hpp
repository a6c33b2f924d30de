#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "sinkchain/errors.hpp"

namespace sinkchain {

using Complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;
using LocalOperator = Eigen::Matrix2cd;

// Composite basis: site 1 ⊗ site 2 ⊗ … ⊗ site N ⊗ sink. Site 1 is the slowest
// index and the sink the fastest; every two-level factor is ordered (|g>, |e>).
// A basis index therefore encodes site j's excitation in bit (nSystems - j).

enum class Representation { FullSpace, ReducedSingleExcitation };

// 1-based label of a two-level system; N + 1 is the sink.
struct SiteIndex {
  int value = 1;
};

// A density matrix tagged with its representation.
//
// FullSpace: `matrix` is 2^(N+1) square and `vacuumPopulation` is unused (0).
// ReducedSingleExcitation: `matrix` is the (N+1)-square one-excitation block
// (excitation on site 1..N, then on the sink) and the ground state |g…g> is
// carried as the scalar `vacuumPopulation`. Vacuum/one-excitation coherences
// are identically zero for every generator in this library, so the pair is
// an exact encoding of the full state.
//
// The struct is also used for generator outputs (time derivatives), where the
// state invariants do not apply.
struct DensityState {
  Representation representation = Representation::FullSpace;
  OperatorMatrix matrix;
  double vacuumPopulation = 0.0;
};

inline std::size_t full_space_dimension(int nSystems) {
  return std::size_t{1} << nSystems;
}

/// |e><g|. The transport model writes this operator as sigma^-; in the usual
/// physics convention it is the raising operator sigma^+.
inline LocalOperator sigma_minus() {
  LocalOperator m = LocalOperator::Zero();
  m(1, 0) = 1.0;
  return m;
}

/// |g><e| = sigma_minus()^dagger, the operator that removes an excitation.
inline LocalOperator sigma_plus() {
  LocalOperator m = LocalOperator::Zero();
  m(0, 1) = 1.0;
  return m;
}

/// Pauli z in (|g>, |e>) order: diag(-1, +1).
inline LocalOperator sigma_z() {
  LocalOperator m = LocalOperator::Zero();
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}

/// |e><e|.
inline LocalOperator excited_projector() {
  LocalOperator m = LocalOperator::Zero();
  m(1, 1) = 1.0;
  return m;
}

/// I ⊗ … ⊗ local ⊗ … ⊗ I with `local` acting on `site` (1-based) of
/// `nSystems` two-level factors.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
embed_site_op(const Eigen::MatrixBase<Derived>& local, SiteIndex site, int nSystems) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (nSystems < 1) throw IndexError("embed_site_op: nSystems must be >= 1");
  if (site.value < 1 || site.value > nSystems)
    throw IndexError("embed_site_op: site " + std::to_string(site.value) +
                     " outside [1, " + std::to_string(nSystems) + "]");
  if (local.rows() != 2 || local.cols() != 2)
    throw DimensionError("embed_site_op: local operator must be 2x2");

  const auto left = static_cast<Eigen::Index>(full_space_dimension(site.value - 1));
  const auto right = static_cast<Eigen::Index>(full_space_dimension(nSystems - site.value));
  const Dense inner = Eigen::kroneckerProduct(Dense(local), Dense::Identity(right, right));
  return Eigen::kroneckerProduct(Dense::Identity(left, left), inner);
}

/// max |M - M^dagger|.
template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// One excitation on site 1, everything else (sink included) in |g>.
DensityState initial_state(int nSites, Representation representation = Representation::FullSpace);

/// Total trace, vacuum included for the reduced form.
double total_trace(const DensityState& rho);

/// Spectrum of the full state (for the reduced form: block eigenvalues plus
/// the vacuum population), ascending.
Eigen::VectorXd state_spectrum(const DensityState& rho);

/// -sum p ln p over a spectrum, 0 ln 0 := 0. Entries in [-negativityTol, 0)
/// are clamped to 0; anything more negative throws PositivityError.
double spectrum_entropy(const Eigen::Ref<const Eigen::VectorXd>& spectrum,
                        double negativityTol = 1e-9);

/// S(rho) = -Tr rho ln rho in nats.
double von_neumann_entropy(const DensityState& rho, double negativityTol = 1e-9);

/// Throws if rho violates the trace, Hermiticity or positivity invariants.
void validate_state(const DensityState& rho);

}  // namespace sinkchain
