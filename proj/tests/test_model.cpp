#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "sinkchain/model.hpp"

using namespace sinkchain;

namespace {

double max_abs(const OperatorMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

DensityState full_state(const oracle::Matrix& m) {
  DensityState rho;
  rho.matrix = m;
  return rho;
}

// Random state with at most one excitation, in reduced form.
DensityState random_reduced(int n, std::mt19937& rng) {
  const oracle::Matrix m = oracle::random_density(n + 2, rng);
  DensityState rho;
  rho.representation = Representation::ReducedSingleExcitation;
  rho.matrix = m.topLeftCorner(n + 1, n + 1);
  rho.vacuumPopulation = m(n + 1, n + 1).real();
  return rho;
}

// Full-space index of the reduced basis element k (0..n-1 sites, n sink).
Eigen::Index full_index(int n, int k) {
  return k == n ? 1 : Eigen::Index{1} << (n - k);
}

OperatorMatrix lift(const DensityState& reduced, int n) {
  const auto dim = static_cast<Eigen::Index>(full_space_dimension(n + 1));
  OperatorMatrix out = OperatorMatrix::Zero(dim, dim);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b) out(full_index(n, a), full_index(n, b)) = reduced.matrix(a, b);
  out(0, 0) = reduced.vacuumPopulation;
  return out;
}

std::vector<ChainSpec> spec_variants(int n, std::mt19937& rng) {
  std::vector<ChainSpec> out;
  for (auto scenario : {Scenario::Quantum, Scenario::Classical})
    for (auto convention : {RateConvention::Population, RateConvention::Doubled}) {
      ChainSpec s = oracle::random_spec(n, rng);
      s.omega = 0.7;
      s.scenario = scenario;
      s.convention = convention;
      out.push_back(s);
    }
  return out;
}

}  // namespace

TEST_CASE("validate names the offending parameter") {
  auto name_of = [](ChainSpec s) {
    try {
      validate(s);
    } catch (const ParameterError& e) {
      return e.parameter();
    }
    return std::string();
  };
  ChainSpec ok;
  ok.lambda = 1.0;
  CHECK(name_of(ok).empty());
  ChainSpec s = ok;
  s.lambda = -1.0;
  CHECK(name_of(s) == "lambda");
  s = ok;
  s.bigGamma = -0.1;
  CHECK(name_of(s) == "Gamma");
  s = ok;
  s.gamma = std::numeric_limits<double>::infinity();
  CHECK(name_of(s) == "gamma");
  s = ok;
  s.gammaSink = 0.0;
  CHECK(name_of(s) == "Gamma_s");
  s = ok;
  s.N = 0;
  CHECK(name_of(s) == "N");
  s = ok;
  s.omega = std::nan("");
  CHECK(name_of(s) == "omega");
}

TEST_CASE("Hamiltonian examples") {
  ChainSpec one;
  one.N = 1;
  one.omega = 1.3;
  one.lambda = 5.0;
  const oracle::Matrix expected1 =
      oracle::kron((one.omega / 2.0) * oracle::pauli_z(), oracle::Matrix::Identity(2, 2));
  CHECK(max_abs(build_hamiltonian(one) - expected1) < 1e-15);

  ChainSpec dimer;
  dimer.N = 2;
  dimer.lambda = 1.0;
  oracle::Matrix chain = oracle::Matrix::Zero(4, 4);
  chain(1, 2) = chain(2, 1) = 1.0;  // |ge> <-> |eg>
  CHECK(max_abs(build_hamiltonian(dimer) - oracle::kron(chain, oracle::Matrix::Identity(2, 2))) < 1e-15);

  ChainSpec three;
  three.N = 3;
  three.omega = 1.0;
  three.lambda = 0.84;
  oracle::Matrix brute = oracle::Matrix::Zero(16, 16);
  for (int j = 1; j <= 3; ++j) brute += 0.5 * oracle::product_op(4, {{j, oracle::pauli_z()}});
  for (int j = 1; j <= 2; ++j)
    brute += 0.84 * (oracle::product_op(4, {{j, oracle::lower()}, {j + 1, oracle::raise()}}) +
                     oracle::product_op(4, {{j, oracle::raise()}, {j + 1, oracle::lower()}}));
  const OperatorMatrix h = build_hamiltonian(three);
  CHECK(max_abs(h - brute) < 1e-14);
  CHECK(hermiticity_error(h) < 1e-12);
  oracle::Matrix free = oracle::Matrix::Zero(16, 16);
  for (int j = 1; j <= 3; ++j) free += 0.5 * oracle::product_op(4, {{j, oracle::pauli_z()}});
  CHECK(max_abs(build_free_hamiltonian(three) - free) < 1e-15);
}

TEST_CASE("dissipator examples") {
  const OperatorMatrix j = oracle::lower();
  const OperatorMatrix excited = oracle::ket_bra(1, 1);
  const double rate = 0.7;
  const OperatorMatrix expected = 2.0 * rate * (oracle::ket_bra(0, 0) - oracle::ket_bra(1, 1));
  CHECK(max_abs(dissipator(j, rate, excited) - expected) < 1e-15);

  std::mt19937 rng(5);
  const oracle::Matrix rho = oracle::random_density(4, rng);
  CHECK(max_abs(dissipator(oracle::random_density(4, rng), 0.0, rho)) == 0.0);

  OperatorMatrix coherent = 0.5 * OperatorMatrix::Ones(2, 2);
  const Complex c = coherent(0, 1);
  const double gamma = 0.3;
  const OperatorMatrix d = dissipator(oracle::pauli_z(), gamma, coherent);
  CHECK(std::abs(d(0, 1) - (-4.0 * gamma * c)) < 1e-15);
  CHECK(std::abs(d(0, 0)) < 1e-15);

  CHECK_THROWS_AS(dissipator(OperatorMatrix::Identity(2, 2), 1.0, OperatorMatrix::Identity(4, 4)),
                  DimensionError);
}

TEST_CASE("jump operators move one excitation in the physical direction") {
  const OperatorMatrix sink = sink_jump_operator(2);
  // |g e g_s> (index 2) -> |g g e_s> (index 1)
  CHECK(sink(1, 2) == Complex(1.0));
  CHECK(max_abs(sink) == 1.0);
  CHECK(sink.cwiseAbs().sum() == doctest::Approx(2.0));  // also |e e g_s> -> |e g e_s>

  const OperatorMatrix hop = hop_jump_operator(2, 1, 2);
  CHECK(hop(2, 4) == Complex(1.0));  // |e g> -> |g e>
  CHECK_THROWS(hop_jump_operator(3, 1, 3));
}

TEST_CASE("full-space generators match the term-by-term oracle") {
  std::mt19937 rng(17);
  for (int n = 1; n <= 3; ++n)
    for (const ChainSpec& s : spec_variants(n, rng)) {
      const Generator gen = build_generator(s, Representation::FullSpace);
      const oracle::Matrix rho = oracle::random_density(Eigen::Index{1} << (n + 1), rng);
      const OperatorMatrix mine = gen.apply(full_state(rho)).matrix;
      CHECK(max_abs(mine - oracle::full_rhs(s, rho)) < 1e-12);
    }

  ChainSpec paper;
  paper.N = 3;
  paper.lambda = 0.84;
  paper.bigGamma = 0.5;
  paper.gamma = 0.25;
  paper.gammaSink = 1.0;
  for (auto convention : {RateConvention::Population, RateConvention::Doubled}) {
    paper.convention = convention;
    const OperatorMatrix mine = build_quantum_generator(paper).apply(initial_state(paper)).matrix;
    CHECK(max_abs(mine - oracle::full_rhs(paper, initial_state(paper).matrix)) < 1e-13);
  }
}

TEST_CASE("scenario-specific builders check their precondition") {
  ChainSpec s;
  s.scenario = Scenario::Classical;
  CHECK_THROWS(build_quantum_generator(s));
  s.scenario = Scenario::Quantum;
  CHECK_THROWS(build_classical_generator(s));
}

TEST_CASE("generators preserve trace and Hermiticity") {
  std::mt19937 rng(23);
  for (int n = 1; n <= 3; ++n)
    for (const ChainSpec& s : spec_variants(n, rng)) {
      const Generator full = build_generator(s, Representation::FullSpace);
      const DensityState rho = full_state(oracle::random_density(Eigen::Index{1} << (n + 1), rng));
      const DensityState d = full.apply(rho);
      CHECK(std::abs(d.matrix.trace()) < 1e-10);
      CHECK(hermiticity_error(d.matrix) < 1e-12);

      const Generator reduced = build_generator(s, Representation::ReducedSingleExcitation);
      const DensityState r = random_reduced(n, rng);
      const DensityState dr = reduced.apply(r);
      CHECK(std::abs(dr.matrix.trace() + dr.vacuumPopulation) < 1e-10);
      CHECK(hermiticity_error(dr.matrix) < 1e-12);
    }
}

TEST_CASE("reduced generator equals the full generator on the one-excitation sector") {
  std::mt19937 rng(29);
  for (int n = 1; n <= 4; ++n)
    for (const ChainSpec& s : spec_variants(n, rng)) {
      const DensityState r = random_reduced(n, rng);
      const DensityState dr = build_generator(s, Representation::ReducedSingleExcitation).apply(r);
      const OperatorMatrix df = build_generator(s, Representation::FullSpace).apply(full_state(lift(r, n))).matrix;
      CHECK(max_abs(df - lift(dr, n)) < 1e-12);
    }
}

TEST_CASE("dephasing decay of block coherences comes out of the oracle") {
  // Chain-chain coherences decay at 4γ and chain-sink coherences at 2γ.
  ChainSpec s;
  s.N = 2;
  s.gamma = 0.3;
  DensityState r;
  r.representation = Representation::ReducedSingleExcitation;
  r.matrix = OperatorMatrix::Zero(3, 3);
  r.matrix(0, 0) = r.matrix(1, 1) = r.matrix(2, 2) = 1.0 / 3.0;
  r.matrix(0, 1) = r.matrix(1, 0) = 0.1;
  r.matrix(1, 2) = r.matrix(2, 1) = 0.05;
  const DensityState dr = build_reduced_generator(s).apply(r);
  const oracle::Matrix df = oracle::full_rhs(s, lift(r, 2));
  CHECK(std::abs(dr.matrix(0, 1) - df(full_index(2, 0), full_index(2, 1))) < 1e-15);
  CHECK(std::abs(dr.matrix(1, 2) - df(full_index(2, 1), full_index(2, 2))) < 1e-15);
  // Sink loss also damps these entries; difference it out.
  ChainSpec clean = s;
  clean.gamma = 0.0;
  const DensityState d0 = build_reduced_generator(clean).apply(r);
  CHECK((dr.matrix(0, 1) - d0.matrix(0, 1)).real() == doctest::Approx(-4.0 * 0.3 * 0.1));
  CHECK((dr.matrix(1, 2) - d0.matrix(1, 2)).real() == doctest::Approx(-2.0 * 0.3 * 0.05));
}

TEST_CASE("generators never raise the excitation number") {
  std::mt19937 rng(31);
  const int n = 3;
  const auto dim = Eigen::Index{1} << (n + 1);
  auto excitations = [](Eigen::Index i) { return std::popcount(static_cast<unsigned>(i)); };
  for (const ChainSpec& s : spec_variants(n, rng)) {
    const Generator gen = build_generator(s, Representation::FullSpace);
    for (int k = 0; k <= n + 1; ++k) {
      // Random Hermitian input supported on sectors <= k.
      oracle::Matrix rho = oracle::random_density(dim, rng);
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
          if (excitations(i) > k || excitations(j) > k) rho(i, j) = 0.0;
      const OperatorMatrix d = gen.apply(full_state(rho / rho.trace())).matrix;
      double leak = 0.0;
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
          if (excitations(i) > k || excitations(j) > k) leak = std::max(leak, std::abs(d(i, j)));
      CHECK(leak == 0.0);
    }
  }
}

TEST_CASE("classical generator maps diagonal states to diagonal derivatives") {
  std::mt19937 rng(37);
  for (int n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 5; ++trial) {
      ChainSpec s = oracle::random_spec(n, rng);
      s.scenario = Scenario::Classical;
      s.omega = 2.0;
      const auto dim = Eigen::Index{1} << (n + 1);
      const oracle::Matrix diag = oracle::random_density(dim, rng).diagonal().asDiagonal();
      const OperatorMatrix d = build_classical_generator(s).apply(full_state(diag)).matrix;
      OperatorMatrix off = d;
      off.diagonal().setZero();
      CHECK(max_abs(off) <= 1e-14);

      DensityState r = random_reduced(n, rng);
      const OperatorMatrix keep = r.matrix.diagonal().asDiagonal();
      r.matrix = keep;
      OperatorMatrix offr = build_reduced_generator(s).apply(r).matrix;
      offr.diagonal().setZero();
      CHECK(max_abs(offr) <= 1e-14);
    }
}

TEST_CASE("at zero coupling the two scenarios agree on diagonal states") {
  std::mt19937 rng(41);
  ChainSpec s = oracle::random_spec(3, rng);
  s.lambda = 0.0;
  const oracle::Matrix diag = oracle::random_density(16, rng).diagonal().asDiagonal();
  const OperatorMatrix q = build_generator(with_scenario(s, Scenario::Quantum), Representation::FullSpace)
                               .apply(full_state(diag))
                               .matrix;
  const OperatorMatrix c = build_generator(with_scenario(s, Scenario::Classical), Representation::FullSpace)
                               .apply(full_state(diag))
                               .matrix;
  CHECK(max_abs(q - c) < 1e-15);
}

TEST_CASE("doubled convention: sink and hopping rates carry the factor 2") {
  ChainSpec s;
  s.N = 1;
  s.gammaSink = 0.8;
  s.convention = RateConvention::Doubled;
  const DensityState d = build_quantum_generator(s).apply(initial_state(s));
  CHECK(d.matrix(2, 2).real() == doctest::Approx(-2.0 * 0.8));
  CHECK(d.matrix(1, 1).real() == doctest::Approx(2.0 * 0.8));

  s.convention = RateConvention::Population;
  const DensityState p = build_quantum_generator(s).apply(initial_state(s));
  CHECK(p.matrix(2, 2).real() == doctest::Approx(-0.8));

  ChainSpec c;
  c.N = 2;
  c.lambda = 0.6;
  c.scenario = Scenario::Classical;
  c.convention = RateConvention::Doubled;
  const DensityState dc = build_reduced_generator(c).apply(initial_state(c, Representation::ReducedSingleExcitation));
  CHECK(dc.matrix(0, 0).real() == doctest::Approx(-2.0 * 0.6));
  CHECK(dc.matrix(1, 1).real() == doctest::Approx(2.0 * 0.6));
}

TEST_CASE("apply rejects states of the wrong shape") {
  ChainSpec s;
  s.N = 2;
  const Generator full = build_quantum_generator(s);
  CHECK_THROWS_AS(full.apply(initial_state(3)), DimensionError);
  CHECK_THROWS_AS(full.apply(initial_state(2, Representation::ReducedSingleExcitation)), DimensionError);
}
