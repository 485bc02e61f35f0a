#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "scramble/dynamics.hpp"
#include "scramble/operators.hpp"

using namespace scramble;
using namespace scramble::operators;
using namespace scramble::dynamics;

namespace {

RegularizedDOS two_level_dos(double e0, double e1, double f_beta = 1.0) {
  RegularizedDOS dos;
  dos.energies.resize(2);
  dos.weights.resize(2);
  dos.energies << e0, e1;
  dos.weights << 0.5, 0.5;
  dos.beta = 0.0;
  dos.f_beta = f_beta;
  return dos;
}

struct TestSystem {
  SubsystemSplit split;
  Spectrum spectrum;
  DensityOperator rho_env;
  double f_beta;
  RegularizedDOS dos;
};

TestSystem make_system(int n_s, int n_e, double beta, std::uint64_t seed) {
  TestSystem sys;
  sys.split = SubsystemSplit::qubits(n_s, n_e);
  sys.spectrum = eigendecompose(sample_gue(sys.split.d, seed));
  sys.rho_env = thermal_state(sample_gue(sys.split.d_e, seed + 1000), beta);
  sys.f_beta = fidelity_inf(sys.rho_env);
  sys.dos = regularized_dos(sys.spectrum, embed_env(sys.rho_env.sqrt(), sys.split), sys.split,
                            beta, sys.f_beta);
  return sys;
}

}  // namespace

TEST_CASE("return probability anchors") {
  TestSystem sys = make_system(2, 3, 1.0, 7);
  BlockEvolver evolver(sys.spectrum, sys.rho_env.sqrt(), sys.split);
  CHECK(std::abs(evolver.return_probability(0.0) - 1.0) < 1e-12);

  // no interaction: H = 1_S ⊗ H_E leaves every projector invariant
  SubsystemSplit split = SubsystemSplit::qubits(2, 2);
  Matrix h_env = sample_gue(split.d_e, 3);
  Spectrum spec = eigendecompose(embed_env(h_env, split));
  DensityOperator rho = thermal_state(h_env, 0.7);
  BlockEvolver free_evolver(spec, rho.sqrt(), split);
  for (double t : {0.3, 1.7, 9.2}) CHECK(free_evolver.return_probability(t) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("block formula matches direct density-matrix evolution") {
  TestSystem sys = make_system(1, 3, 1.0, 11);
  BlockEvolver evolver(sys.spectrum, sys.rho_env.sqrt(), sys.split);
  for (double t : {0.0, 0.5, 2.5, 7.0, 19.0}) {
    double direct = oracles::return_probability_direct(sys.spectrum, sys.rho_env.entries,
                                                       sys.split, t);
    CHECK(std::abs(evolver.return_probability(t) - direct) < 1e-10);
  }
}

TEST_CASE("mean reduced purity") {
  SUBCASE("pure environment at t = 0") {
    SubsystemSplit split = SubsystemSplit::qubits(2, 2);
    Matrix h_env = sample_gue(split.d_e, 5);
    Spectrum spec = eigendecompose(sample_gue(split.d, 6));
    DensityOperator rho = ground_state(h_env);
    auto [purity, s2] = mean_reduced_purity(spec, rho.sqrt(), split, 0.0);
    CHECK(purity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(s2) < 1e-10);
  }

  SUBCASE("swap evolution leaves maximally mixed reduced states") {
    SubsystemSplit split = SubsystemSplit::qubits(1, 1);
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = 1.0;
    swap(1, 2) = swap(2, 1) = 1.0;
    Spectrum spec = eigendecompose(swap);
    DensityOperator rho = maximally_mixed(2);
    // exp(-i (pi/2) SWAP) = -i SWAP up to a global phase
    auto [purity, s2] = mean_reduced_purity(spec, rho.sqrt(), split, std::numbers::pi / 2.0);
    CHECK(purity == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(s2 == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  }

  SUBCASE("purity dominates the squared return probability") {
    TestSystem sys = make_system(2, 2, 1.0, 13);
    BlockEvolver evolver(sys.spectrum, sys.rho_env.sqrt(), sys.split);
    for (double t : {0.5, 1.0, 3.0, 8.0}) {
      auto [purity, s2] = evolver.mean_reduced_purity(t);
      double ps = evolver.return_probability(t);
      CHECK(purity >= ps * ps - 1e-9);
      double direct = oracles::mean_purity_direct(sys.spectrum, sys.rho_env.entries, sys.split, t);
      CHECK(std::abs(purity - direct) < 1e-10);
    }
  }
}

TEST_CASE("regularized SFF") {
  TestSystem sys = make_system(2, 3, 0.5, 17);
  CHECK(std::abs(regularized_sff(sys.dos, 0.0) - sys.f_beta * sys.f_beta) < 1e-12);

  SUBCASE("two levels at infinite temperature") {
    const double omega = 1.7;
    RegularizedDOS dos = two_level_dos(0.0, omega);
    for (double t : {0.0, 0.4, 2.9}) {
      double expected = std::pow(std::cos(omega * t / 2.0), 2);
      CHECK(regularized_sff(dos, t) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("beta = 0 reduces to the unregularized SFF") {
    SubsystemSplit split = SubsystemSplit::qubits(2, 2);
    Spectrum spec = eigendecompose(sample_gue(split.d, 19));
    DensityOperator rho = maximally_mixed(split.d_e);
    RegularizedDOS dos = regularized_dos(spec, embed_env(rho.sqrt(), split), split, 0.0, 1.0);
    for (double t : {0.9, 4.2}) {
      Complex tr = 0.0;
      for (Index n = 0; n < split.d; ++n) tr += std::polar(1.0, -spec.energies(n) * t);
      double expected = std::norm(tr) / (static_cast<double>(split.d) * split.d);
      CHECK(regularized_sff(dos, t) == doctest::Approx(expected).epsilon(1e-11));
    }
  }
}

TEST_CASE("generalized SFF") {
  std::vector<Complex> identity_trace{Complex(8.0, 0.0)};
  CHECK(generalized_sff(identity_trace, 8) == doctest::Approx(1.0));

  std::vector<Complex> two{Complex(8.0, 0.0), Complex(0.0, 0.0)};
  CHECK(generalized_sff(two, 8) == doctest::Approx(1.0));

  std::vector<Complex> empty;
  CHECK_THROWS_AS(generalized_sff(empty, 4), std::invalid_argument);

  // the single Kraus trace D_E^{1/2} Tr(e^{-iHt} rho_emb^{1/2}) reproduces K_beta
  TestSystem sys = make_system(2, 2, 1.0, 23);
  Matrix embedded = embed_env(sys.rho_env.sqrt(), sys.split);
  for (double t : {0.8, 3.1}) {
    Matrix u = oracles::evolution_operator(sys.spectrum, t);
    Complex tr = (u * embedded).trace() * std::sqrt(static_cast<double>(sys.split.d_e));
    std::vector<Complex> traces{tr};
    CHECK(generalized_sff(traces, sys.split.d) ==
          doctest::Approx(regularized_sff(sys.dos, t)).epsilon(1e-10));
  }
}

TEST_CASE("characteristic function") {
  TestSystem sys = make_system(2, 3, 1.0, 29);
  CHECK(std::abs(char_function(sys.dos, 0.0, 0.0) - Complex(1.0, 0.0)) < 1e-12);

  RegularizedDOS pm = two_level_dos(-1.0, 1.0);
  for (double t : {0.2, 1.3, 4.4})
    CHECK(char_function(pm, t, 0.0).real() == doctest::Approx(std::cos(t)).epsilon(1e-12));

  SUBCASE("ridge property against random complex times") {
    std::mt19937_64 rng(31);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 100; ++i) {
      double t = -20.0 + 40.0 * uniform();
      double tau = -1.0 + 2.0 * uniform();
      double lhs = std::abs(char_function(sys.dos, t, tau));
      double rhs = std::abs(char_function(sys.dos, 0.0, tau));
      CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
    }
  }

  SUBCASE("overflow guard") {
    RegularizedDOS wide = two_level_dos(-1000.0, 1000.0);
    CHECK_THROWS_AS(char_function(wide, 0.0, 2.0), std::range_error);
  }
}

TEST_CASE("partition function") {
  RegularizedDOS pm = two_level_dos(-1.0, 1.0);
  CHECK(partition_function(pm, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (double tau : {-0.8, 0.3, 1.9})
    CHECK(partition_function(pm, tau) == doctest::Approx(std::cosh(tau)).epsilon(1e-13));
  CHECK(std::exp(log_partition_function(pm, 1.9)) ==
        doctest::Approx(std::cosh(1.9)).epsilon(1e-12));

  SUBCASE("canonical environment at tau = -beta/2") {
    // Eq.-17 regime: joint H = 1 ⊗ H_E with the free energy shifted out so
    // Tr exp(-beta H_E) = 1, plus a weak interaction
    const double beta = 1.0;
    SubsystemSplit split = SubsystemSplit::qubits(1, 3);
    Matrix h_env = sample_gue(split.d_e, 37);
    Spectrum env_spec = eigendecompose(h_env);
    double z_env = 0.0;
    for (Index i = 0; i < split.d_e; ++i) z_env += std::exp(-beta * env_spec.energies(i));
    Matrix h_shifted = h_env + (std::log(z_env) / beta) * Matrix::Identity(split.d_e, split.d_e);

    DensityOperator rho = thermal_state(h_shifted, beta);
    double f = fidelity_inf(rho);
    double target = std::sqrt(static_cast<double>(split.d_e)) / f;

    for (double coupling : {0.0, 0.05}) {
      Matrix h = embed_env(h_shifted, split) + coupling * sample_gue(split.d, 38);
      Spectrum spec = eigendecompose(h);
      RegularizedDOS dos = regularized_dos(spec, embed_env(rho.sqrt(), split), split, beta, f);
      double z_half = partition_function(dos, -beta / 2.0);
      CHECK(std::abs(z_half / target - 1.0) < 0.2);
    }
  }
}

TEST_CASE("half-order environment entropy") {
  CHECK(renyi_half_env(maximally_mixed(8)) == doctest::Approx(std::log(8.0)).epsilon(1e-12));

  Matrix h = sample_gue(8, 41);
  CHECK(std::abs(renyi_half_env(ground_state(h))) < 1e-10);

  RealVector p(2);
  p << 0.9, 0.1;
  CHECK(renyi_half_env(diagonal_state(p)) == doctest::Approx(0.4700036292457356).epsilon(1e-12));

  // consistency with the fidelity
  DensityOperator rho = thermal_state(h, 1.4);
  double f = fidelity_inf(rho);
  CHECK(renyi_half_env(rho) ==
        doctest::Approx(2.0 * std::log(std::sqrt(8.0) * f)).epsilon(1e-12));
}

TEST_CASE("sweeps") {
  SUBCASE("free Hamiltonian return probability is flat") {
    SubsystemSplit split = SubsystemSplit::qubits(1, 2);
    Matrix h_env = sample_gue(split.d_e, 43);
    Spectrum spec = eigendecompose(embed_env(h_env, split));
    DensityOperator rho = thermal_state(h_env, 0.5);
    BlockEvolver evolver(spec, rho.sqrt(), split);
    SignalTrace trace = sweep_return_probability(evolver, TimeGrid{0.0, 10.0, 3});
    for (double v : trace.real_values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }

  TestSystem sys = make_system(2, 3, 1.0, 47);
  TimeGrid grid{0.0, 20.0, 101};

  SUBCASE("K sweep starts at f^2") {
    SignalTrace k = sweep_regularized_sff(sys.dos, grid);
    CHECK(std::abs(k.values[0].real() - sys.f_beta * sys.f_beta) < 1e-12);
  }

  SUBCASE("|N~|^2 sweep matches K/f^2 pointwise") {
    SignalTrace k = sweep_regularized_sff(sys.dos, grid);
    SignalTrace c = sweep_char_magnitude_sq(sys.dos, grid);
    const double f_sq = sys.f_beta * sys.f_beta;
    for (int i = 0; i < grid.points; ++i)
      CHECK(std::abs(k.values[i].real() - f_sq * c.values[i].real()) < 1e-12);
  }

  SUBCASE("speed limit and purity bound along the grid") {
    BlockEvolver evolver(sys.spectrum, sys.rho_env.sqrt(), sys.split);
    SignalTrace ps = sweep_return_probability(evolver, grid);
    SignalTrace k = sweep_regularized_sff(sys.dos, grid);
    auto [purity, renyi] = sweep_purity(evolver, grid);
    auto ps_v = ps.real_values();
    auto k_v = k.real_values();
    auto pur_v = purity.real_values();
    for (int i = 0; i < grid.points; ++i) {
      CHECK(ps_v[i] >= k_v[i] - 1e-9);
      CHECK(pur_v[i] >= ps_v[i] * ps_v[i] - 1e-9);
    }
  }
}

TEST_CASE("sweep attaches the offending time to errors") {
  TimeGrid grid{0.0, 4.0, 5};
  try {
    sweep(grid, "boom", [](double t) -> Complex {
      if (t >= 3.0) throw std::runtime_error("inner failure");
      return Complex(1.0, 0.0);
    });
    FAIL("expected sweep to rethrow");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("t = 3") != std::string::npos);
    CHECK(msg.find("inner failure") != std::string::npos);
  }
}

TEST_CASE("block formula matches direct evolution at d = 32") {
  TestSystem sys = make_system(2, 3, 1.0, 7);
  BlockEvolver evolver(sys.spectrum, sys.rho_env.sqrt(), sys.split);
  for (double t : {0.4, 2.5, 11.0}) {
    double direct = oracles::return_probability_direct(sys.spectrum, sys.rho_env.entries,
                                                       sys.split, t);
    CHECK(std::abs(evolver.return_probability(t) - direct) < 1e-10);
  }
}
