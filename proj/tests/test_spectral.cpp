#include <complex>

#include "doctest.h"
#include "ehkit/spectral.hpp"

using namespace ehkit;

namespace {

bool holds_value_near(const std::vector<std::complex<double>>& values, std::complex<double> z,
                      double tol = 1e-8) {
  for (const auto& v : values)
    if (std::abs(v - z) <= tol) return true;
  return false;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("peripheral spectrum of the identity is eigenvalue 1 with full multiplicity") {
    const auto s = make_uniform_space(4);
    const auto p = ulam_operator(MapSystem::identity(), s);
    const auto peri = peripheral_spectrum(p, 1e-6);
    CHECK(peri.size() == 4);
    for (const auto& pair : peri) CHECK(std::abs(pair.value - 1.0) < 1e-9);
  }

  TEST_CASE("peripheral spectrum of the 3-cycle is the cube roots of unity") {
    const auto s = make_uniform_space(3);
    const auto p = ulam_operator(MapSystem::cyclic_shift(3), s);
    const auto peri = peripheral_spectrum(p, 1e-6);
    REQUIRE(peri.size() == 3);
    std::vector<std::complex<double>> vals;
    for (const auto& pair : peri) vals.push_back(pair.value);
    const double ang = 2.0 * 3.14159265358979323846 / 3.0;
    CHECK(holds_value_near(vals, {1.0, 0.0}));
    CHECK(holds_value_near(vals, std::polar(1.0, ang)));
    CHECK(holds_value_near(vals, std::polar(1.0, -ang)));
    // sorted by argument
    CHECK(std::arg(peri[0].value) <= std::arg(peri[1].value));
    CHECK(std::arg(peri[1].value) <= std::arg(peri[2].value));
  }

  TEST_CASE("dyadic ulam operator has a spectral gap") {
    const auto s = make_uniform_space(256);
    const auto p = ulam_operator(MapSystem::dyadic(), s, 1000, 5);
    const auto peri = peripheral_spectrum(p, 0.05);
    CHECK(peri.size() == 1);
    CHECK(std::abs(peri[0].value - 1.0) < 1e-6);
    CHECK_THROWS_AS(peripheral_spectrum(p, 0.0), InvalidArgument);
    CHECK_THROWS_AS(peripheral_spectrum(p, 1.0), InvalidArgument);
  }

  TEST_CASE("identity decomposition: four singleton components fixed by alpha") {
    const auto s = make_uniform_space(4);
    const auto p = ulam_operator(MapSystem::identity(), s);
    const auto d = extract_decomposition(p);
    CHECK(d.r == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(d.cell_sets[i] == std::vector<std::size_t>{i});
      CHECK(d.permutation[i] == i);
      CHECK(d.alpha_weights[i] == doctest::Approx(0.25));
    }
    CHECK(d.cycle_notation() == "(1)(2)(3)(4)");
    // remainder identically zero
    for (const auto& rs : d.remainder_decay)
      for (double v : rs.values) CHECK(v < 1e-12);
  }

  TEST_CASE("cyclic shift decomposition: one 3-cycle, zero remainder") {
    const auto s = make_uniform_space(3);
    const auto p = ulam_operator(MapSystem::cyclic_shift(3), s);
    const auto d = extract_decomposition(p);
    REQUIRE(d.r == 3);
    CHECK(d.cycles().size() == 1);
    // mass on cell 0 moves to cell 1: alpha sends component {0} to component {1}
    CHECK(d.permutation[0] == 1);
    CHECK(d.permutation[1] == 2);
    CHECK(d.permutation[2] == 0);
    for (const auto& rs : d.remainder_decay)
      for (double v : rs.values) CHECK(v < 1e-12);
    CHECK(holds_value_near(d.peripheral_values, std::polar(1.0, 2.0 * 3.141592653589793 / 3.0)));
  }

  TEST_CASE("dyadic decomposition: single component covering all cells") {
    const auto s = make_uniform_space(256);
    const auto p = ulam_operator(MapSystem::dyadic(), s, 1000, 5);
    const auto d = extract_decomposition(p);
    REQUIRE(d.r == 1);
    CHECK(d.cell_sets[0].size() == 256);
    CHECK(d.alpha_weights[0] == doctest::Approx(1.0));
    // remainder decays below 0.05 by n = 20 for every probe
    for (const auto& rs : d.remainder_decay) {
      REQUIRE(rs.values.size() >= 21);
      CHECK(rs.values[20] < 0.05);
    }
  }

  TEST_CASE("permutation powers follow the cycle") {
    const auto s = make_uniform_space(3);
    const auto p = ulam_operator(MapSystem::cyclic_shift(3), s);
    const auto d = extract_decomposition(p);
    const auto a2 = d.permutation_power(2);
    const auto a3 = d.permutation_power(3);
    const auto inv = d.permutation_power(-1);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a2[i] == d.permutation[d.permutation[i]]);
      CHECK(a3[i] == i);
      CHECK(d.permutation[inv[i]] == i);
    }
  }

  TEST_CASE("reconstruction equals iteration for exact permutations") {
    const auto s = make_uniform_space(6);
    const auto p = ulam_operator(MapSystem::rotation(1.0 / 6.0), s);
    const auto d = extract_decomposition(p);
    const Density f = Density::indicator(s, {2});
    for (std::size_t n = 0; n <= 100; ++n)
      CHECK(l1_distance(reconstruct_pnf(d, f, n), iterate(p, f, n)) < 1e-12);
  }

  TEST_CASE("reconstruction for the dyadic operator settles at uniform") {
    const auto s = make_uniform_space(128);
    const auto p = ulam_operator(MapSystem::dyadic(), s, 800, 23);
    const auto d = extract_decomposition(p);
    const Density f = Density::indicator(s, {7});
    const Density rec = reconstruct_pnf(d, f, 50);
    CHECK(l1_distance(rec, Density::uniform(s)) < 1e-10);
  }

  TEST_CASE("reconstruction under the identity averages cellwise") {
    const auto s = make_uniform_space(4);
    const auto p = ulam_operator(MapSystem::identity(), s);
    const auto d = extract_decomposition(p);
    Eigen::VectorXd fv(4);
    fv << 2.0, 0.5, 1.0, 0.5;
    const Density f(s, fv);
    const Density rec = reconstruct_pnf(d, f, 17);
    // singleton components reproduce f exactly
    CHECK(l1_distance(rec, f) < 1e-12);
  }

  TEST_CASE("matching consistency: P^n basis lands on alpha^n") {
    const auto s = make_uniform_space(8);
    const auto p = ulam_operator(MapSystem::rotation(1.0 / 8.0), s);
    const auto d = extract_decomposition(p);
    for (std::size_t n = 1; n <= 2 * d.r; ++n) {
      const auto an = d.permutation_power(static_cast<long long>(n));
      for (std::size_t i = 0; i < d.r; ++i) {
        Eigen::VectorXd v = d.basis_densities[i].values();
        for (std::size_t k = 0; k < n; ++k) v = p.matrix() * v;
        CHECK(l1_norm(v - d.basis_densities[an[i]].values(), *s) < 1e-10);
      }
    }
  }

  TEST_CASE("transient cells are rejected as out of hypothesis") {
    const auto s = make_uniform_space(2);
    Eigen::MatrixXd m(2, 2);
    // cell 1 leaks into cell 0 and keeps no full return path
    m << 1.0, 0.4, 0.0, 0.6;
    const TransferOperator p(s, m, Provenance::Custom, "leaky");
    try {
      extract_decomposition(p);
      FAIL("expected DecompositionAmbiguity");
    } catch (const DecompositionAmbiguity& e) {
      REQUIRE(!e.table().empty());
      CHECK(e.table()[0].second > 0.0);
    }
  }

  TEST_CASE("strongly skewed stationary density breaks the uniform-basis match") {
    const auto s = make_uniform_space(2);
    Eigen::MatrixXd m(2, 2);
    m << 0.99, 0.9, 0.01, 0.1;  // ergodic but far from doubly stochastic
    const TransferOperator p(s, m, Provenance::Custom, "skewed");
    CHECK_THROWS_AS(extract_decomposition(p), DecompositionAmbiguity);
  }

  TEST_CASE("classification follows the cycle structure") {
    const auto s3 = make_uniform_space(3);
    const auto d3 = extract_decomposition(ulam_operator(MapSystem::cyclic_shift(3), s3));
    const auto c3 = classify(d3);
    CHECK(c3.ergodic);
    CHECK(c3.exact == EHClassification::Exact::Unknown);
    CHECK(c3.mixing == EHClassification::Mixing::RuledOut);
    CHECK(c3.verdict() == "ergodic, not mixing (r = 3, cyclic α)");

    const auto s4 = make_uniform_space(4);
    const auto d4 = extract_decomposition(ulam_operator(MapSystem::identity(), s4));
    const auto c4 = classify(d4);
    CHECK(!c4.ergodic);
    CHECK(c4.mixing == EHClassification::Mixing::RuledOut);

    const auto s256 = make_uniform_space(256);
    const auto d1 = extract_decomposition(ulam_operator(MapSystem::dyadic(), s256, 1000, 5));
    const auto c1 = classify(d1);
    CHECK(c1.ergodic);
    CHECK(c1.exact == EHClassification::Exact::YesByR1);
    CHECK(c1.mixing == EHClassification::Mixing::NecessaryConditionHolds);
    CHECK(c1.verdict() == "exact (r = 1)");
  }

  TEST_CASE("rational rotation on a finer grid is non-ergodic") {
    // shift by 1/4 on 8 cells: two interleaved 4-cycles
    const auto s = make_uniform_space(8);
    const auto p = ulam_operator(MapSystem::rotation(1.0 / 4.0), s);
    const auto d = extract_decomposition(p);
    CHECK(d.r == 8);
    CHECK(d.cycles().size() == 2);
    CHECK(!classify(d).ergodic);
  }

  TEST_CASE("basis densities reconstruct the constant function") {
    const auto s = make_uniform_space(8);
    const auto p = ulam_operator(MapSystem::rotation(1.0 / 4.0), s);
    const auto d = extract_decomposition(p);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(8);
    for (std::size_t i = 0; i < d.r; ++i)
      acc += d.alpha_weights[i] * d.basis_densities[i].values();
    CHECK((acc - Eigen::VectorXd::Ones(8)).cwiseAbs().maxCoeff() < 1e-12);
  }
}
