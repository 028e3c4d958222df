#include <cmath>

#include "doctest.h"
#include "ehkit/probes.hpp"

using namespace ehkit;

TEST_SUITE("probes") {
  TEST_CASE("stationary input pins every series at the target") {
    const auto s = make_uniform_space(16);
    const auto p = ulam_operator(MapSystem::dyadic(), s, 2000, 3);
    const Density f = stationary_density(p, 1e-10, 5000);
    const auto g = ClassicalObservable::ramp(s);
    const auto erg = ergodic_probe(p, f, g, 50, 1e-6);
    const auto mix = mixing_probe(p, f, g, 50, 1e-6);
    const double expect = inner_product(f, g);
    for (double v : mix.series) CHECK(v == doctest::Approx(expect).epsilon(1e-8));
    CHECK(erg.converged == (std::abs(expect - erg.target) < 1e-6));
  }

  TEST_CASE("cyclic shift: cesaro average settles at the space average") {
    const auto s = make_uniform_space(3);
    const auto p = ulam_operator(MapSystem::cyclic_shift(3), s);
    const Density f = Density::indicator(s, {0});
    const auto g = ClassicalObservable::ramp(s);  // values 1,2,3
    const auto rep = ergodic_probe(p, f, g, 1000, 0.05);
    CHECK(rep.target == doctest::Approx(2.0));  // (1+2+3)/3
    CHECK(rep.converged);
    CHECK(std::abs(rep.series.back() - 2.0) < 0.05);
  }

  TEST_CASE("cyclic shift: correlation cycles and never converges") {
    const auto s = make_uniform_space(3);
    const auto p = ulam_operator(MapSystem::cyclic_shift(3), s);
    const Density f = Density::indicator(s, {0});
    const auto g = ClassicalObservable::ramp(s);
    const auto rep = mixing_probe(p, f, g, 999, 0.05);
    CHECK(!rep.converged);
    // series visits 1, 2, 3 with exact period 3
    for (std::size_t n = 0; n + 3 < rep.series.size(); ++n)
      CHECK(rep.series[n] == doctest::Approx(rep.series[n + 3]).epsilon(1e-12));
    CHECK(rep.series[0] == doctest::Approx(1.0));
    CHECK(rep.series[1] == doctest::Approx(2.0));
    CHECK(rep.series[2] == doctest::Approx(3.0));
  }

  TEST_CASE("cyclic shift: norm distance stays at the hand-computed plateau") {
    const auto s = make_uniform_space(3);
    const auto p = ulam_operator(MapSystem::cyclic_shift(3), s);
    const Density f = Density::indicator(s, {0});
    const auto rep = exact_probe(p, f, 100, 0.05);
    CHECK(!rep.converged);
    // ||3*1_A - 1||_1 = (1/3)(2 + 1 + 1) = 4/3 at every step
    for (double v : rep.series) CHECK(v == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }

  TEST_CASE("dyadic operator passes all three probes") {
    const auto s = make_uniform_space(256);
    const auto p = ulam_operator(MapSystem::dyadic(), s, 1000, 8);
    const Density f = Density::indicator(s, {10});
    const auto g = ClassicalObservable::indicator(s, {100});
    CHECK(ergodic_probe(p, f, g, 200, 0.05).converged);
    const auto mix = mixing_probe(p, f, g, 200, 0.05);
    CHECK(mix.converged);
    const auto ex = exact_probe(p, f, 200, 0.05);
    CHECK(ex.converged);
    CHECK(ex.series[20] < 0.05);
    // exactness dominates correlation gaps for ||g||_inf <= 1
    for (std::size_t n = 0; n < ex.series.size(); ++n)
      CHECK(std::abs(mix.series[n] - mix.target) <= ex.series[n] + 1e-12);
  }

  TEST_CASE("cesaro of a convergent correlation converges to the same limit") {
    const auto s = make_uniform_space(64);
    const auto p = ulam_operator(MapSystem::tent(), s, 800, 15);
    const Density f = Density::indicator(s, {5});
    const auto g = ClassicalObservable::ramp(s);
    const auto mix = mixing_probe(p, f, g, 400, 0.05);
    const auto erg = ergodic_probe(p, f, g, 400, 0.10);
    CHECK(mix.converged);
    CHECK(erg.converged);  // widened tolerance
  }

  TEST_CASE("probe reports store gaps exactly as defined") {
    const auto s = make_uniform_space(3);
    const auto p = ulam_operator(MapSystem::cyclic_shift(3), s);
    const Density f = Density::indicator(s, {0});
    const auto g = ClassicalObservable::ramp(s);
    const auto rep = mixing_probe(p, f, g, 10, 0.05);
    CHECK(rep.final_gap == doctest::Approx(std::abs(rep.series.back() - rep.target)));
    CHECK(rep.horizon == 10);
    CHECK(rep.series.size() == 11);
  }

  TEST_CASE("probe series are invariant under consistent relabeling") {
    const auto s = make_uniform_space(4);
    const auto p = ulam_operator(MapSystem::rotation(0.25), s);
    // relabel cells by the flip i -> 3 - i
    Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) perm(3 - i, i) = 1.0;
    const Eigen::MatrixXd m2 = perm * p.matrix() * perm.transpose();
    const TransferOperator q(s, m2, Provenance::Custom, "relabeled");
    Eigen::VectorXd fv(4), gv(4);
    fv << 4, 0, 0, 0;
    gv << 1, 2, 3, 4;
    const Density f(s, fv);
    const ClassicalObservable g(s, gv);
    const Density f2(s, (perm * fv).eval());
    const ClassicalObservable g2(s, (perm * gv).eval());
    const auto a = mixing_probe(p, f, g, 30, 0.05);
    const auto b = mixing_probe(q, f2, g2, 30, 0.05);
    for (std::size_t n = 0; n < a.series.size(); ++n)
      CHECK(a.series[n] == doctest::Approx(b.series[n]).epsilon(1e-12));
  }

  TEST_CASE("cross validation: dyadic is consistent") {
    const auto s = make_uniform_space(256);
    const auto p = ulam_operator(MapSystem::dyadic(), s, 1000, 5);
    const auto d = extract_decomposition(p);
    const auto rep = cross_validate(p, d);
    CHECK(rep.consistent);
    REQUIRE(rep.checks.size() == 2);
    CHECK(rep.checks[0].ok);
    CHECK(rep.checks[1].ok);
  }

  TEST_CASE("cross validation: cyclic shift is consistent") {
    const auto s = make_uniform_space(3);
    const auto p = ulam_operator(MapSystem::cyclic_shift(3), s);
    const auto rep = cross_validate(p, extract_decomposition(p));
    CHECK(rep.consistent);
  }

  TEST_CASE("cross validation: identity is consistent via failing probes") {
    const auto s = make_uniform_space(4);
    const auto p = ulam_operator(MapSystem::identity(), s);
    const auto rep = cross_validate(p, extract_decomposition(p));
    CHECK(rep.consistent);
  }

  TEST_CASE("identity operator fails the ergodic probe for an asymmetric pair") {
    const auto s = make_uniform_space(4);
    const auto p = ulam_operator(MapSystem::identity(), s);
    const Density f = Density::indicator(s, {0});
    const auto g = ClassicalObservable::ramp(s);
    const auto rep = ergodic_probe(p, f, g, 1000, 0.05);
    CHECK(!rep.converged);
    CHECK(rep.series.back() == doctest::Approx(1.0));  // stuck at <f, g>
    CHECK(rep.target == doctest::Approx(2.5));
  }
}
