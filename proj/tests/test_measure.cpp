#include <random>

#include "doctest.h"
#include "ehkit/measure.hpp"

using namespace ehkit;

TEST_SUITE("measure") {
  TEST_CASE("uniform partition splits evenly and sums to one") {
    const auto s4 = make_uniform_space(4);
    CHECK(s4->n_cells() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(s4->measure(i) == doctest::Approx(0.25));

    const auto s1 = make_uniform_space(1);
    CHECK(s1->measure(0) == doctest::Approx(1.0));

    const auto s256 = make_uniform_space(256);
    CHECK(s256->measures().sum() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_uniform_space(0), InvalidArgument);
  }

  TEST_CASE("square partitions need a square cell count") {
    CHECK(make_uniform_space(16, Domain::UnitSquare)->grid_side() == 4);
    CHECK_THROWS_AS(make_uniform_space(12, Domain::UnitSquare), InvalidArgument);
  }

  TEST_CASE("inner product against hand-evaluated sums") {
    const auto s = make_uniform_space(4);
    Eigen::VectorXd gv(4);
    gv << 1, 2, 3, 4;
    const ClassicalObservable g(s, gv);

    const Density uniform = Density::uniform(s);
    CHECK(inner_product(uniform, g) == doctest::Approx(2.5).epsilon(1e-12));

    Eigen::VectorXd fv(4);
    fv << 4, 0, 0, 0;
    const Density corner(s, fv);
    CHECK(inner_product(corner, g) == doctest::Approx(1.0).epsilon(1e-12));

    // <f, 1> = 1 for any density
    const ClassicalObservable one = ClassicalObservable::constant(s, 1.0);
    CHECK(inner_product(corner, one) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(inner_product(uniform, one) == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("inner product rejects mismatched partitions") {
    const auto a = make_uniform_space(4);
    const auto b = make_uniform_space(5);
    CHECK_THROWS_AS(inner_product(Density::uniform(a), ClassicalObservable::ramp(b)),
                    DimensionMismatch);
  }

  TEST_CASE("l1 distance on hand cases") {
    const auto s = make_uniform_space(4);
    Eigen::VectorXd a(4), b(4), c(4);
    a << 4, 0, 0, 0;
    b << 0, 4, 0, 0;
    c << 2, 2, 0, 0;
    Eigen::VectorXd d(4);
    d << 0, 0, 2, 2;
    CHECK(l1_distance(Density(s, a), Density(s, a)) == 0.0);
    CHECK(l1_distance(Density(s, a), Density(s, b)) == doctest::Approx(2.0));
    CHECK(l1_distance(Density(s, c), Density(s, d)) == doctest::Approx(2.0));
  }

  TEST_CASE("l1 distance is a metric on random triples") {
    const auto s = make_uniform_space(16);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd x(16), y(16), z(16);
      for (int i = 0; i < 16; ++i) {
        x[i] = unif(rng);
        y[i] = unif(rng);
        z[i] = unif(rng);
      }
      const Density f = Density::normalized(s, x);
      const Density g = Density::normalized(s, y);
      const Density h = Density::normalized(s, z);
      CHECK(l1_distance(f, g) == doctest::Approx(l1_distance(g, f)).epsilon(1e-15));
      CHECK(l1_distance(f, h) <= l1_distance(f, g) + l1_distance(g, h) + 1e-12);
    }
  }

  TEST_CASE("normalization makes every nonnegative nonzero vector a density") {
    const auto s = make_uniform_space(8);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd v(8);
      for (int i = 0; i < 8; ++i) v[i] = unif(rng);
      CHECK(Density::normalized(s, v).mass() == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(Density::normalized(s, Eigen::VectorXd::Zero(8)), InvalidArgument);
    Eigen::VectorXd neg = Eigen::VectorXd::Ones(8);
    neg[3] = -0.5;
    CHECK_THROWS_AS(Density::normalized(s, neg), InvalidArgument);
  }

  TEST_CASE("density constructor enforces unit mass and matching size") {
    const auto s = make_uniform_space(4);
    CHECK_THROWS_AS(Density(s, Eigen::VectorXd::Ones(3)), DimensionMismatch);
    CHECK_THROWS_AS(Density(s, Eigen::VectorXd::Constant(4, 0.5)), InvalidArgument);
  }

  TEST_CASE("indicator density carries value 1/mu(A)") {
    const auto s = make_uniform_space(4);
    const Density f = Density::indicator(s, {1, 2});
    CHECK(f.values()[0] == 0.0);
    CHECK(f.values()[1] == doctest::Approx(2.0));
    CHECK(f.values()[2] == doctest::Approx(2.0));
    CHECK(f.mass() == doctest::Approx(1.0));
  }

  TEST_CASE("observable basics") {
    const auto s = make_uniform_space(3);
    const auto ramp = ClassicalObservable::ramp(s);
    CHECK(ramp.values()[0] == 1.0);
    CHECK(ramp.values()[2] == 3.0);
    CHECK(ramp.sup_norm() == 3.0);
    CHECK(domain_from_string(to_string(Domain::UnitSquare)) == Domain::UnitSquare);
  }
}
