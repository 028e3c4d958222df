#include "ehkit/wigner.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"

#include "ehkit/errors.hpp"

using namespace ehkit;

namespace {

Eigen::VectorXd grid128() { return uniform_qgrid(128, -1.0, 1.0); }

double analytic_wigner(double q, double p, double q0, double p0, double sigma, double hbar) {
  const double dq = q - q0;
  const double dp = p - p0;
  return std::exp(-dq * dq / (2.0 * sigma * sigma) - 2.0 * sigma * sigma * dp * dp / (hbar * hbar)) /
         (M_PI * hbar);
}

PositionGridOperator packet_state(const Eigen::VectorXd& grid, double q0, double p0, double sigma,
                                  double hbar) {
  return PositionGridOperator::state_from_wavefunction(
      grid, gaussian_wavepacket(grid, q0, p0, sigma, hbar), hbar);
}

const std::vector<double> kHbarScan{0.2, 0.1, 0.05, 0.025};

}  // namespace

TEST_CASE("gaussian packet wigner matches the analytic profile") {
  // Packet kept tight and near the center: the transform truncates its lattice
  // sum at the grid edge, so states need clearance relative to their width.
  const double hbar = 0.1, sigma = 0.1, q0 = 0.05, p0 = 0.4;
  const Eigen::VectorXd grid = grid128();
  const PositionGridOperator rho = packet_state(grid, q0, p0, sigma, hbar);
  const PhaseSpaceFunction w = wigner_of_state(rho);

  REQUIRE(w.values.rows() == 128);
  REQUIRE(w.values.cols() == 256);
  double worst = 0.0;
  for (Eigen::Index a = 0; a < w.values.rows(); ++a) {
    for (Eigen::Index j = 0; j < w.values.cols(); ++j) {
      const double ref = analytic_wigner(w.qgrid(a), w.pgrid(j), q0, p0, sigma, hbar);
      worst = std::max(worst, std::abs(w.values(a, j) - ref));
    }
  }
  CHECK(worst < 1e-8);
  CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-6));

  const Eigen::VectorXd marg = w.marginal_over_p();
  for (Eigen::Index a = 0; a < grid.size(); ++a) {
    CHECK(std::abs(marg(a) - rho.kernel()(a, a).real()) < 1e-12);
  }
}

TEST_CASE("wigner transform is linear in mixtures") {
  const double hbar = 0.08;
  const Eigen::VectorXd grid = grid128();
  const PositionGridOperator r1 = packet_state(grid, -0.2, 0.5, 0.1, hbar);
  const PositionGridOperator r2 = packet_state(grid, 0.25, -0.3, 0.15, hbar);
  const PositionGridOperator mix = r1.scaled(0.5) + r2.scaled(0.5);

  const PhaseSpaceFunction w1 = wigner_of_state(r1);
  const PhaseSpaceFunction w2 = wigner_of_state(r2);
  const PhaseSpaceFunction wm = wigner_of_state(mix);
  const double gap =
      (wm.values - 0.5 * w1.values - 0.5 * w2.values).cwiseAbs().maxCoeff();
  CHECK(gap < 1e-12);
  CHECK(wm.integral() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("coherent superposition shows interference negativity") {
  const double hbar = 0.05, sigma = 0.08;
  const Eigen::VectorXd grid = grid128();
  const Eigen::VectorXcd psi = gaussian_wavepacket(grid, -0.25, 0.0, sigma, hbar) +
                               gaussian_wavepacket(grid, 0.25, 0.0, sigma, hbar);
  const PositionGridOperator cat =
      PositionGridOperator::state_from_wavefunction(grid, psi, hbar);
  const PhaseSpaceFunction w = wigner_of_state(cat);

  CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(w.values.minCoeff() < -0.1 * w.values.maxCoeff());

  const Eigen::VectorXd marg = w.marginal_over_p();
  for (Eigen::Index a = 0; a < grid.size(); ++a) {
    CHECK(std::abs(marg(a) - cat.kernel()(a, a).real()) < 1e-12);
  }
}

TEST_CASE("multiplication operators have p-independent symbols") {
  const double hbar = 0.1;
  const Eigen::VectorXd grid = grid128();

  const PhaseSpaceFunction one = weyl_symbol(PositionGridOperator::identity(grid, hbar));
  CHECK((one.values.array() - 1.0).abs().maxCoeff() < 1e-8);

  const PhaseSpaceFunction pos = weyl_symbol(PositionGridOperator::position(grid, hbar));
  for (Eigen::Index a = 0; a < grid.size(); ++a) {
    for (Eigen::Index j = 0; j < pos.values.cols(); ++j) {
      CHECK(std::abs(pos.values(a, j) - grid(a)) < 1e-12);
    }
  }

  Eigen::VectorXd v(grid.size());
  for (Eigen::Index a = 0; a < grid.size(); ++a) v(a) = std::exp(-grid(a) * grid(a) / 0.08);
  const PhaseSpaceFunction pot =
      weyl_symbol(PositionGridOperator::multiplication(grid, v, hbar));
  for (Eigen::Index a = 0; a < grid.size(); ++a) {
    CHECK((pot.values.row(a).array() - v(a)).abs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("momentum symbol is the band-limited dispersion") {
  const double hbar = 0.1;
  const Eigen::VectorXd grid = grid128();
  const PositionGridOperator p = PositionGridOperator::momentum(grid, hbar);
  const PhaseSpaceFunction f = weyl_symbol(p);
  const double dq = grid(1) - grid(0);

  for (Eigen::Index a = 1; a + 1 < grid.size(); ++a) {
    for (Eigen::Index j = 0; j < f.pgrid.size(); ++j) {
      const double expected = hbar / (2.0 * dq) * std::sin(2.0 * dq * f.pgrid(j) / hbar);
      CHECK(std::abs(f.values(a, j) - expected) < 1e-10);
    }
  }
  // Near the center of the band the dispersion reduces to p itself.
  for (Eigen::Index j = 0; j < f.pgrid.size(); ++j) {
    const double pj = f.pgrid(j);
    if (std::abs(pj) > 0.15 * hbar / dq) continue;
    const double phi = 2.0 * dq * pj / hbar;
    const double bound = std::abs(pj) * phi * phi / 6.0 + 1e-13;
    CHECK(std::abs(f.values(64, j) - pj) <= bound);
  }
}

TEST_CASE("quantized quadratics round-trip through the symbol") {
  const double hbar = 0.15;
  const Eigen::VectorXd grid = grid128();
  const double dq = grid(1) - grid(0);
  const double disp = hbar / (2.0 * dq);

  SUBCASE("polynomials in q alone stay diagonal") {
    QuadraticSymbol s;
    s.c00 = 0.3;
    s.c10 = -0.7;
    s.c20 = 1.1;
    const PositionGridOperator op = weyl_quantize(s, grid, hbar);
    CHECK(op.kernel().cwiseAbs().maxCoeff() == 0.0);
    const PhaseSpaceFunction f = weyl_symbol(op);
    for (Eigen::Index a = 0; a < grid.size(); ++a) {
      const double ref = 0.3 - 0.7 * grid(a) + 1.1 * grid(a) * grid(a);
      CHECK((f.values.row(a).array() - ref).abs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("linear momentum reproduces the momentum builder") {
    QuadraticSymbol s;
    s.c01 = 1.0;
    const PositionGridOperator op = weyl_quantize(s, grid, hbar);
    const PositionGridOperator ref = PositionGridOperator::momentum(grid, hbar);
    Eigen::MatrixXcd diff = op.kernel() - ref.kernel();
    // The builder also fills the two outermost bands that quantization leaves
    // truncated; compare away from the first and last rows.
    diff.row(0).setZero();
    diff.row(diff.rows() - 1).setZero();
    diff.col(0).setZero();
    diff.col(diff.cols() - 1).setZero();
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("p squared matches the squared dispersion and p^2 on a narrow band") {
    QuadraticSymbol s;
    s.c02 = 1.0;
    const PositionGridOperator op = weyl_quantize(s, grid, hbar);
    CHECK(op.is_hermitian());
    const PhaseSpaceFunction f = weyl_symbol(op);
    for (Eigen::Index a = 2; a + 2 < grid.size(); ++a) {
      for (Eigen::Index j = 0; j < f.pgrid.size(); ++j) {
        const double sd = disp * std::sin(2.0 * dq * f.pgrid(j) / hbar);
        CHECK(std::abs(f.values(a, j) - sd * sd) < 1e-10);
      }
    }
    for (Eigen::Index j = 0; j < f.pgrid.size(); ++j) {
      const double pj = f.pgrid(j);
      if (std::abs(pj) > 0.15 * hbar / dq) continue;
      const double phi = 2.0 * dq * pj / hbar;
      const double bound = 1.05 * pj * pj * phi * phi / 3.0 + 1e-12;
      CHECK(std::abs(f.values(64, j) - pj * pj) <= bound);
    }
  }

  SUBCASE("qp couples the midpoint coordinate to the dispersion") {
    QuadraticSymbol s;
    s.c11 = 1.0;
    const PositionGridOperator op = weyl_quantize(s, grid, hbar);
    CHECK(op.is_hermitian());
    const PhaseSpaceFunction f = weyl_symbol(op);
    for (Eigen::Index a = 1; a + 1 < grid.size(); ++a) {
      for (Eigen::Index j = 0; j < f.pgrid.size(); ++j) {
        const double sd = disp * std::sin(2.0 * dq * f.pgrid(j) / hbar);
        CHECK(std::abs(f.values(a, j) - grid(a) * sd) < 1e-10);
      }
    }
  }
}

TEST_CASE("trace products agree with phase-space pairings") {
  const double hbar = 0.1;
  const Eigen::VectorXd grid = grid128();
  const PositionGridOperator rho = packet_state(grid, 0.1, 0.3, 0.12, hbar);

  SUBCASE("identity observable recovers the trace") {
    const TraceProductCheck c =
        trace_product_check(rho, PositionGridOperator::identity(grid, hbar));
    CHECK(c.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.gap < 1e-10);
  }

  SUBCASE("position observable recovers the mean position") {
    const TraceProductCheck c =
        trace_product_check(rho, PositionGridOperator::position(grid, hbar));
    CHECK(c.lhs == doctest::Approx(0.1).epsilon(1e-4));
    CHECK(c.gap < 1e-10);
  }

  SUBCASE("smooth gaussian observables pair to high accuracy") {
    std::mt19937_64 rng(0x51ead5u);
    std::uniform_real_distribution<double> uq(-0.2, 0.2), up(-0.4, 0.4);
    std::uniform_real_distribution<double> usig(0.08, 0.18), uwq(0.1, 0.22), uwp(0.2, 0.45);
    std::uniform_real_distribution<double> uamp(0.5, 2.0), ujit(-0.2, 0.2), upjit(-0.3, 0.3);
    for (int trial = 0; trial < 10; ++trial) {
      const double sq = uq(rng), sp = up(rng);
      const PositionGridOperator state = packet_state(grid, sq, sp, usig(rng), hbar);
      const PositionGridOperator obs = PositionGridOperator::gaussian_phase_space(
          grid, sq + ujit(rng), sp + upjit(rng), uwq(rng), uwp(rng), uamp(rng), hbar);
      const TraceProductCheck c = trace_product_check(state, obs);
      CHECK(std::abs(c.lhs) > 1e-4);
      CHECK(c.relative_gap < 1e-5);
    }
  }

  SUBCASE("operators from different grids are rejected") {
    const Eigen::VectorXd other = uniform_qgrid(96, -1.0, 1.0);
    const PositionGridOperator obs = PositionGridOperator::identity(other, hbar);
    CHECK_THROWS_AS(trace_product_check(rho, obs), DimensionMismatch);
    const Eigen::VectorXd shifted = uniform_qgrid(128, -1.1, 0.9);
    const PositionGridOperator obs2 = PositionGridOperator::identity(shifted, hbar);
    CHECK_THROWS_AS(trace_product_check(rho, obs2), DimensionMismatch);
  }
}

TEST_CASE("star product deviation scales linearly in hbar") {
  const ScalingReport rep = star_product_scaling_gaussian(kHbarScan);
  REQUIRE(rep.deviations.size() == 4);
  CHECK(rep.conclusive);
  for (std::size_t i = 1; i < rep.deviations.size(); ++i) {
    CHECK(rep.deviations[i] < rep.deviations[i - 1]);
  }
  CHECK(rep.slope == doctest::Approx(1.0).epsilon(0.2));
  CHECK(rep.within_band);
}

TEST_CASE("swapping the star factors conjugates the deviation") {
  const double hbar = 0.05;
  const PositionGridOperator f = gaussian_test_operator(-0.15, 0.25, 0.12, 0.35, 1.0)(hbar);
  const PositionGridOperator g = gaussian_test_operator(0.15, -0.2, 0.14, 0.3, 1.0)(hbar);
  const Eigen::MatrixXcd fg = weyl_symbol_complex(f * g);
  const Eigen::MatrixXcd gf = weyl_symbol_complex(g * f);
  const double scale = fg.cwiseAbs().maxCoeff();
  CHECK((gf - fg.conjugate()).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("moyal bracket approaches the poisson bracket at second order") {
  const ScalingReport rep = moyal_bracket_scaling_gaussian(kHbarScan);
  REQUIRE(rep.deviations.size() == 4);
  CHECK(rep.conclusive);
  CHECK(rep.slope == doctest::Approx(2.0).epsilon(0.15));
  CHECK(rep.within_band);
}

TEST_CASE("canonical pair sits at the numerical noise floor") {
  const auto fpos = [](double hbar) {
    return PositionGridOperator::position(grid128(), hbar);
  };
  const auto fmom = [](double hbar) {
    return PositionGridOperator::momentum(grid128(), hbar);
  };
  const ScalingReport rep = moyal_bracket_scaling(fpos, fmom, kHbarScan);
  CHECK_FALSE(rep.conclusive);
  for (double dv : rep.deviations) CHECK(dv < 1e-6);
  REQUIRE_FALSE(rep.notes.empty());
}

TEST_CASE("commuting multiplications leave no star deviation") {
  const auto f1 = [](double hbar) {
    const Eigen::VectorXd grid = grid128();
    Eigen::VectorXd v(grid.size());
    for (Eigen::Index a = 0; a < grid.size(); ++a) v(a) = std::exp(-grid(a) * grid(a) / 0.1);
    return PositionGridOperator::multiplication(grid, v, hbar);
  };
  const auto f2 = [](double hbar) {
    const Eigen::VectorXd grid = grid128();
    Eigen::VectorXd v(grid.size());
    for (Eigen::Index a = 0; a < grid.size(); ++a) v(a) = std::cos(2.0 * grid(a));
    return PositionGridOperator::multiplication(grid, v, hbar);
  };
  const ScalingReport rep = star_product_scaling(f1, f2, kHbarScan);
  CHECK_FALSE(rep.conclusive);
  for (double dv : rep.deviations) CHECK(dv < 1e-12);
}

TEST_CASE("wigner and symbol inputs are validated") {
  const double hbar = 0.1;
  const Eigen::VectorXd grid = grid128();

  SUBCASE("non-hermitian states are rejected") {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(grid.size(), grid.size());
    k(0, 1) = 1.0;
    const PositionGridOperator bad = PositionGridOperator::from_kernel(grid, k, hbar);
    CHECK_THROWS_AS(wigner_of_state(bad), InvariantViolation);
    CHECK_THROWS_AS(weyl_symbol(bad), InvariantViolation);
  }

  SUBCASE("states must have unit trace") {
    const PositionGridOperator rho = packet_state(grid, 0.0, 0.0, 0.1, hbar);
    const PositionGridOperator doubled =
        PositionGridOperator::from_kernel(grid, 2.0 * rho.kernel(), hbar);
    CHECK_THROWS_AS(wigner_of_state(doubled), InvariantViolation);
  }

  SUBCASE("states may not carry a multiplicative part") {
    const PositionGridOperator rho = packet_state(grid, 0.0, 0.0, 0.1, hbar);
    const PositionGridOperator shifted = rho + PositionGridOperator::identity(grid, hbar);
    CHECK_THROWS_AS(wigner_of_state(shifted), InvalidArgument);
  }

  SUBCASE("grids must be uniform and increasing") {
    Eigen::VectorXd bad(4);
    bad << 0.0, 0.1, 0.3, 0.35;
    CHECK_THROWS_AS(PositionGridOperator::identity(bad, hbar), InvalidArgument);
    CHECK_THROWS_AS(uniform_qgrid(1, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(uniform_qgrid(8, 1.0, 0.0), InvalidArgument);
  }

  SUBCASE("builder parameters are validated") {
    CHECK_THROWS_AS(PositionGridOperator::gaussian_phase_space(grid, 0, 0, -0.1, 0.3, 1, hbar),
                    InvalidArgument);
    CHECK_THROWS_AS(PositionGridOperator::gaussian_phase_space(grid, 0, 0, 0.1, 0.3, 1, -1.0),
                    InvalidArgument);
    CHECK_THROWS_AS(PositionGridOperator::state_from_wavefunction(
                        grid, Eigen::VectorXcd::Zero(grid.size()), hbar),
                    InvalidArgument);
    CHECK_THROWS_AS(PositionGridOperator::momentum(uniform_qgrid(4, 0.0, 1.0), hbar),
                    InvalidArgument);
  }

  SUBCASE("hbar scans validate their inputs") {
    const auto fb = [](double h) { return PositionGridOperator::position(grid128(), h); };
    const auto gb = [](double h) { return PositionGridOperator::momentum(grid128(), h); };
    CHECK_THROWS_AS(star_product_scaling(fb, gb, {0.2, 0.1}), InvalidArgument);
    CHECK_THROWS_AS(star_product_scaling(fb, gb, {0.2, 0.15, 0.1}), InvalidArgument);
    CHECK_THROWS_AS(star_product_scaling(fb, gb, {0.2, -0.1, 0.01}), InvalidArgument);
    const auto stale = [](double) { return PositionGridOperator::position(grid128(), 0.1); };
    CHECK_THROWS_AS(star_product_scaling(stale, stale, {0.2, 0.1, 0.025}), InvalidArgument);
  }
}
