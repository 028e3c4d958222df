#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ehkit/errors.hpp"

namespace ehkit {

// Real function on the (q, p) grid produced by the phase-space transform.
// Rows follow the position grid (d points), columns the momentum grid (2d
// points, spanning exactly the band the even-separation transform resolves:
// |p| <= pi hbar / (2 dq), with dp * 2 dq = 2 pi hbar / (2d)).
struct PhaseSpaceFunction {
  Eigen::VectorXd qgrid;
  Eigen::VectorXd pgrid;
  Eigen::MatrixXd values;  // d x 2d
  double hbar = 1.0;
  double dq = 0.0;
  double dp = 0.0;

  double integral() const;               // sum of values * dq * dp
  Eigen::VectorXd marginal_over_p() const;  // position density per q point
  double pairing(const PhaseSpaceFunction& other) const;  // integral of products
};

// Operator on a uniform position grid, kept as a multiplicative diagonal part
// v(q_a) plus a smooth integral kernel K(q_a, q_b); the action on a sampled
// wavefunction is (A psi)_a = v_a psi_a + dq * sum_b K_ab psi_b.
class PositionGridOperator {
 public:
  PositionGridOperator(Eigen::VectorXd qgrid, Eigen::VectorXcd diag, Eigen::MatrixXcd kernel,
                       double hbar);

  const Eigen::VectorXd& qgrid() const { return qgrid_; }
  const Eigen::VectorXcd& diag() const { return diag_; }
  const Eigen::MatrixXcd& kernel() const { return kernel_; }
  double hbar() const { return hbar_; }
  Eigen::Index dim() const { return qgrid_.size(); }
  double dq() const { return dq_; }

  bool is_hermitian(double tol = 1e-10) const;
  // Trace dq * sum_a K_aa; defined for integral operators only.
  double trace() const;

  PositionGridOperator operator+(const PositionGridOperator& other) const;
  PositionGridOperator operator-(const PositionGridOperator& other) const;
  PositionGridOperator scaled(std::complex<double> c) const;
  // Operator composition; kernel-kernel terms pick up the dq measure.
  PositionGridOperator operator*(const PositionGridOperator& other) const;

  static PositionGridOperator multiplication(const Eigen::VectorXd& qgrid,
                                             const Eigen::VectorXd& values, double hbar);
  static PositionGridOperator identity(const Eigen::VectorXd& qgrid, double hbar);
  static PositionGridOperator position(const Eigen::VectorXd& qgrid, double hbar);
  // Band-limited lattice momentum: couples grid sites two steps apart, with
  // symbol (hbar / 2 dq) sin(2 dq p / hbar) -> p as dq -> 0.
  static PositionGridOperator momentum(const Eigen::VectorXd& qgrid, double hbar);
  static PositionGridOperator from_kernel(const Eigen::VectorXd& qgrid,
                                          const Eigen::MatrixXcd& kernel, double hbar);
  // Pure state |psi><psi| from samples; normalizes to unit trace.
  static PositionGridOperator state_from_wavefunction(const Eigen::VectorXd& qgrid,
                                                      const Eigen::VectorXcd& psi, double hbar);
  // Smooth operator whose symbol is amp * Gauss(q; q0, wq) * Gauss(p; p0, wp).
  static PositionGridOperator gaussian_phase_space(const Eigen::VectorXd& qgrid, double q0,
                                                   double p0, double wq, double wp, double amp,
                                                   double hbar);

 private:
  Eigen::VectorXd qgrid_;
  Eigen::VectorXcd diag_;
  Eigen::MatrixXcd kernel_;
  double hbar_;
  double dq_;
};

Eigen::VectorXd uniform_qgrid(Eigen::Index d, double q_min, double q_max);
// Gaussian packet exp(-(q-q0)^2 / 4 sigma^2 + i p0 q / hbar), unnormalized.
Eigen::VectorXcd gaussian_wavepacket(const Eigen::VectorXd& qgrid, double q0, double p0,
                                     double sigma, double hbar);

// Raw phase-space symbol over the (q, p) grid; complex in general (products of
// non-commuting Hermitian operators are not Hermitian).
Eigen::MatrixXcd weyl_symbol_complex(const PositionGridOperator& op);
// Symbol of a Hermitian operator; real by conjugate pairing of the lattice sum.
PhaseSpaceFunction weyl_symbol(const PositionGridOperator& op);
// Wigner function of a state: symbol scaled by (2 pi hbar)^{-1}.  The grid
// pairing makes its p-marginal reproduce the kernel diagonal exactly.
PhaseSpaceFunction wigner_of_state(const PositionGridOperator& rho);

struct TraceProductCheck {
  double lhs = 0.0;           // tr(rho obs) on the grid
  double rhs = 0.0;           // phase-space pairing of the two symbols
  double gap = 0.0;           // |lhs - rhs|
  double relative_gap = 0.0;  // gap / max(|lhs|, |rhs|)
};

TraceProductCheck trace_product_check(const PositionGridOperator& rho,
                                      const PositionGridOperator& obs);

// Poisson bracket dF/dq dG/dp - dF/dp dG/dq by 4th-order central differences;
// entries within two points of any edge are left at zero.
Eigen::MatrixXd poisson_bracket_fd(const PhaseSpaceFunction& f, const PhaseSpaceFunction& g);

// hbar scan of an ordering effect.  The operator pair is rebuilt per hbar so
// the symbols stay fixed while the kernels sharpen; deviations that never rise
// above the grid noise floor leave the fit inconclusive rather than failing.
struct ScalingReport {
  std::vector<double> hbars;
  std::vector<double> deviations;
  double slope = 0.0;
  double expected_slope = 0.0;
  double band = 0.0;  // allowed |slope - expected_slope|
  bool within_band = false;
  bool conclusive = false;
  double noise_floor = 0.0;
  std::vector<std::string> notes;
};

using OperatorBuilder = std::function<PositionGridOperator(double hbar)>;

// sup |symb(f g) - symb(f) symb(g)| per hbar; first-order effect, slope ~ 1.
ScalingReport star_product_scaling(const OperatorBuilder& f, const OperatorBuilder& g,
                                   const std::vector<double>& hbar_list);
// sup |symb([f, g] / i hbar) - {symb f, symb g}_PB| per hbar; slope ~ 2.
ScalingReport moyal_bracket_scaling(const OperatorBuilder& f, const OperatorBuilder& g,
                                    const std::vector<double>& hbar_list);

// Builder for a smooth Gaussian-symbol operator on a fixed grid.
OperatorBuilder gaussian_test_operator(const Eigen::VectorXd& qgrid, double q0, double p0,
                                       double wq, double wp, double amp);
// Same family on the default [-1, 1] grid with 128 points.
OperatorBuilder gaussian_test_operator(double q0, double p0, double wq, double wp, double amp);
ScalingReport star_product_scaling_gaussian(const std::vector<double>& hbar_list);
ScalingReport moyal_bracket_scaling_gaussian(const std::vector<double>& hbar_list);

// Coefficients of c00 + c10 q + c01 p + c20 q^2 + c02 p^2 + c11 q p.
struct QuadraticSymbol {
  double c00 = 0.0, c10 = 0.0, c01 = 0.0;
  double c20 = 0.0, c02 = 0.0, c11 = 0.0;
};

// Symmetric-ordering quantization of a quadratic polynomial.  Momentum enters
// through the band-limited dispersion, so the round-trip symbol reproduces the
// polynomial up to O((dq p / hbar)^2) on a bounded momentum window.
PositionGridOperator weyl_quantize(const QuadraticSymbol& s, const Eigen::VectorXd& qgrid,
                                   double hbar);

}  // namespace ehkit
