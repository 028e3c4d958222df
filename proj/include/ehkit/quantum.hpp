#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ehkit/errors.hpp"

namespace ehkit {

// Density matrix in the energy eigenbasis of its companion Hamiltonian.
class QuantumState {
 public:
  explicit QuantumState(Eigen::MatrixXcd matrix);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  Eigen::MatrixXcd matrix_;
};

// Self-adjoint observable in the same basis.
class QuantumObservable {
 public:
  explicit QuantumObservable(Eigen::MatrixXcd matrix);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  Eigen::MatrixXcd matrix_;
};

// Discrete energy levels E_j plus hbar; frequencies are E_j / hbar.
class HamiltonianModel {
 public:
  explicit HamiltonianModel(Eigen::VectorXd energies, double hbar = 1.0);

  const Eigen::VectorXd& energies() const { return energies_; }
  Eigen::VectorXd frequencies() const { return energies_ / hbar_; }
  double hbar() const { return hbar_; }
  Eigen::Index dim() const { return energies_.size(); }

 private:
  Eigen::VectorXd energies_;
  double hbar_;
};

// <O>(n) = sum_{jk} rho_jk O_kj exp(-i (E_j - E_k) n / hbar) for n = 0..horizon.
// The result is real entrywise (Hermiticity pairs each term with its conjugate);
// a residual imaginary part above 1e-10 aborts.
std::vector<double> mean_value_series(const QuantumState& rho, const QuantumObservable& obs,
                                      const HamiltonianModel& h, long long horizon);

// Running averages sigma_m = (1/m) sum_{n<m} series[n] for m = 1..M.
// When the series is a pure unit-circle phase z^n, pass z so callers can compare
// against the geometric-sum bound 2 / (M |1-z|).
struct CesaroResult {
  long long M = 0;
  std::vector<std::complex<double>> running;  // sigma_1 .. sigma_M
  std::complex<double> limit_estimate;        // sigma_M
  std::optional<std::complex<double>> z;      // unit-circle phase, when applicable
};

CesaroResult cesaro_limit(const std::vector<double>& series, long long M,
                          std::optional<std::complex<double>> z = std::nullopt);
CesaroResult cesaro_limit(const std::vector<std::complex<double>>& series, long long M,
                          std::optional<std::complex<double>> z = std::nullopt);

// Split of a mean-value series into an almost-periodic component driven by the
// discrete energy gaps (including its own time average) and a remainder that
// must die out whenever a continuous component is present.
//   series[n] = oscillatory[n] + remainder[n]   (exact by construction)
//   A / B     = max / min of the oscillatory part over one period
//               (over the fitted range when no finite period exists)
//   constant_term = (A + B) / 2
struct QSDTSplit {
  std::vector<double> oscillatory;
  std::vector<double> remainder;
  double A = 0.0;
  double B = 0.0;
  double constant_term = 0.0;
  std::optional<long long> period_estimate;  // empty: aperiodic (almost-periodic)
  std::string period_note;
  std::vector<double> decade_max;     // max |remainder| over n in [10^k, 10^{k+1})
  bool remainder_decays = false;      // decade maxima strictly decreasing
  bool remainder_negligible = false;  // remainder at numerical zero throughout
  double fit_residual = 0.0;          // RMS remainder over the fit window
  std::vector<std::string> component_notes;
};

// Fits constant + cos/sin at every pairwise frequency gap of h on the tail half
// of the series, then reports the exact pointwise split.  With expect_decay set,
// a remainder that neither vanishes nor decays raises DecompositionMismatch.
QSDTSplit qsdt_split(const std::vector<double>& series, const HamiltonianModel& h, double tol,
                     bool expect_decay = false);

// Observable over a sampled frequency band: a multiplicative diagonal profile
// O(w) plus a Hermitian correlation kernel O(w, w').
struct VanHoveObservable {
  Eigen::VectorXd diag;
  Eigen::MatrixXcd offdiag;
  std::string name;
};

// State and observable sampled on a uniform frequency grid over [0, omega_max],
// with trapezoid quadrature weights.  The diagonal profile rho(w) integrates to
// one; both kernels are Hermitian on the grid.  The pairing at time n is
//   <O>(n) = sum_i w_i rho_i O_i
//          + sum_{ij} w_i w_j conj(rho_ij) O_ij exp(-i (w_i - w_j) n / hbar).
class QuasiContinuousModel {
 public:
  QuasiContinuousModel(Eigen::VectorXd omega_grid, Eigen::VectorXd rho_diag,
                       Eigen::MatrixXcd rho_offdiag, Eigen::VectorXd obs_diag,
                       Eigen::MatrixXcd obs_offdiag, double hbar = 1.0);

  const Eigen::VectorXd& omega_grid() const { return omega_grid_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& rho_diag() const { return rho_diag_; }
  const Eigen::MatrixXcd& rho_offdiag() const { return rho_offdiag_; }
  const Eigen::VectorXd& obs_diag() const { return obs_diag_; }
  const Eigen::MatrixXcd& obs_offdiag() const { return obs_offdiag_; }
  double hbar() const { return hbar_; }
  Eigen::Index n_points() const { return omega_grid_.size(); }

  VanHoveObservable own_observable() const;
  // Same grid and observable, different state kernels.
  QuasiContinuousModel with_rho(const Eigen::VectorXd& diag,
                                const Eigen::MatrixXcd& offdiag) const;

  // Constant part: integral of rho(w) O(w).
  double diagonal_pairing() const;
  double diagonal_pairing(const VanHoveObservable& o) const;
  // Oscillatory double integral I(n) for n = 0..horizon, via the banded
  // fast path (the grid is uniform, so phases depend on i - j only).
  std::vector<double> offdiagonal_series(long long horizon) const;
  std::vector<double> offdiagonal_series(long long horizon, const VanHoveObservable& o) const;
  // I(n) by the raw double sum; cross-check for the banded path.
  double offdiagonal_direct(long long n) const;
  double offdiagonal_direct(long long n, const VanHoveObservable& o) const;
  // Full pairing series: diagonal_pairing() + I(n).
  std::vector<double> mean_series(long long horizon) const;
  std::vector<double> mean_series(long long horizon, const VanHoveObservable& o) const;
  // Integrability diagnostic: integral of |conj(rho) O| over the grid square.
  double kernel_abs_integral() const;
  double kernel_abs_integral(const VanHoveObservable& o) const;

 private:
  Eigen::VectorXd omega_grid_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd rho_diag_;
  Eigen::MatrixXcd rho_offdiag_;
  Eigen::VectorXd obs_diag_;
  Eigen::MatrixXcd obs_offdiag_;
  double hbar_;
};

// Smooth band model: Gaussian diagonal profile centered at `center`, Gaussian
// state kernel with near-diagonal width `rho_corr_width`, observable diagonal
// w -> w and a Gaussian observable kernel.  Everything normalized on the grid.
QuasiContinuousModel make_gaussian_continuum(Eigen::Index n_points, double omega_max,
                                             double center, double diag_width,
                                             double rho_corr_width, double rho_amp,
                                             double hbar = 1.0);

// Pathological band model: the state kernel is a single conjugate pair of
// spikes coupling two separated frequencies, so the oscillatory integral is an
// undamped cosine and no weak limit exists.
QuasiContinuousModel make_spike_continuum(Eigen::Index n_points, double omega_max,
                                          double lo_frac, double hi_frac, double amp,
                                          double hbar = 1.0);

// Gaussian observable kernel on an existing grid, optionally with a linear
// phase twist beta across the kernel (keeps it Hermitian, makes it complex).
VanHoveObservable make_gaussian_vanhove(const Eigen::VectorXd& omega_grid, double center,
                                        double diag_width, double corr_width, double amp,
                                        double phase_twist, const std::string& name);

// Discrete levels together with the state/observable pair living on them.
struct DiscreteSpectrumSystem {
  HamiltonianModel h;
  QuantumState rho;
  QuantumObservable obs;

  DiscreteSpectrumSystem(HamiltonianModel h_in, QuantumState rho_in, QuantumObservable obs_in);
};

// A system with a discrete part, a quasi-continuous part, or both; the
// mean-value series is the sum of the two contributions.
struct QuantumSystemModel {
  std::optional<DiscreteSpectrumSystem> discrete;
  std::optional<QuasiContinuousModel> continuum;
};

std::vector<double> mean_value_series(const QuantumSystemModel& model, long long horizon);

// Hierarchy verdict read off the split: a discrete spectrum keeps an undamped
// periodic component (ergodic); an integrable quasi-continuous kernel makes the
// whole non-constant part decay (mixing, and the r = 1 analogue also gives the
// exactness sufficient condition); anything unresolved stays "unknown".
struct QuantumClassification {
  std::string verdict;    // "ergodic" | "mixing" | "unknown"
  std::string exactness;  // "exact (sufficient condition)" | "unknown"
  std::vector<std::string> evidence;
  QSDTSplit split;
  std::vector<double> series;
  long long horizon = 0;
  double tol = 0.0;
};

QuantumClassification classify_quantum(const QuantumSystemModel& model, long long horizon,
                                       double tol);
QuantumClassification classify_quantum(const HamiltonianModel& h, const QuantumState& rho,
                                       const QuantumObservable& obs, long long horizon,
                                       double tol);
QuantumClassification classify_quantum(const QuasiContinuousModel& qc, long long horizon,
                                       double tol);

// Diagonal profile the state relaxes to in the weak sense, certified against an
// observable basket: every pairing stays within tol of its limit from
// certified_horizon on.  Persistent oscillation raises NoWeakLimit instead.
struct WeakLimitReport {
  Eigen::VectorXd limit_diag;
  std::vector<double> limit_values;  // limit pairing per basket observable
  long long certified_horizon = 0;
  long long horizon = 0;
  double tol = 0.0;
  std::vector<std::vector<double>> gap_curves;  // |pairing(n) - limit| per observable
  std::vector<std::string> notes;
};

WeakLimitReport weak_limit(const QuasiContinuousModel& model,
                           const std::vector<VanHoveObservable>& basket, long long horizon,
                           double tol);
WeakLimitReport weak_limit(const HamiltonianModel& h, const QuantumState& rho,
                           const std::vector<QuantumObservable>& basket, long long horizon,
                           double tol);

// Alternative initial state kernels for the homogenization check.
struct RhoVariant {
  Eigen::VectorXd diag;
  Eigen::MatrixXcd offdiag;
  std::string name;
};

// Every initial state of a mixing band model must relax to the same diagonal
// profile, and pairing with the identity observable must return exactly the
// state normalization.  Distinct limits raise HomogenizationViolation.
struct HomogenizationReport {
  bool homogenized = false;
  bool identity_ok = false;
  Eigen::VectorXd common_limit;
  double worst_pair_gap = 0.0;
  std::vector<double> identity_coefficients;
  std::vector<std::string> variant_names;
  std::vector<long long> certified_horizons;
  std::vector<std::string> notes;
};

HomogenizationReport homogenization_check(const QuasiContinuousModel& base,
                                          const std::vector<RhoVariant>& variants,
                                          const std::vector<VanHoveObservable>& basket,
                                          double tol, long long horizon = 2000);

// Worked two-level system: closed-form series, split, Cesaro averages of the
// full series and of the bare phase z^n with z = exp(-i (E1 - E2) / hbar), and
// a side-by-side of the computed Cesaro limit against the fixed-weight closed
// form that keeps the off-diagonal terms with coefficient 1 / (1 - z).
struct TwoLevelReport {
  double e1 = 0.0, e2 = 0.0, hbar = 1.0;
  std::vector<double> series;
  std::complex<double> z;
  bool degenerate = false;  // E1 == E2: z = 1, constant series
  std::string verdict;      // "ergodic"
  std::vector<std::string> evidence;
  QSDTSplit split;
  CesaroResult cesaro;        // full series
  CesaroResult phase_cesaro;  // bare phase series z^n
  // min over m <= M of 2/(m |1-z|) - |sigma_m|; >= 0 means the geometric-sum
  // bound held at every truncation.  NaN when z = 1.
  double phase_bound_margin = 0.0;
  double diagonal_part = 0.0;      // rho11 O11 + rho22 O22
  double numeric_limit = 0.0;      // Re sigma_M of the full series
  double diagonal_gap = 0.0;       // |numeric_limit - diagonal_part|
  double fixed_weight_offdiag = 0.0;  // 2 Re(rho12 conj(O12) / (1 - z)); NaN when z = 1
  double fixed_weight_limit = 0.0;    // diagonal_part + fixed_weight_offdiag
  double fixed_weight_gap = 0.0;      // |numeric_limit - fixed_weight_limit|
  bool fixed_weight_consistent = false;
  std::vector<std::string> notes;
};

// rho12 and o12 are the (1,2) entries <1|.|2>; the conjugate entries are
// implied.  M bounds the Cesaro truncation, horizon the reported series.
TwoLevelReport two_level_demo(double e1, double e2, double hbar, double rho11, double rho22,
                              std::complex<double> rho12, double o11, double o22,
                              std::complex<double> o12, long long M, long long horizon = 1000);

}  // namespace ehkit
