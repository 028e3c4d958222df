#include "ehkit/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ehkit {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdTol = -1e-10;
constexpr double kImagTol = 1e-10;
constexpr double kQcMassTol = 1e-8;
constexpr double kNegligibleFactor = 1e-8;
constexpr long long kPeriodDenomMax = 4096;
constexpr long long kPeriodCap = 1000000;
constexpr double kCommensurateTol = 1e-9;
constexpr double kIdentityCoeffTol = 1e-10;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double hermitian_gap(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_square(const Eigen::MatrixXcd& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw DimensionMismatch(std::string(what) + ": matrix must be square and non-empty");
}

void require_hermitian(const Eigen::MatrixXcd& m, const char* what) {
  const double gap = hermitian_gap(m);
  if (!(gap <= kHermitianTol))
    throw InvariantViolation(std::string(what) + ": not Hermitian (max deviation " + fmt(gap) +
                             ")");
}

// Compensated summation keeps the running Cesaro averages honest over long
// truncations.
struct KahanC {
  std::complex<double> sum{0.0, 0.0};
  std::complex<double> carry{0.0, 0.0};
  void add(std::complex<double> x) {
    const std::complex<double> y = x - carry;
    const std::complex<double> t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Best rational approximation p/q of x with q <= kPeriodDenomMax, via the
// continued-fraction convergents; accepted only within kCommensurateTol.
std::optional<long long> commensurate_denominator(double x) {
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = x;
  long long best_q = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 64; ++it) {
    const double af = std::floor(frac);
    const auto a = static_cast<long long>(af);
    const long long p2 = a * p1 + p0;
    const long long q2 = a * q1 + q0;
    if (q2 > kPeriodDenomMax || q2 <= 0) break;
    const double err = std::abs(x - static_cast<double>(p2) / static_cast<double>(q2));
    if (err < best_err) {
      best_err = err;
      best_q = q2;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double rem = frac - af;
    if (rem < 1e-15) break;
    frac = 1.0 / rem;
  }
  if (best_q > 0 && best_err <= kCommensurateTol) return best_q;
  return std::nullopt;
}

std::vector<double> decade_maxima(const std::vector<double>& remainder) {
  std::vector<double> out;
  const auto len = static_cast<long long>(remainder.size());
  for (long long lo = 1; lo < len; lo *= 10) {
    const long long hi = std::min(lo * 10, len);
    double m = 0.0;
    for (long long n = lo; n < hi; ++n) m = std::max(m, std::abs(remainder[n]));
    out.push_back(m);
  }
  return out;
}

// First n0 such that |curve[n]| <= tol for every n in [n0, end]; -1 if none.
long long certified_onset(const std::vector<double>& curve, double tol) {
  long long onset = -1;
  for (long long n = static_cast<long long>(curve.size()) - 1; n >= 0; --n) {
    if (std::abs(curve[n]) <= tol)
      onset = n;
    else
      break;
  }
  return onset;
}

}  // namespace

QuantumState::QuantumState(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "QuantumState");
  require_hermitian(matrix_, "QuantumState");
  const double tr_gap = std::abs(matrix_.trace() - std::complex<double>(1.0, 0.0));
  if (!(tr_gap <= kTraceTol))
    throw InvariantViolation("QuantumState: trace must be 1 (deviation " + fmt(tr_gap) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (matrix_ + matrix_.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig >= kPsdTol))
    throw InvariantViolation("QuantumState: not positive semidefinite (min eigenvalue " +
                             fmt(min_eig) + ")");
}

QuantumObservable::QuantumObservable(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "QuantumObservable");
  require_hermitian(matrix_, "QuantumObservable");
}

HamiltonianModel::HamiltonianModel(Eigen::VectorXd energies, double hbar)
    : energies_(std::move(energies)), hbar_(hbar) {
  if (energies_.size() < 1) throw InvalidArgument("HamiltonianModel: needs at least one level");
  if (!energies_.allFinite()) throw InvalidArgument("HamiltonianModel: energies must be finite");
  if (!(hbar_ > 0.0)) throw InvalidArgument("HamiltonianModel: hbar must be positive");
}

std::vector<double> mean_value_series(const QuantumState& rho, const QuantumObservable& obs,
                                      const HamiltonianModel& h, long long horizon) {
  const Eigen::Index d = rho.dim();
  if (obs.dim() != d || h.dim() != d)
    throw DimensionMismatch("mean_value_series: state, observable and level count disagree");
  if (horizon < 1) throw InvalidArgument("mean_value_series: horizon must be >= 1");

  // Coefficients c_jk = rho_jk O_kj and phase rates (E_j - E_k) / hbar.
  Eigen::MatrixXcd coeff(d, d);
  Eigen::MatrixXd rate(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      coeff(j, k) = rho.matrix()(j, k) * obs.matrix()(k, j);
      rate(j, k) = (h.energies()(j) - h.energies()(k)) / h.hbar();
    }

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  for (long long n = 0; n <= horizon; ++n) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        acc += coeff(j, k) * std::polar(1.0, -rate(j, k) * static_cast<double>(n));
    if (!(std::abs(acc.imag()) < kImagTol))
      throw InvariantViolation("mean_value_series: imaginary part " + fmt(acc.imag()) +
                               " at n = " + std::to_string(n));
    out.push_back(acc.real());
  }
  return out;
}

CesaroResult cesaro_limit(const std::vector<std::complex<double>>& series, long long M,
                          std::optional<std::complex<double>> z) {
  if (M == 0) throw InvalidArgument("cesaro_limit: truncation M must be positive");
  if (M < 0 || static_cast<std::size_t>(M) > series.size())
    throw InvalidArgument("cesaro_limit: truncation M exceeds the series length");
  if (z && !(std::abs(std::abs(*z) - 1.0) <= 1e-12))
    throw InvariantViolation("cesaro_limit: phase z must lie on the unit circle");

  CesaroResult res;
  res.M = M;
  res.z = z;
  res.running.reserve(static_cast<std::size_t>(M));
  KahanC acc;
  for (long long m = 1; m <= M; ++m) {
    acc.add(series[static_cast<std::size_t>(m - 1)]);
    res.running.push_back(acc.sum / static_cast<double>(m));
  }
  res.limit_estimate = res.running.back();
  return res;
}

CesaroResult cesaro_limit(const std::vector<double>& series, long long M,
                          std::optional<std::complex<double>> z) {
  std::vector<std::complex<double>> c(series.begin(), series.end());
  return cesaro_limit(c, M, z);
}

QSDTSplit qsdt_split(const std::vector<double>& series, const HamiltonianModel& h, double tol,
                     bool expect_decay) {
  const auto len = static_cast<long long>(series.size());
  if (len < 2) throw InvalidArgument("qsdt_split: series too short");
  if (!(tol > 0.0)) throw InvalidArgument("qsdt_split: tol must be positive");

  double scale = 0.0;
  for (double v : series) scale = std::max(scale, std::abs(v));

  // Distinct phase rates from the pairwise level gaps, folded into (0, pi].
  // Rates that barely advance over the fit window act as constants and are
  // absorbed into the fitted mean.
  std::vector<double> thetas;
  const Eigen::VectorXd w = h.frequencies();
  constexpr double kTwoPi = 2.0 * M_PI;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    for (Eigen::Index k = j + 1; k < w.size(); ++k) {
      double th = std::fmod(std::abs(w(j) - w(k)), kTwoPi);
      if (th > M_PI) th = kTwoPi - th;
      if (th * static_cast<double>(len) < 1e-6) continue;
      bool dup = false;
      for (double seen : thetas)
        if (std::abs(seen - th) <= 1e-12) {
          dup = true;
          break;
        }
      if (!dup) thetas.push_back(th);
    }
  std::sort(thetas.begin(), thetas.end());
  const auto n_gaps = static_cast<Eigen::Index>(thetas.size());

  // Least squares on the tail half, where any decaying component has mostly
  // died out; widen to the full series when the window would be too thin.
  long long w0 = len / 2;
  if (len - w0 < 2 * (2 * n_gaps + 1)) w0 = 0;
  const long long rows = len - w0;
  Eigen::MatrixXd X(rows, 1 + 2 * n_gaps);
  Eigen::VectorXd y(rows);
  for (long long i = 0; i < rows; ++i) {
    const auto n = static_cast<double>(w0 + i);
    X(i, 0) = 1.0;
    for (Eigen::Index g = 0; g < n_gaps; ++g) {
      X(i, 1 + 2 * g) = std::cos(thetas[static_cast<std::size_t>(g)] * n);
      X(i, 2 + 2 * g) = std::sin(thetas[static_cast<std::size_t>(g)] * n);
    }
    y(i) = series[static_cast<std::size_t>(w0 + i)];
  }
  const Eigen::VectorXd beta =
      X.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);

  const auto osc_at = [&](double n) {
    double v = beta(0);
    for (Eigen::Index g = 0; g < n_gaps; ++g) {
      v += beta(1 + 2 * g) * std::cos(thetas[static_cast<std::size_t>(g)] * n);
      v += beta(2 + 2 * g) * std::sin(thetas[static_cast<std::size_t>(g)] * n);
    }
    return v;
  };

  QSDTSplit split;
  split.oscillatory.reserve(static_cast<std::size_t>(len));
  split.remainder.reserve(static_cast<std::size_t>(len));
  for (long long n = 0; n < len; ++n) {
    const double o = osc_at(static_cast<double>(n));
    split.oscillatory.push_back(o);
    split.remainder.push_back(series[static_cast<std::size_t>(n)] - o);
  }

  double ss = 0.0;
  for (long long i = 0; i < rows; ++i) {
    const double r = split.remainder[static_cast<std::size_t>(w0 + i)];
    ss += r * r;
  }
  split.fit_residual = std::sqrt(ss / static_cast<double>(rows));

  // Common period of the fitted phases, when they are commensurate with 2 pi.
  bool periodic = true;
  long long period = 1;
  std::string period_fail;
  for (double th : thetas) {
    const auto q = commensurate_denominator(th / kTwoPi);
    if (!q) {
      periodic = false;
      period_fail = "a phase rate is incommensurate with 2 pi";
      break;
    }
    period = std::lcm(period, *q);
    if (period > kPeriodCap) {
      periodic = false;
      period_fail = "common period exceeds the cap " + std::to_string(kPeriodCap);
      break;
    }
  }
  if (periodic) {
    split.period_estimate = period;
    split.period_note = "periodic (N = " + std::to_string(period) + ")";
  } else {
    split.period_note = "aperiodic (almost-periodic): " + period_fail;
  }

  // Extremes of the oscillatory part over one full period, or over the fitted
  // range when no finite period exists.
  const long long span = periodic ? period : len;
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  for (long long n = 0; n < span; ++n) {
    const double v = (n < len) ? split.oscillatory[static_cast<std::size_t>(n)]
                               : osc_at(static_cast<double>(n));
    a = std::max(a, v);
    b = std::min(b, v);
  }
  split.A = a;
  split.B = b;
  split.constant_term = 0.5 * (a + b);

  split.decade_max = decade_maxima(split.remainder);
  double rem_max = 0.0;
  for (double r : split.remainder) rem_max = std::max(rem_max, std::abs(r));
  split.remainder_negligible = rem_max <= kNegligibleFactor * std::max(1.0, scale);
  split.remainder_decays = split.decade_max.size() >= 2;
  for (std::size_t i = 0; i + 1 < split.decade_max.size(); ++i)
    if (!(split.decade_max[i + 1] < split.decade_max[i])) {
      split.remainder_decays = false;
      break;
    }

  split.component_notes.push_back(
      "oscillatory: almost-periodic component carried by the discrete frequency gaps (" +
      std::to_string(thetas.size()) + " fitted)");
  split.component_notes.push_back("constant: (A + B) / 2 = " + fmt(split.constant_term) +
                                  ", the time average of the oscillatory component");
  split.component_notes.push_back(
      "remainder: the part that must decay when a continuous component is present; max |r| = " +
      fmt(rem_max));

  if (expect_decay && !split.remainder_negligible && !split.remainder_decays) {
    const double resid = split.decade_max.empty() ? rem_max : split.decade_max.back();
    throw DecompositionMismatch(
        "qsdt_split: a decaying remainder was required but the tail does not decay (last "
        "decade max " +
            fmt(resid) + ")",
        resid);
  }
  return split;
}

QuasiContinuousModel::QuasiContinuousModel(Eigen::VectorXd omega_grid, Eigen::VectorXd rho_diag,
                                           Eigen::MatrixXcd rho_offdiag,
                                           Eigen::VectorXd obs_diag,
                                           Eigen::MatrixXcd obs_offdiag, double hbar)
    : omega_grid_(std::move(omega_grid)),
      rho_diag_(std::move(rho_diag)),
      rho_offdiag_(std::move(rho_offdiag)),
      obs_diag_(std::move(obs_diag)),
      obs_offdiag_(std::move(obs_offdiag)),
      hbar_(hbar) {
  const Eigen::Index k = omega_grid_.size();
  if (k < 2) throw InvalidArgument("QuasiContinuousModel: needs at least two grid points");
  if (!(hbar_ > 0.0)) throw InvalidArgument("QuasiContinuousModel: hbar must be positive");
  if (omega_grid_(0) < -1e-12)
    throw InvalidArgument("QuasiContinuousModel: frequency grid must start at or above 0");
  const double step = (omega_grid_(k - 1) - omega_grid_(0)) / static_cast<double>(k - 1);
  if (!(step > 0.0)) throw InvalidArgument("QuasiContinuousModel: grid must be increasing");
  for (Eigen::Index i = 0; i < k; ++i)
    if (std::abs(omega_grid_(i) - (omega_grid_(0) + step * static_cast<double>(i))) >
        1e-9 * std::max(1.0, std::abs(omega_grid_(k - 1))))
      throw InvalidArgument("QuasiContinuousModel: grid must be uniform");

  if (rho_diag_.size() != k || obs_diag_.size() != k || rho_offdiag_.rows() != k ||
      rho_offdiag_.cols() != k || obs_offdiag_.rows() != k || obs_offdiag_.cols() != k)
    throw DimensionMismatch("QuasiContinuousModel: profiles and kernels must match the grid");

  weights_ = Eigen::VectorXd::Constant(k, step);
  weights_(0) = 0.5 * step;
  weights_(k - 1) = 0.5 * step;

  for (Eigen::Index i = 0; i < k; ++i) {
    if (rho_diag_(i) < -1e-12)
      throw InvariantViolation("QuasiContinuousModel: negative diagonal density");
    if (rho_diag_(i) < 0.0) rho_diag_(i) = 0.0;
  }
  const double mass = weights_.dot(rho_diag_);
  if (std::abs(mass - 1.0) > kQcMassTol)
    throw InvariantViolation("QuasiContinuousModel: diagonal density integrates to " + fmt(mass) +
                             ", expected 1");
  require_hermitian(rho_offdiag_, "QuasiContinuousModel state kernel");
  require_hermitian(obs_offdiag_, "QuasiContinuousModel observable kernel");
}

VanHoveObservable QuasiContinuousModel::own_observable() const {
  return VanHoveObservable{obs_diag_, obs_offdiag_, "model observable"};
}

QuasiContinuousModel QuasiContinuousModel::with_rho(const Eigen::VectorXd& diag,
                                                    const Eigen::MatrixXcd& offdiag) const {
  return QuasiContinuousModel(omega_grid_, diag, offdiag, obs_diag_, obs_offdiag_, hbar_);
}

double QuasiContinuousModel::diagonal_pairing(const VanHoveObservable& o) const {
  if (o.diag.size() != omega_grid_.size())
    throw DimensionMismatch("diagonal_pairing: observable profile off the grid");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < omega_grid_.size(); ++i)
    acc += weights_(i) * rho_diag_(i) * o.diag(i);
  return acc;
}

double QuasiContinuousModel::diagonal_pairing() const { return diagonal_pairing(own_observable()); }

std::vector<double> QuasiContinuousModel::offdiagonal_series(long long horizon,
                                                             const VanHoveObservable& o) const {
  const Eigen::Index k = omega_grid_.size();
  if (o.offdiag.rows() != k || o.offdiag.cols() != k)
    throw DimensionMismatch("offdiagonal_series: observable kernel off the grid");
  if (horizon < 0) throw InvalidArgument("offdiagonal_series: horizon must be >= 0");

  // Uniform grid: the phase depends on i - j only, so collapse the double sum
  // onto bands b_d = sum_{i-j=d} w_i w_j conj(rho_ij) O_ij.  Hermiticity gives
  // b_{-d} = conj(b_d), so I(n) = b_0 + 2 Re sum_{d>0} b_d e^{-i step d n / hbar}.
  const double step = (omega_grid_(k - 1) - omega_grid_(0)) / static_cast<double>(k - 1);
  std::vector<std::complex<double>> band(static_cast<std::size_t>(k), {0.0, 0.0});
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      band[static_cast<std::size_t>(i - j)] +=
          weights_(i) * weights_(j) * std::conj(rho_offdiag_(i, j)) * o.offdiag(i, j);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  for (long long n = 0; n <= horizon; ++n) {
    double acc = band[0].real();
    for (Eigen::Index d = 1; d < k; ++d) {
      const double phase = -step * static_cast<double>(d) * static_cast<double>(n) / hbar_;
      acc += 2.0 * (band[static_cast<std::size_t>(d)] * std::polar(1.0, phase)).real();
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<double> QuasiContinuousModel::offdiagonal_series(long long horizon) const {
  return offdiagonal_series(horizon, own_observable());
}

double QuasiContinuousModel::offdiagonal_direct(long long n, const VanHoveObservable& o) const {
  const Eigen::Index k = omega_grid_.size();
  if (o.offdiag.rows() != k || o.offdiag.cols() != k)
    throw DimensionMismatch("offdiagonal_direct: observable kernel off the grid");
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double phase =
          -(omega_grid_(i) - omega_grid_(j)) * static_cast<double>(n) / hbar_;
      acc += weights_(i) * weights_(j) * std::conj(rho_offdiag_(i, j)) * o.offdiag(i, j) *
             std::polar(1.0, phase);
    }
  if (!(std::abs(acc.imag()) <= 1e-9 * (1.0 + std::abs(acc))))
    throw NumericalFailure("offdiagonal_direct: pairing developed an imaginary part");
  return acc.real();
}

double QuasiContinuousModel::offdiagonal_direct(long long n) const {
  return offdiagonal_direct(n, own_observable());
}

std::vector<double> QuasiContinuousModel::mean_series(long long horizon,
                                                      const VanHoveObservable& o) const {
  std::vector<double> out = offdiagonal_series(horizon, o);
  const double base = diagonal_pairing(o);
  for (double& v : out) v += base;
  return out;
}

std::vector<double> QuasiContinuousModel::mean_series(long long horizon) const {
  return mean_series(horizon, own_observable());
}

double QuasiContinuousModel::kernel_abs_integral(const VanHoveObservable& o) const {
  const Eigen::Index k = omega_grid_.size();
  if (o.offdiag.rows() != k || o.offdiag.cols() != k)
    throw DimensionMismatch("kernel_abs_integral: observable kernel off the grid");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      acc += weights_(i) * weights_(j) * std::abs(std::conj(rho_offdiag_(i, j)) * o.offdiag(i, j));
  return acc;
}

double QuasiContinuousModel::kernel_abs_integral() const {
  return kernel_abs_integral(own_observable());
}

QuasiContinuousModel make_gaussian_continuum(Eigen::Index n_points, double omega_max,
                                             double center, double diag_width,
                                             double rho_corr_width, double rho_amp, double hbar) {
  if (n_points < 2) throw InvalidArgument("make_gaussian_continuum: need at least two points");
  if (!(omega_max > 0.0) || !(diag_width > 0.0) || !(rho_corr_width > 0.0))
    throw InvalidArgument("make_gaussian_continuum: widths and omega_max must be positive");
  Eigen::VectorXd grid(n_points);
  const double step = omega_max / static_cast<double>(n_points - 1);
  for (Eigen::Index i = 0; i < n_points; ++i) grid(i) = step * static_cast<double>(i);

  Eigen::VectorXd env(n_points);
  Eigen::VectorXd diag(n_points);
  for (Eigen::Index i = 0; i < n_points; ++i) {
    const double u = (grid(i) - center) / diag_width;
    diag(i) = std::exp(-0.5 * u * u);
    env(i) = std::exp(-0.25 * u * u);  // sqrt of the diagonal profile
  }
  Eigen::VectorXd wts = Eigen::VectorXd::Constant(n_points, step);
  wts(0) = 0.5 * step;
  wts(n_points - 1) = 0.5 * step;
  diag /= wts.dot(diag);

  Eigen::MatrixXcd rho_off(n_points, n_points);
  Eigen::MatrixXcd obs_off(n_points, n_points);
  const double obs_corr = 1.5 * rho_corr_width;
  for (Eigen::Index i = 0; i < n_points; ++i)
    for (Eigen::Index j = 0; j < n_points; ++j) {
      const double d = grid(i) - grid(j);
      rho_off(i, j) =
          rho_amp * env(i) * env(j) * std::exp(-0.5 * d * d / (rho_corr_width * rho_corr_width));
      obs_off(i, j) = 0.8 * env(i) * env(j) * std::exp(-0.5 * d * d / (obs_corr * obs_corr));
    }
  return QuasiContinuousModel(grid, diag, rho_off, grid, obs_off, hbar);
}

QuasiContinuousModel make_spike_continuum(Eigen::Index n_points, double omega_max, double lo_frac,
                                          double hi_frac, double amp, double hbar) {
  if (n_points < 2) throw InvalidArgument("make_spike_continuum: need at least two points");
  if (!(omega_max > 0.0)) throw InvalidArgument("make_spike_continuum: omega_max must be positive");
  if (!(lo_frac >= 0.0 && lo_frac <= 1.0 && hi_frac >= 0.0 && hi_frac <= 1.0))
    throw InvalidArgument("make_spike_continuum: fractions must lie in [0, 1]");
  Eigen::VectorXd grid(n_points);
  const double step = omega_max / static_cast<double>(n_points - 1);
  for (Eigen::Index i = 0; i < n_points; ++i) grid(i) = step * static_cast<double>(i);

  const auto lo = static_cast<Eigen::Index>(std::lround(lo_frac * static_cast<double>(n_points - 1)));
  const auto hi = static_cast<Eigen::Index>(std::lround(hi_frac * static_cast<double>(n_points - 1)));
  if (lo == hi) throw InvalidArgument("make_spike_continuum: the two spikes must be distinct");

  Eigen::VectorXd wts = Eigen::VectorXd::Constant(n_points, step);
  wts(0) = 0.5 * step;
  wts(n_points - 1) = 0.5 * step;
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(n_points);
  diag /= wts.dot(diag);

  // Scale so the undamped pairing oscillation has amplitude 2 * amp.
  Eigen::MatrixXcd rho_off = Eigen::MatrixXcd::Zero(n_points, n_points);
  rho_off(lo, hi) = amp / (wts(lo) * wts(hi));
  rho_off(hi, lo) = amp / (wts(lo) * wts(hi));
  Eigen::MatrixXcd obs_off = Eigen::MatrixXcd::Zero(n_points, n_points);
  obs_off(lo, hi) = 1.0;
  obs_off(hi, lo) = 1.0;
  return QuasiContinuousModel(grid, diag, rho_off, Eigen::VectorXd::Ones(n_points), obs_off, hbar);
}

VanHoveObservable make_gaussian_vanhove(const Eigen::VectorXd& omega_grid, double center,
                                        double diag_width, double corr_width, double amp,
                                        double phase_twist, const std::string& name) {
  if (!(diag_width > 0.0) || !(corr_width > 0.0))
    throw InvalidArgument("make_gaussian_vanhove: widths must be positive");
  const Eigen::Index k = omega_grid.size();
  Eigen::VectorXd diag(k);
  Eigen::VectorXd env(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double u = (omega_grid(i) - center) / diag_width;
    diag(i) = std::exp(-0.5 * u * u);
    env(i) = std::exp(-0.25 * u * u);
  }
  Eigen::MatrixXcd off(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double d = omega_grid(i) - omega_grid(j);
      off(i, j) = amp * env(i) * env(j) * std::exp(-0.5 * d * d / (corr_width * corr_width)) *
                  std::polar(1.0, phase_twist * d);
    }
  return VanHoveObservable{diag, off, name};
}

DiscreteSpectrumSystem::DiscreteSpectrumSystem(HamiltonianModel h_in, QuantumState rho_in,
                                               QuantumObservable obs_in)
    : h(std::move(h_in)), rho(std::move(rho_in)), obs(std::move(obs_in)) {
  if (rho.dim() != h.dim() || obs.dim() != h.dim())
    throw DimensionMismatch("DiscreteSpectrumSystem: state, observable and levels disagree");
}

std::vector<double> mean_value_series(const QuantumSystemModel& model, long long horizon) {
  if (!model.discrete && !model.continuum)
    throw InvalidArgument("mean_value_series: the system model is empty");
  std::vector<double> out;
  if (model.discrete)
    out = mean_value_series(model.discrete->rho, model.discrete->obs, model.discrete->h, horizon);
  if (model.continuum) {
    const std::vector<double> cont = model.continuum->mean_series(horizon);
    if (out.empty())
      out = cont;
    else
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += cont[i];
  }
  return out;
}

QuantumClassification classify_quantum(const QuantumSystemModel& model, long long horizon,
                                       double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("classify_quantum: tol must be positive");
  if (horizon < 10) throw InvalidArgument("classify_quantum: horizon must be >= 10");

  QuantumClassification rep;
  rep.horizon = horizon;
  rep.tol = tol;
  rep.series = mean_value_series(model, horizon);

  const HamiltonianModel h_eff =
      model.discrete ? model.discrete->h
                     : HamiltonianModel(Eigen::VectorXd::Zero(1),
                                        model.continuum ? model.continuum->hbar() : 1.0);
  rep.split = qsdt_split(rep.series, h_eff, tol, false);

  double scale = 0.0;
  for (double v : rep.series) scale = std::max(scale, std::abs(v));
  const double thr = tol * std::max(1.0, scale);

  const double osc_amp = 0.5 * (rep.split.A - rep.split.B);
  const bool has_osc = osc_amp > thr;
  const double tail_max = rep.split.decade_max.empty() ? 0.0 : rep.split.decade_max.back();
  const bool decay_ok =
      rep.split.remainder_negligible || (rep.split.remainder_decays && tail_max <= thr);
  const long long onset = certified_onset(rep.split.remainder, thr);

  rep.exactness = "unknown";
  if (model.discrete && !model.continuum) {
    if (rep.split.remainder_negligible) {
      rep.verdict = "ergodic";
      rep.evidence.push_back("no decaying component: max |remainder| at numerical zero");
      rep.evidence.push_back("oscillatory part " + rep.split.period_note);
      if (osc_amp <= thr)
        rep.evidence.push_back("oscillation is trivial (constant pairing, period 1)");
    } else {
      rep.verdict = "unknown";
      rep.evidence.push_back(
          "remainder is neither negligible nor explained by the discrete gaps (last decade max " +
          fmt(tail_max) + ")");
    }
  } else if (model.continuum && !model.discrete) {
    if (decay_ok) {
      rep.verdict = "mixing";
      rep.exactness = "exact (sufficient condition)";
      rep.evidence.push_back("non-constant pairing decays below " + fmt(thr) + " by n = " +
                             std::to_string(std::max<long long>(onset, 0)));
      rep.evidence.push_back("weak limit exists: pairings settle at the diagonal average " +
                             fmt(rep.split.constant_term));
    } else {
      rep.verdict = "unknown";
      rep.evidence.push_back("oscillatory integral does not decay (last decade max " +
                             fmt(tail_max) + "); no weak limit certified");
    }
  } else {
    if (has_osc && decay_ok) {
      rep.verdict = "ergodic";
      rep.evidence.push_back("undamped periodic component persists (amplitude " + fmt(osc_amp) +
                             ", " + rep.split.period_note + "): mixing is ruled out");
      rep.evidence.push_back("continuum contribution decays (last decade max " + fmt(tail_max) +
                             ")");
    } else if (!has_osc && decay_ok) {
      rep.verdict = "mixing";
      rep.exactness = "exact (sufficient condition)";
      rep.evidence.push_back("no oscillation above " + fmt(thr) +
                             " and the remainder decays: weak limit exists");
    } else {
      rep.verdict = "unknown";
      rep.evidence.push_back("evidence inconclusive: oscillation amplitude " + fmt(osc_amp) +
                             ", last decade max " + fmt(tail_max));
    }
  }
  return rep;
}

QuantumClassification classify_quantum(const HamiltonianModel& h, const QuantumState& rho,
                                       const QuantumObservable& obs, long long horizon,
                                       double tol) {
  QuantumSystemModel m;
  m.discrete.emplace(h, rho, obs);
  return classify_quantum(m, horizon, tol);
}

QuantumClassification classify_quantum(const QuasiContinuousModel& qc, long long horizon,
                                       double tol) {
  QuantumSystemModel m;
  m.continuum = qc;
  return classify_quantum(m, horizon, tol);
}

WeakLimitReport weak_limit(const QuasiContinuousModel& model,
                           const std::vector<VanHoveObservable>& basket, long long horizon,
                           double tol) {
  if (basket.empty()) throw InvalidArgument("weak_limit: the observable basket is empty");
  if (!(tol > 0.0)) throw InvalidArgument("weak_limit: tol must be positive");
  if (horizon < 1) throw InvalidArgument("weak_limit: horizon must be >= 1");

  WeakLimitReport rep;
  rep.horizon = horizon;
  rep.tol = tol;
  rep.limit_diag = model.rho_diag();
  long long worst_onset = 0;
  for (const auto& o : basket) {
    rep.limit_values.push_back(model.diagonal_pairing(o));
    std::vector<double> gaps = model.offdiagonal_series(horizon, o);
    for (double& g : gaps) g = std::abs(g);
    const long long onset = certified_onset(gaps, tol);
    if (onset < 0) {
      throw NoWeakLimit("weak_limit: pairing with '" + o.name +
                            "' keeps oscillating above tol = " + fmt(tol) +
                            " through the horizon",
                        gaps);
    }
    worst_onset = std::max(worst_onset, onset);
    rep.gap_curves.push_back(std::move(gaps));
  }
  rep.certified_horizon = worst_onset;
  rep.notes.push_back("all " + std::to_string(basket.size()) +
                      " pairings stay within tol of their limits from n = " +
                      std::to_string(worst_onset) + " on");
  return rep;
}

WeakLimitReport weak_limit(const HamiltonianModel& h, const QuantumState& rho,
                           const std::vector<QuantumObservable>& basket, long long horizon,
                           double tol) {
  if (basket.empty()) throw InvalidArgument("weak_limit: the observable basket is empty");
  if (!(tol > 0.0)) throw InvalidArgument("weak_limit: tol must be positive");
  if (horizon < 1) throw InvalidArgument("weak_limit: horizon must be >= 1");

  WeakLimitReport rep;
  rep.horizon = horizon;
  rep.tol = tol;
  rep.limit_diag = rho.matrix().diagonal().real();
  long long worst_onset = 0;
  for (const auto& o : basket) {
    double limit = 0.0;
    for (Eigen::Index j = 0; j < rho.dim(); ++j)
      limit += (rho.matrix()(j, j) * o.matrix()(j, j)).real();
    rep.limit_values.push_back(limit);
    std::vector<double> gaps = mean_value_series(rho, o, h, horizon);
    for (double& g : gaps) g = std::abs(g - limit);
    const long long onset = certified_onset(gaps, tol);
    if (onset < 0) {
      throw NoWeakLimit(
          "weak_limit: off-diagonal oscillation persists above tol = " + fmt(tol) +
              " through the horizon (discrete spectrum)",
          gaps);
    }
    worst_onset = std::max(worst_onset, onset);
    rep.gap_curves.push_back(std::move(gaps));
  }
  rep.certified_horizon = worst_onset;
  rep.notes.push_back("diagonal pairings certified from n = " + std::to_string(worst_onset) +
                      " on");
  return rep;
}

HomogenizationReport homogenization_check(const QuasiContinuousModel& base,
                                          const std::vector<RhoVariant>& variants,
                                          const std::vector<VanHoveObservable>& basket,
                                          double tol, long long horizon) {
  if (variants.empty()) throw InvalidArgument("homogenization_check: no state variants given");
  if (basket.empty()) throw InvalidArgument("homogenization_check: the observable basket is empty");

  const QuantumClassification cls = classify_quantum(base, horizon, tol);
  if (cls.verdict != "mixing")
    throw InvalidArgument("homogenization_check: the base model must classify as mixing (got '" +
                          cls.verdict + "')");

  HomogenizationReport rep;
  std::vector<std::vector<double>> limit_values;
  std::vector<Eigen::VectorXd> diags;
  for (const auto& v : variants) {
    const QuasiContinuousModel m = base.with_rho(v.diag, v.offdiag);
    const WeakLimitReport wl = weak_limit(m, basket, horizon, tol);
    limit_values.push_back(wl.limit_values);
    diags.push_back(wl.limit_diag);
    rep.variant_names.push_back(v.name);
    rep.certified_horizons.push_back(wl.certified_horizon);
    rep.identity_coefficients.push_back(m.weights().dot(m.rho_diag()));
  }

  for (std::size_t a = 0; a < variants.size(); ++a)
    for (std::size_t b = a + 1; b < variants.size(); ++b) {
      double gap = 0.0;
      for (std::size_t o = 0; o < basket.size(); ++o)
        gap = std::max(gap, std::abs(limit_values[a][o] - limit_values[b][o]));
      double l1 = 0.0;
      for (Eigen::Index i = 0; i < diags[a].size(); ++i)
        l1 += base.weights()(i) * std::abs(diags[a](i) - diags[b](i));
      const double worst = std::max(gap, l1);
      rep.worst_pair_gap = std::max(rep.worst_pair_gap, worst);
      if (worst > tol)
        throw HomogenizationViolation(
            "homogenization_check: '" + variants[a].name + "' and '" + variants[b].name +
                "' reach different weak limits (pairing gap " + fmt(gap) + ", profile L1 gap " +
                fmt(l1) + ")",
            limit_values[a], limit_values[b]);
    }

  rep.identity_ok = true;
  for (double c : rep.identity_coefficients)
    if (std::abs(c - 1.0) > kIdentityCoeffTol) rep.identity_ok = false;
  rep.homogenized = true;
  rep.common_limit = diags.front();
  rep.notes.push_back("all " + std::to_string(variants.size()) +
                      " initial states relax to the same diagonal profile (worst gap " +
                      fmt(rep.worst_pair_gap) + ")");
  rep.notes.push_back(rep.identity_ok
                          ? "identity pairing returns the state normalization 1 exactly"
                          : "identity pairing drifted from 1 beyond " + fmt(kIdentityCoeffTol));
  return rep;
}

TwoLevelReport two_level_demo(double e1, double e2, double hbar, double rho11, double rho22,
                              std::complex<double> rho12, double o11, double o22,
                              std::complex<double> o12, long long M, long long horizon) {
  if (!(hbar > 0.0)) throw InvalidArgument("two_level_demo: hbar must be positive");
  if (M < 1) throw InvalidArgument("two_level_demo: Cesaro truncation M must be >= 1");
  if (horizon < 1) throw InvalidArgument("two_level_demo: horizon must be >= 1");
  if (rho11 < -1e-12 || rho22 < -1e-12 || std::abs(rho11 + rho22 - 1.0) > 1e-12)
    throw InvalidArgument("two_level_demo: level populations must be nonnegative and sum to 1");
  if (std::norm(rho12) > rho11 * rho22 + 1e-12)
    throw InvalidArgument("two_level_demo: |rho12|^2 must not exceed rho11 * rho22");

  Eigen::MatrixXcd rho_m(2, 2);
  rho_m << rho11, rho12, std::conj(rho12), rho22;
  Eigen::MatrixXcd obs_m(2, 2);
  obs_m << o11, o12, std::conj(o12), o22;
  Eigen::VectorXd energies(2);
  energies << e1, e2;

  const QuantumState rho(rho_m);
  const QuantumObservable obs(obs_m);
  const HamiltonianModel h(energies, hbar);

  TwoLevelReport rep;
  rep.e1 = e1;
  rep.e2 = e2;
  rep.hbar = hbar;
  const double theta = (e1 - e2) / hbar;
  rep.z = std::polar(1.0, -theta);
  rep.degenerate = std::abs(theta) < 1e-12;

  const long long length = std::max(horizon + 1, M);
  const std::vector<double> full = mean_value_series(rho, obs, h, length - 1);
  rep.series.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(horizon + 1));

  rep.cesaro = cesaro_limit(full, M);
  std::vector<std::complex<double>> phase;
  phase.reserve(static_cast<std::size_t>(M));
  for (long long n = 0; n < M; ++n)
    phase.push_back(std::polar(1.0, -theta * static_cast<double>(n)));
  rep.phase_cesaro = cesaro_limit(phase, M, rep.z);

  if (rep.degenerate) {
    rep.phase_bound_margin = std::numeric_limits<double>::quiet_NaN();
    rep.notes.push_back("degenerate spectrum: z = 1, the series is constant");
  } else {
    const double inv = 2.0 / std::abs(1.0 - rep.z);
    double margin = std::numeric_limits<double>::infinity();
    for (long long m = 1; m <= M; ++m)
      margin = std::min(margin, inv / static_cast<double>(m) -
                                    std::abs(rep.phase_cesaro.running[static_cast<std::size_t>(
                                        m - 1)]));
    rep.phase_bound_margin = margin;
  }

  rep.split = qsdt_split(rep.series, h, 1e-8, false);
  rep.verdict = "ergodic";
  rep.evidence.push_back("remainder identified as zero: the series is purely oscillatory");
  rep.evidence.push_back("oscillatory part " + rep.split.period_note);
  rep.evidence.push_back("cyclic structure: the pairing revisits its values, mixing is ruled out");

  rep.diagonal_part = rho11 * o11 + rho22 * o22;
  rep.numeric_limit = rep.cesaro.limit_estimate.real();
  rep.diagonal_gap = std::abs(rep.numeric_limit - rep.diagonal_part);

  if (rep.degenerate) {
    rep.fixed_weight_offdiag = std::numeric_limits<double>::quiet_NaN();
    rep.fixed_weight_limit = std::numeric_limits<double>::quiet_NaN();
    rep.fixed_weight_gap = std::numeric_limits<double>::quiet_NaN();
    rep.fixed_weight_consistent = false;
    rep.notes.push_back("fixed-weight closed form undefined at z = 1");
  } else {
    rep.fixed_weight_offdiag = 2.0 * (rho12 * std::conj(o12) / (1.0 - rep.z)).real();
    rep.fixed_weight_limit = rep.diagonal_part + rep.fixed_weight_offdiag;
    rep.fixed_weight_gap = std::abs(rep.numeric_limit - rep.fixed_weight_limit);
    rep.fixed_weight_consistent = rep.fixed_weight_gap <= rep.diagonal_gap + 1e-12;
    if (!rep.fixed_weight_consistent)
      rep.notes.push_back(
          "the computed Cesaro limit keeps only the diagonal part; the fixed off-diagonal "
          "weight 1/(1-z) does not survive averaging (running averages shrink like 2/(M|1-z|))");
  }
  return rep;
}

}  // namespace ehkit
