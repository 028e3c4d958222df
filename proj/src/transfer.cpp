#include "ehkit/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace ehkit {

namespace {
constexpr double kEntryFloor = -1e-12;
constexpr double kColumnMassTol = 1e-9;
constexpr double kDomainSlack = 1e-9;
}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::ExactPermutation: return "exact_permutation";
    case Provenance::Ulam: return "ulam";
    case Provenance::Custom: return "custom";
  }
  return "custom";
}

TransferOperator::TransferOperator(SpacePtr space, Eigen::MatrixXd matrix, Provenance provenance,
                                   std::string source)
    : space_(std::move(space)), m_(std::move(matrix)), provenance_(provenance),
      source_(std::move(source)) {
  if (!space_) throw InvalidArgument("transfer operator needs a partition");
  const auto n = static_cast<Eigen::Index>(space_->n_cells());
  if (m_.rows() != n || m_.cols() != n)
    throw DimensionMismatch("transfer matrix is " + std::to_string(m_.rows()) + "x" +
                            std::to_string(m_.cols()) + " for " + std::to_string(n) + " cells");
  for (Eigen::Index j = 0; j < n; ++j) {
    double col_mass = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double& e = m_(i, j);
      if (!std::isfinite(e)) throw InvariantViolation("transfer matrix has a non-finite entry");
      if (e < 0.0) {
        if (e < kEntryFloor)
          throw InvariantViolation("transfer matrix entry (" + std::to_string(i) + "," +
                                   std::to_string(j) + ") is negative: " + std::to_string(e));
        e = 0.0;
      }
      col_mass += e * space_->measure(static_cast<std::size_t>(i));
    }
    const double mu_j = space_->measure(static_cast<std::size_t>(j));
    if (std::abs(col_mass - mu_j) > kColumnMassTol)
      throw InvariantViolation("column " + std::to_string(j) + " does not conserve mass: carries " +
                               std::to_string(col_mass) + " instead of " + std::to_string(mu_j));
  }
}

Density TransferOperator::apply(const Density& f) const {
  require_same_space(space_, f.space(), "transfer apply");
  return Density(space_, m_ * f.values());
}

Eigen::VectorXd TransferOperator::apply_values(const Eigen::VectorXd& values) const {
  if (values.size() != m_.cols())
    throw DimensionMismatch("transfer apply: vector size does not match partition");
  return m_ * values;
}

KoopmanOperator::KoopmanOperator(SpacePtr space, Eigen::MatrixXd matrix)
    : space_(std::move(space)), m_(std::move(matrix)) {
  if (!space_) throw InvalidArgument("composition operator needs a partition");
  const auto n = static_cast<Eigen::Index>(space_->n_cells());
  if (m_.rows() != n || m_.cols() != n)
    throw DimensionMismatch("composition matrix size does not match partition");
}

ClassicalObservable KoopmanOperator::apply(const ClassicalObservable& g) const {
  require_same_space(space_, g.space(), "composition apply");
  return ClassicalObservable(space_, m_ * g.values());
}

Eigen::VectorXd KoopmanOperator::apply_values(const Eigen::VectorXd& values) const {
  if (values.size() != m_.cols())
    throw DimensionMismatch("composition apply: vector size does not match partition");
  return m_ * values;
}

TransferOperator ulam_operator(const MapSystem& map, SpacePtr space,
                               std::size_t samples_per_cell, std::uint64_t seed) {
  if (!space) throw InvalidArgument("ulam_operator needs a partition");
  if (samples_per_cell == 0) throw InvalidArgument("ulam_operator needs at least one sample");
  if (map.domain() != space->domain())
    throw InvalidArgument("map domain does not match the partition domain");
  const std::size_t n = space->n_cells();
  const auto ni = static_cast<Eigen::Index>(n);

  if (auto pi = map.exact_permutation(n)) {
    // Rigid cell shift: write the permutation matrix directly, no sampling.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ni, ni);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = (*pi)[j];
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          space->measure(j) / space->measure(i);
    }
    return TransferOperator(std::move(space), std::move(m), Provenance::ExactPermutation,
                            map.name());
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(ni, ni);
  const double inv_s = 1.0 / static_cast<double>(samples_per_cell);

  if (space->domain() == Domain::UnitInterval) {
    const auto& breaks = space->breaks();
    for (std::size_t j = 0; j < n; ++j) {
      const double a = breaks[j], b = breaks[j + 1];
      for (std::size_t k = 0; k < samples_per_cell; ++k) {
        // One sample per stratum keeps the column estimate low-variance.
        const double u = (static_cast<double>(k) + unif(rng)) * inv_s;
        const Point out = map.apply({a + u * (b - a), 0.0});
        if (out.x < -kDomainSlack || out.x > 1.0 + kDomainSlack)
          throw MapRangeError("map '" + map.name() + "' sent a sample from cell " +
                                  std::to_string(j) + " to x=" + std::to_string(out.x) +
                                  ", outside the unit interval",
                              j, out.x, out.y);
        counts(static_cast<Eigen::Index>(space->locate(out.x)), static_cast<Eigen::Index>(j)) +=
            1.0;
      }
    }
  } else {
    const std::size_t side = space->grid_side();
    const double cell_w = 1.0 / static_cast<double>(side);
    for (std::size_t j = 0; j < n; ++j) {
      const double x0 = static_cast<double>(j % side) * cell_w;
      const double y0 = static_cast<double>(j / side) * cell_w;
      for (std::size_t k = 0; k < samples_per_cell; ++k) {
        const double u = (static_cast<double>(k) + unif(rng)) * inv_s;
        const Point out = map.apply({x0 + u * cell_w, y0 + unif(rng) * cell_w});
        if (out.x < -kDomainSlack || out.x > 1.0 + kDomainSlack || out.y < -kDomainSlack ||
            out.y > 1.0 + kDomainSlack)
          throw MapRangeError("map '" + map.name() + "' sent a sample from cell " +
                                  std::to_string(j) + " to (" + std::to_string(out.x) + "," +
                                  std::to_string(out.y) + "), outside the unit square",
                              j, out.x, out.y);
        const auto ix = std::min(static_cast<std::size_t>(std::max(out.x, 0.0) *
                                                          static_cast<double>(side)),
                                 side - 1);
        const auto iy = std::min(static_cast<std::size_t>(std::max(out.y, 0.0) *
                                                          static_cast<double>(side)),
                                 side - 1);
        counts(static_cast<Eigen::Index>(iy * side + ix), static_cast<Eigen::Index>(j)) += 1.0;
      }
    }
  }

  // counts/s gives the fraction of cell j's mass landing in cell i; convert
  // mass fractions to the density-value action.
  Eigen::MatrixXd m(ni, ni);
  for (Eigen::Index j = 0; j < ni; ++j)
    for (Eigen::Index i = 0; i < ni; ++i)
      m(i, j) = counts(i, j) * inv_s * space->measure(static_cast<std::size_t>(j)) /
                space->measure(static_cast<std::size_t>(i));
  return TransferOperator(std::move(space), std::move(m), Provenance::Ulam,
                          map.name() + " samples=" + std::to_string(samples_per_cell) +
                              " seed=" + std::to_string(seed));
}

KoopmanOperator koopman_of(const TransferOperator& p) {
  const auto& mu = p.space()->measures();
  // U = D^{-1} M^T D, the adjoint under the mu-weighted pairing.
  Eigen::MatrixXd u = mu.cwiseInverse().asDiagonal() * p.matrix().transpose() * mu.asDiagonal();
  return KoopmanOperator(p.space(), std::move(u));
}

MarkovReport verify_markov(const TransferOperator& p, std::size_t trials, std::uint64_t seed) {
  MarkovReport rep;
  const auto& m = p.matrix();
  const auto& space = *p.space();
  const auto n = static_cast<Eigen::Index>(space.n_cells());

  rep.worst_negative_entry = std::min(0.0, m.minCoeff());
  rep.entries_nonnegative = rep.worst_negative_entry >= kEntryFloor;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif01(0.0, 1.0);
  std::uniform_real_distribution<double> unif11(-1.0, 1.0);

  for (std::size_t t = 0; t < trials; ++t) {
    Eigen::VectorXd f(n), s(n), h(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      f[i] = unif01(rng);
      s[i] = unif11(rng);
      h[i] = unif01(rng);
    }
    const double defect = std::abs(l1_norm(m * f, space) - l1_norm(f, space));
    rep.worst_mass_defect = std::max(rep.worst_mass_defect, defect);
    const double excess = l1_norm(m * s, space) - l1_norm(s, space);
    rep.worst_contraction_excess = std::max(rep.worst_contraction_excess, excess);
    // f >= f - h and P is linear, so monotonicity reduces to P h >= 0.
    const double neg = std::min(0.0, (m * h).minCoeff());
    rep.worst_monotonicity_defect = std::min(rep.worst_monotonicity_defect, neg);
  }
  rep.mass_conserving = rep.worst_mass_defect <= 1e-9;
  rep.l1_contractive = rep.worst_contraction_excess <= 1e-9;
  rep.monotone = rep.worst_monotonicity_defect >= -1e-10;
  return rep;
}

Density iterate(const TransferOperator& p, const Density& f, std::size_t n) {
  require_same_space(p.space(), f.space(), "iterate");
  Eigen::VectorXd v = f.values();
  for (std::size_t k = 0; k < n; ++k) v = p.matrix() * v;
  return Density(p.space(), std::move(v));
}

Density stationary_density(const TransferOperator& p, double tol, std::size_t max_iter) {
  const auto& space = *p.space();
  const auto n = static_cast<Eigen::Index>(space.n_cells());
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd avg_sum = x;
  double best_residual = std::numeric_limits<double>::infinity();

  for (std::size_t k = 1; k <= max_iter; ++k) {
    Eigen::VectorXd px = p.matrix() * x;
    const double res_x = l1_norm(px - x, space);
    avg_sum += px;
    x.swap(px);
    best_residual = std::min(best_residual, res_x);
    if (res_x <= tol) return Density::normalized(p.space(), x);
    // The plain iterate stalls on rotating components; the Cesaro average
    // still settles, so test it periodically.
    if (k % 16 == 0) {
      Eigen::VectorXd a = avg_sum / static_cast<double>(k + 1);
      const double res_a = l1_norm(p.matrix() * a - a, space);
      best_residual = std::min(best_residual, res_a);
      if (res_a <= tol) return Density::normalized(p.space(), a);
    }
  }
  throw ConvergenceFailure("stationary density did not converge within " +
                               std::to_string(max_iter) + " iterations (best residual " +
                               std::to_string(best_residual) + ")",
                           best_residual, max_iter);
}

}  // namespace ehkit
