#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "ehkit/map_system.hpp"
#include "ehkit/measure.hpp"

namespace ehkit {

enum class Provenance { ExactPermutation, Ulam, Custom };

std::string to_string(Provenance p);

// Finite-rank transfer operator acting on density values: (Pf)_i = sum_j M_ij f_j.
// Columns conserve mass under the cell measures (sum_i M_ij mu_i = mu_j), which
// makes P a Markov operator: positivity-preserving and norm-preserving on
// nonnegative densities.
class TransferOperator {
 public:
  TransferOperator(SpacePtr space, Eigen::MatrixXd matrix, Provenance provenance,
                   std::string source = "");

  const Eigen::MatrixXd& matrix() const { return m_; }
  const SpacePtr& space() const { return space_; }
  Provenance provenance() const { return provenance_; }
  const std::string& source() const { return source_; }
  std::size_t n_cells() const { return space_->n_cells(); }

  Density apply(const Density& f) const;
  Eigen::VectorXd apply_values(const Eigen::VectorXd& values) const;

 private:
  SpacePtr space_;
  Eigen::MatrixXd m_;
  Provenance provenance_;
  std::string source_;
};

// Adjoint (composition) operator acting on observables: (Ug)(x) = g(S x).
// Satisfies the duality <P^n f, g> = <f, U^n g> exactly at the matrix level.
class KoopmanOperator {
 public:
  KoopmanOperator(SpacePtr space, Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const { return m_; }
  const SpacePtr& space() const { return space_; }

  ClassicalObservable apply(const ClassicalObservable& g) const;
  Eigen::VectorXd apply_values(const Eigen::VectorXd& values) const;

 private:
  SpacePtr space_;
  Eigen::MatrixXd m_;
};

// Discretizes the pushforward of `map` on `space` by sampling each cell with
// `samples_per_cell` stratified points (deterministic for a fixed seed) and
// counting where they land.  Maps that shift cells rigidly are detected and
// produce the exact permutation matrix, bypassing sampling noise entirely.
// Throws MapRangeError if the map sends a sample outside the domain.
TransferOperator ulam_operator(const MapSystem& map, SpacePtr space,
                               std::size_t samples_per_cell = 100, std::uint64_t seed = 0x5eed);

// U = D^{-1} M^T D with D = diag(mu); row-stochastic, so ||Ug||_inf <= ||g||_inf.
KoopmanOperator koopman_of(const TransferOperator& p);

struct MarkovReport {
  bool entries_nonnegative = false;
  bool mass_conserving = false;   // ||Pf||_1 == ||f||_1 on random nonnegative f
  bool l1_contractive = false;    // ||Pf||_1 <= ||f||_1 on random signed f
  bool monotone = false;          // f >= g  =>  Pf >= Pg
  double worst_negative_entry = 0.0;
  double worst_mass_defect = 0.0;
  double worst_contraction_excess = 0.0;
  double worst_monotonicity_defect = 0.0;
  bool all_ok() const {
    return entries_nonnegative && mass_conserving && l1_contractive && monotone;
  }
};

// Property check on random vectors; cheap insurance for custom matrices.
MarkovReport verify_markov(const TransferOperator& p, std::size_t trials = 32,
                           std::uint64_t seed = 0xc0ffee);

Density iterate(const TransferOperator& p, const Density& f, std::size_t n);

// Invariant density via power iteration with a running Cesaro average, which
// converges even when peripheral eigenvalues other than 1 are present.
// Throws ConvergenceFailure (carrying the last residual) when the residual
// ||Pa - a||_1 stays above tol for max_iter sweeps.
Density stationary_density(const TransferOperator& p, double tol = 1e-10,
                           std::size_t max_iter = 20000);

}  // namespace ehkit
