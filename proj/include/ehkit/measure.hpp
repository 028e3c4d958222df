#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ehkit/errors.hpp"

namespace ehkit {

enum class Domain { UnitInterval, UnitSquare };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

// A finite partition of the domain into measurable cells, each carrying a
// strictly positive measure.  Cell measures sum to one.  On the unit interval
// cells are laid out consecutively; on the unit square the partition is a
// k x k grid (n_cells = k^2) indexed row-major as j = iy * k + ix.
class PartitionedMeasureSpace {
 public:
  PartitionedMeasureSpace(Eigen::VectorXd cell_measures, Domain domain);

  static PartitionedMeasureSpace uniform(std::size_t n_cells, Domain domain);

  std::size_t n_cells() const { return static_cast<std::size_t>(measures_.size()); }
  double measure(std::size_t i) const { return measures_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& measures() const { return measures_; }
  Domain domain() const { return domain_; }

  // Side length of the grid for square domains (n_cells = k^2).
  std::size_t grid_side() const;

  // Cumulative cell boundaries on [0,1] for interval domains: cell i is
  // [breaks[i], breaks[i+1]).
  const std::vector<double>& breaks() const { return breaks_; }

  // Cell index containing x in [0,1] (right edge folds into the last cell).
  std::size_t locate(double x) const;

  bool same_as(const PartitionedMeasureSpace& other, double tol = 1e-12) const;

 private:
  Eigen::VectorXd measures_;
  Domain domain_;
  std::vector<double> breaks_;
};

using SpacePtr = std::shared_ptr<const PartitionedMeasureSpace>;

SpacePtr make_uniform_space(std::size_t n_cells, Domain domain = Domain::UnitInterval);
SpacePtr make_space(Eigen::VectorXd cell_measures, Domain domain = Domain::UnitInterval);

// Throws DimensionMismatch unless both objects live over equal partitions.
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* context);

// A probability density in L^1, stored as one value per cell.  The values are
// densities, not masses: the mass in cell i is values[i] * measure(i), and a
// valid density has nonnegative values with total mass one.
class Density {
 public:
  Density(SpacePtr space, Eigen::VectorXd values);

  // Scales a nonnegative vector to unit mass.  Entries in [-1e-14, 0) are
  // clamped to zero; anything more negative, or an all-zero vector, is rejected.
  static Density normalized(SpacePtr space, Eigen::VectorXd raw);

  static Density uniform(SpacePtr space);

  // Normalized indicator of a set of cells: value 1/mu(A) on the set, else 0.
  static Density indicator(SpacePtr space, const std::vector<std::size_t>& cells);

  const Eigen::VectorXd& values() const { return values_; }
  const SpacePtr& space() const { return space_; }
  double mass() const;  // recomputed, == 1 up to tolerance by construction

 private:
  Density() = default;
  SpacePtr space_;
  Eigen::VectorXd values_;
  friend class TransferOperator;
};

// A bounded observable in L^infinity, one value per cell.
class ClassicalObservable {
 public:
  ClassicalObservable(SpacePtr space, Eigen::VectorXd values);

  static ClassicalObservable constant(SpacePtr space, double c);
  // Plain indicator of a set of cells (value 1 on the set, 0 elsewhere).
  static ClassicalObservable indicator(SpacePtr space, const std::vector<std::size_t>& cells);
  // Values 1, 2, ..., n across the cells; a cheap non-constant test function.
  static ClassicalObservable ramp(SpacePtr space);

  const Eigen::VectorXd& values() const { return values_; }
  const SpacePtr& space() const { return space_; }
  double sup_norm() const;

 private:
  SpacePtr space_;
  Eigen::VectorXd values_;
};

// Pairing <f, g> = sum_i f_i g_i mu_i.  With g == 1 this is the mass of f.
double inner_product(const Density& f, const ClassicalObservable& g);
double inner_product(const Eigen::VectorXd& density_values, const ClassicalObservable& g);

// ||f - h||_1 = sum_i |f_i - h_i| mu_i.
double l1_distance(const Density& f, const Density& h);
double l1_norm(const Eigen::VectorXd& density_values, const PartitionedMeasureSpace& space);

}  // namespace ehkit
