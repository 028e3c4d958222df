#include "ehkit/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ehkit {

namespace {
constexpr double kMassTol = 1e-10;
constexpr double kPartitionTol = 1e-12;
constexpr double kClampFloor = -1e-14;
}  // namespace

std::string to_string(Domain d) {
  return d == Domain::UnitInterval ? "unit_interval" : "unit_square";
}

Domain domain_from_string(const std::string& s) {
  if (s == "unit_interval") return Domain::UnitInterval;
  if (s == "unit_square") return Domain::UnitSquare;
  throw InvalidArgument("unknown domain '" + s + "'");
}

PartitionedMeasureSpace::PartitionedMeasureSpace(Eigen::VectorXd cell_measures, Domain domain)
    : measures_(std::move(cell_measures)), domain_(domain) {
  if (measures_.size() == 0) throw InvalidArgument("partition needs at least one cell");
  for (Eigen::Index i = 0; i < measures_.size(); ++i) {
    if (!std::isfinite(measures_[i]) || measures_[i] <= 0.0)
      throw InvalidArgument("cell measure " + std::to_string(i) + " must be positive, got " +
                            std::to_string(measures_[i]));
  }
  const double total = measures_.sum();
  if (std::abs(total - 1.0) > kPartitionTol)
    throw InvalidArgument("cell measures must sum to 1, got " + std::to_string(total));
  if (domain_ == Domain::UnitSquare) {
    grid_side();  // validates n = k^2
  }
  breaks_.resize(n_cells() + 1);
  breaks_[0] = 0.0;
  std::partial_sum(measures_.begin(), measures_.end(), breaks_.begin() + 1);
  breaks_.back() = 1.0;
}

PartitionedMeasureSpace PartitionedMeasureSpace::uniform(std::size_t n_cells, Domain domain) {
  if (n_cells == 0) throw InvalidArgument("partition needs at least one cell");
  Eigen::VectorXd m = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_cells),
                                                1.0 / static_cast<double>(n_cells));
  return PartitionedMeasureSpace(std::move(m), domain);
}

std::size_t PartitionedMeasureSpace::grid_side() const {
  const std::size_t n = n_cells();
  const auto k = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  if (k * k != n)
    throw InvalidArgument("square-domain partition needs a square cell count, got " +
                          std::to_string(n));
  return k;
}

std::size_t PartitionedMeasureSpace::locate(double x) const {
  if (x <= 0.0) return 0;
  if (x >= 1.0) return n_cells() - 1;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  const auto idx = static_cast<std::size_t>(std::distance(breaks_.begin(), it)) - 1;
  return std::min(idx, n_cells() - 1);
}

bool PartitionedMeasureSpace::same_as(const PartitionedMeasureSpace& other, double tol) const {
  if (domain_ != other.domain_ || measures_.size() != other.measures_.size()) return false;
  return (measures_ - other.measures_).cwiseAbs().maxCoeff() <= tol;
}

SpacePtr make_uniform_space(std::size_t n_cells, Domain domain) {
  return std::make_shared<const PartitionedMeasureSpace>(
      PartitionedMeasureSpace::uniform(n_cells, domain));
}

SpacePtr make_space(Eigen::VectorXd cell_measures, Domain domain) {
  return std::make_shared<const PartitionedMeasureSpace>(std::move(cell_measures), domain);
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* context) {
  if (!a || !b) throw InvalidArgument(std::string(context) + ": missing partition");
  if (a == b) return;
  if (!a->same_as(*b))
    throw DimensionMismatch(std::string(context) + ": objects live over different partitions (" +
                            std::to_string(a->n_cells()) + " vs " + std::to_string(b->n_cells()) +
                            " cells)");
}

Density::Density(SpacePtr space, Eigen::VectorXd values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw InvalidArgument("density needs a partition");
  if (static_cast<std::size_t>(values_.size()) != space_->n_cells())
    throw DimensionMismatch("density has " + std::to_string(values_.size()) + " values for " +
                            std::to_string(space_->n_cells()) + " cells");
  double total = 0.0;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw InvalidArgument("density value " + std::to_string(i) + " is not finite");
    if (values_[i] < 0.0) {
      if (values_[i] < kClampFloor)
        throw InvalidArgument("density value " + std::to_string(i) + " is negative: " +
                              std::to_string(values_[i]));
      values_[i] = 0.0;
    }
    total += values_[i] * space_->measure(static_cast<std::size_t>(i));
  }
  if (std::abs(total - 1.0) > kMassTol)
    throw InvalidArgument("density mass must be 1, got " + std::to_string(total));
}

Density Density::normalized(SpacePtr space, Eigen::VectorXd raw) {
  if (!space) throw InvalidArgument("density needs a partition");
  if (static_cast<std::size_t>(raw.size()) != space->n_cells())
    throw DimensionMismatch("density has " + std::to_string(raw.size()) + " values for " +
                            std::to_string(space->n_cells()) + " cells");
  double total = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i]))
      throw InvalidArgument("density value " + std::to_string(i) + " is not finite");
    if (raw[i] < 0.0) {
      if (raw[i] < kClampFloor)
        throw InvalidArgument("cannot normalize: value " + std::to_string(i) + " is negative: " +
                              std::to_string(raw[i]));
      raw[i] = 0.0;
    }
    total += raw[i] * space->measure(static_cast<std::size_t>(i));
  }
  if (total <= 0.0) throw InvalidArgument("cannot normalize a zero vector into a density");
  raw /= total;
  return Density(std::move(space), std::move(raw));
}

Density Density::uniform(SpacePtr space) {
  if (!space) throw InvalidArgument("density needs a partition");
  const auto n = static_cast<Eigen::Index>(space->n_cells());
  return Density(std::move(space), Eigen::VectorXd::Ones(n));
}

Density Density::indicator(SpacePtr space, const std::vector<std::size_t>& cells) {
  if (!space) throw InvalidArgument("density needs a partition");
  if (cells.empty()) throw InvalidArgument("indicator density needs at least one cell");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->n_cells()));
  for (std::size_t c : cells) {
    if (c >= space->n_cells())
      throw InvalidArgument("indicator cell " + std::to_string(c) + " out of range");
    v[static_cast<Eigen::Index>(c)] = 1.0;
  }
  return normalized(std::move(space), std::move(v));
}

double Density::mass() const {
  return values_.dot(space_->measures());
}

ClassicalObservable::ClassicalObservable(SpacePtr space, Eigen::VectorXd values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw InvalidArgument("observable needs a partition");
  if (static_cast<std::size_t>(values_.size()) != space_->n_cells())
    throw DimensionMismatch("observable has " + std::to_string(values_.size()) + " values for " +
                            std::to_string(space_->n_cells()) + " cells");
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw InvalidArgument("observable value " + std::to_string(i) + " is not finite");
}

ClassicalObservable ClassicalObservable::constant(SpacePtr space, double c) {
  if (!space) throw InvalidArgument("observable needs a partition");
  const auto n = static_cast<Eigen::Index>(space->n_cells());
  return ClassicalObservable(std::move(space), Eigen::VectorXd::Constant(n, c));
}

ClassicalObservable ClassicalObservable::indicator(SpacePtr space,
                                                   const std::vector<std::size_t>& cells) {
  if (!space) throw InvalidArgument("observable needs a partition");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->n_cells()));
  for (std::size_t c : cells) {
    if (c >= space->n_cells())
      throw InvalidArgument("indicator cell " + std::to_string(c) + " out of range");
    v[static_cast<Eigen::Index>(c)] = 1.0;
  }
  return ClassicalObservable(std::move(space), std::move(v));
}

ClassicalObservable ClassicalObservable::ramp(SpacePtr space) {
  if (!space) throw InvalidArgument("observable needs a partition");
  const auto n = static_cast<Eigen::Index>(space->n_cells());
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
  return ClassicalObservable(std::move(space), std::move(v));
}

double ClassicalObservable::sup_norm() const {
  return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

double inner_product(const Density& f, const ClassicalObservable& g) {
  require_same_space(f.space(), g.space(), "inner_product");
  return f.values().cwiseProduct(g.values()).dot(f.space()->measures());
}

double inner_product(const Eigen::VectorXd& density_values, const ClassicalObservable& g) {
  if (density_values.size() != g.values().size())
    throw DimensionMismatch("inner_product: vector has " + std::to_string(density_values.size()) +
                            " values for " + std::to_string(g.values().size()) + " cells");
  return density_values.cwiseProduct(g.values()).dot(g.space()->measures());
}

double l1_distance(const Density& f, const Density& h) {
  require_same_space(f.space(), h.space(), "l1_distance");
  return (f.values() - h.values()).cwiseAbs().dot(f.space()->measures());
}

double l1_norm(const Eigen::VectorXd& density_values, const PartitionedMeasureSpace& space) {
  if (static_cast<std::size_t>(density_values.size()) != space.n_cells())
    throw DimensionMismatch("l1_norm: vector size does not match partition");
  return density_values.cwiseAbs().dot(space.measures());
}

}  // namespace ehkit
