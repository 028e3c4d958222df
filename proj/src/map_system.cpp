#include "ehkit/map_system.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace ehkit {

namespace {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // guard against floor rounding at the seam
  return r;
}

}  // namespace

MapSystem::MapSystem(PointMap fn, Domain domain, std::string name, double shift)
    : fn_(std::move(fn)), domain_(domain), name_(std::move(name)), shift_(shift) {}

MapSystem MapSystem::rotation(double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("rotation angle must be finite");
  const double t = wrap_unit(theta);
  return MapSystem([t](const Point& p) { return Point{wrap_unit(p.x + t), 0.0}; },
                   Domain::UnitInterval, "rotation(" + std::to_string(t) + ")", t);
}

MapSystem MapSystem::dyadic() {
  return MapSystem([](const Point& p) { return Point{wrap_unit(2.0 * p.x), 0.0}; },
                   Domain::UnitInterval, "dyadic", std::numeric_limits<double>::quiet_NaN());
}

MapSystem MapSystem::tent() {
  return MapSystem([](const Point& p) { return Point{1.0 - std::abs(1.0 - 2.0 * p.x), 0.0}; },
                   Domain::UnitInterval, "tent", std::numeric_limits<double>::quiet_NaN());
}

MapSystem MapSystem::baker() {
  auto fn = [](const Point& p) {
    if (p.x < 0.5) return Point{2.0 * p.x, 0.5 * p.y};
    return Point{2.0 * p.x - 1.0, 0.5 * p.y + 0.5};
  };
  return MapSystem(fn, Domain::UnitSquare, "baker", std::numeric_limits<double>::quiet_NaN());
}

MapSystem MapSystem::cyclic_shift(unsigned r) {
  if (r == 0) throw InvalidArgument("cyclic_shift needs r >= 1");
  const double t = 1.0 / static_cast<double>(r);
  return MapSystem([t](const Point& p) { return Point{wrap_unit(p.x + t), 0.0}; },
                   Domain::UnitInterval, "cyclic_shift(" + std::to_string(r) + ")", t);
}

MapSystem MapSystem::identity(Domain domain) {
  return MapSystem([](const Point& p) { return p; }, domain, "identity", 0.0);
}

MapSystem MapSystem::custom(PointMap fn, Domain domain, std::string name) {
  if (!fn) throw InvalidArgument("custom map needs a callable");
  return MapSystem(std::move(fn), domain, std::move(name),
                   std::numeric_limits<double>::quiet_NaN());
}

std::optional<std::vector<std::size_t>> MapSystem::exact_permutation(std::size_t n_cells) const {
  if (!std::isfinite(shift_) || n_cells == 0) return std::nullopt;
  const double cells = shift_ * static_cast<double>(n_cells);
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * static_cast<double>(n_cells)) return std::nullopt;
  const auto s = static_cast<std::size_t>(rounded) % n_cells;
  std::vector<std::size_t> pi(n_cells);
  for (std::size_t j = 0; j < n_cells; ++j) pi[j] = (j + s) % n_cells;
  return pi;
}

}  // namespace ehkit
