#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ehkit/measure.hpp"

namespace ehkit {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// A measurable point transformation of the unit interval or unit square.
// Built-in maps cover the standard zoo; `custom` wraps any callable.
class MapSystem {
 public:
  using PointMap = std::function<Point(const Point&)>;

  // x -> x + theta mod 1, with theta given as a fraction of a full turn.
  static MapSystem rotation(double theta);
  // x -> 2x mod 1.
  static MapSystem dyadic();
  // x -> 1 - |1 - 2x|.
  static MapSystem tent();
  // Baker transformation of the unit square.
  static MapSystem baker();
  // x -> x + 1/r mod 1; a pure r-cycle on any partition with r | n_cells.
  static MapSystem cyclic_shift(unsigned r);
  static MapSystem identity(Domain domain = Domain::UnitInterval);
  static MapSystem custom(PointMap fn, Domain domain, std::string name);

  Point apply(const Point& p) const { return fn_(p); }
  Domain domain() const { return domain_; }
  const std::string& name() const { return name_; }

  // If the map permutes the cells of the uniform n-cell partition exactly,
  // returns pi with cell j mapped onto cell pi[j].  Rigid shifts qualify when
  // the shift is a whole number of cells; expanding maps never do.
  std::optional<std::vector<std::size_t>> exact_permutation(std::size_t n_cells) const;

 private:
  MapSystem(PointMap fn, Domain domain, std::string name, double shift);

  PointMap fn_;
  Domain domain_;
  std::string name_;
  // Shift fraction for rigid circle maps, NaN otherwise.
  double shift_;
};

}  // namespace ehkit
