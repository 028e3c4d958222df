#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ehkit {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed vectors, out-of-range parameters, incompatible options.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Objects built over different partitions (or different sizes) were combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A point map sent a sample outside the domain.  Carries the source cell.
class MapRangeError : public Error {
 public:
  MapRangeError(const std::string& msg, std::size_t cell, double x, double y)
      : Error(msg), cell_(cell), x_(x), y_(y) {}
  std::size_t cell() const { return cell_; }
  double x() const { return x_; }
  double y() const { return y_; }

 private:
  std::size_t cell_;
  double x_, y_;
};

// An iteration hit its budget before meeting the tolerance.  Carries the last residual.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& msg, double residual, std::size_t iterations)
      : Error(msg), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

// Generic numerical breakdown (failed eigensolve, singular system, NaN contamination).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// The cycle structure of an operator could not be resolved into disjoint
// permuted components.  The table lists offending items with a distance or
// mismatch score, so callers can see how far from clean the structure was.
class DecompositionAmbiguity : public Error {
 public:
  using Row = std::pair<std::string, double>;
  DecompositionAmbiguity(const std::string& msg, std::vector<Row> table)
      : Error(msg), table_(std::move(table)) {}
  const std::vector<Row>& table() const { return table_; }

 private:
  std::vector<Row> table_;
};

// A structural property that should hold by construction was found violated
// (non-Hermitian state, negative mass, broken normalization).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// A fitted oscillatory + remainder split failed to reproduce the series.
class DecompositionMismatch : public Error {
 public:
  DecompositionMismatch(const std::string& msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Off-diagonal pairings failed to decay, so no weak limit could be certified.
// Carries the decay curve that was inspected.
class NoWeakLimit : public Error {
 public:
  NoWeakLimit(const std::string& msg, std::vector<double> decay_curve)
      : Error(msg), decay_curve_(std::move(decay_curve)) {}
  const std::vector<double>& decay_curve() const { return decay_curve_; }

 private:
  std::vector<double> decay_curve_;
};

// Two initial states reached demonstrably different weak limits.
class HomogenizationViolation : public Error {
 public:
  HomogenizationViolation(const std::string& msg, std::vector<double> limit_a,
                          std::vector<double> limit_b)
      : Error(msg), limit_a_(std::move(limit_a)), limit_b_(std::move(limit_b)) {}
  const std::vector<double>& limit_a() const { return limit_a_; }
  const std::vector<double>& limit_b() const { return limit_b_; }

 private:
  std::vector<double> limit_a_, limit_b_;
};

}  // namespace ehkit
