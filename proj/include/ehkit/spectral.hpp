#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ehkit/transfer.hpp"

namespace ehkit {

struct EigenPair {
  std::complex<double> value;
  Eigen::VectorXcd vector;
};

// Peripheral tolerance defaults: tight for exactly-built matrices, loose for
// sampled ones where discretization noise shifts eigenvalues off the circle.
double default_radius_tol(Provenance p);
// Support threshold defaults (fraction of the per-column maximum below which
// an entry is treated as leakage rather than structure).
double default_support_tol(Provenance p);

// All eigenpairs with |lambda| >= 1 - radius_tol, sorted by argument.
std::vector<EigenPair> peripheral_spectrum(const TransferOperator& p, double radius_tol);

struct RemainderSeries {
  std::string probe;
  std::vector<double> values;  // ||P^n f - reconstruction(n)||_1 for n = 0..horizon
};

// The cycle-permutation skeleton of a constrictive transfer operator:
// r components A_i with uniform basis densities, permuted by alpha, plus
// whatever remains, which must decay under iteration.
struct SpectralDecomposition {
  SpacePtr space;
  std::size_t r = 0;
  std::vector<std::vector<std::size_t>> cell_sets;    // the A_i, disjoint
  std::vector<Density> basis_densities;               // uniform on each A_i
  std::vector<std::size_t> permutation;               // alpha, 0-based
  std::vector<ClassicalObservable> functionals;       // k_i; lambda_i(f) = <f, k_i>
  std::vector<double> alpha_weights;                  // mu(A_i)
  std::vector<RemainderSeries> remainder_decay;
  std::vector<std::complex<double>> peripheral_values;

  // Cycle decomposition of alpha, each cycle listed in orbit order.
  std::vector<std::vector<std::size_t>> cycles() const;
  // 1-based cycle notation, e.g. "(1 2 3)(4)".
  std::string cycle_notation() const;
  // alpha^n as an index map; n may be negative.
  std::vector<std::size_t> permutation_power(long long n) const;
};

struct ExtractOptions {
  double support_tol = 0.0;      // <= 0: pick by provenance
  double radius_tol = 0.0;       // <= 0: pick by provenance
  std::size_t probe_count = 5;   // densities used for remainder diagnostics
  std::size_t horizon = 64;      // remainder series length
  std::uint64_t probe_seed = 0x51ab5;
};

// Recovers the decomposition of P.  Structure is found on the thresholded
// support graph (strongly connected components, then phase classes within
// each recurrent component); r comes from the peripheral eigenvalue count and
// is cross-checked against the cycle structure.  Throws
// DecompositionAmbiguity when the operator does not resolve into cleanly
// permuted components (transient cells, eigenvalue/cycle mismatch, or no
// unique nearest basis density when matching the permutation).
SpectralDecomposition extract_decomposition(const TransferOperator& p, ExtractOptions opts = {});

struct EHClassification {
  enum class Exact { YesByR1, Unknown };
  enum class Mixing { NecessaryConditionHolds, RuledOut, Unknown };

  bool ergodic = false;
  std::string ergodic_evidence;
  Exact exact = Exact::Unknown;
  Mixing mixing = Mixing::Unknown;
  std::size_t r = 0;
  std::string notes;

  // One-line summary, e.g. "exact (r = 1)" or "ergodic, not mixing (r = 3, cyclic α)".
  std::string verdict() const;
};

std::string to_string(EHClassification::Exact e);
std::string to_string(EHClassification::Mixing m);

// Hierarchy placement from the cycle structure alone: ergodic iff alpha is a
// single r-cycle; r = 1 certifies exactness; r > 1 rules mixing out, while
// r = 1 leaves mixing to a direct correlation test.
EHClassification classify(const SpectralDecomposition& d);

// The non-remainder part of P^n f: sum_i <f, k_{alpha^{-n}(i)}> * basis_i.
Density reconstruct_pnf(const SpectralDecomposition& d, const Density& f, std::size_t n);

}  // namespace ehkit
