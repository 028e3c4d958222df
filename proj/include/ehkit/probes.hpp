#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ehkit/spectral.hpp"
#include "ehkit/transfer.hpp"

namespace ehkit {

enum class ProbeKind { ErgodicCesaro, MixingCorrelation, ExactNorm };

std::string to_string(ProbeKind k);

struct ProbeReport {
  ProbeKind kind = ProbeKind::ErgodicCesaro;
  std::vector<double> series;  // indexed by n = 0..horizon
  double target = 0.0;
  double tol = 0.0;
  std::size_t horizon = 0;
  // Convergence is judged on the mean gap over the trailing 10% of the
  // series, so an oscillating series cannot pass by grazing the target once.
  bool converged = false;
  double tail_gap = 0.0;
  double final_gap = 0.0;  // |series.back() - target|, kept for reporting
};

// Cesaro-averaged correlation: series[n] = (1/(n+1)) sum_{k<=n} <P^k f, g>,
// with target <f,1><1,g>.  Converges iff time averages match space averages.
ProbeReport ergodic_probe(const TransferOperator& p, const Density& f,
                          const ClassicalObservable& g, std::size_t horizon, double tol);

// Plain correlation: series[n] = <P^n f, g>, same target.  Converges iff
// correlations decay.
ProbeReport mixing_probe(const TransferOperator& p, const Density& f,
                         const ClassicalObservable& g, std::size_t horizon, double tol);

// Norm relaxation: series[n] = ||P^n f - 1||_1, target 0.  Converges iff
// densities approach equilibrium in norm.
ProbeReport exact_probe(const TransferOperator& p, const Density& f, std::size_t horizon,
                        double tol);

struct ProbeSettings {
  std::size_t horizon = 1000;
  double tol = 0.05;
  std::size_t random_densities = 2;
  std::uint64_t seed = 0x9e3779b9;
};

struct ConsistencyCheck {
  std::string name;
  bool ok = false;
  std::string evidence;
};

struct ConsistencyReport {
  bool consistent = false;
  std::vector<ConsistencyCheck> checks;
};

// Replays the hierarchy placement of `d` against direct probe runs over a
// basket of densities and observables: a cyclic alpha must show converging
// Cesaro averages, r > 1 must break the correlation probe, and r = 1 must
// relax in norm.  Disagreements are reported, not thrown.
ConsistencyReport cross_validate(const TransferOperator& p, const SpectralDecomposition& d,
                                 const ProbeSettings& settings = {});

}  // namespace ehkit
