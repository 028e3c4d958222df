#include "ehkit/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

namespace ehkit {

namespace {

void finish(ProbeReport& rep) {
  const std::size_t len = rep.series.size();
  const std::size_t tail = std::max<std::size_t>(1, len / 10);
  double acc = 0.0;
  for (std::size_t k = len - tail; k < len; ++k) acc += std::abs(rep.series[k] - rep.target);
  rep.tail_gap = acc / static_cast<double>(tail);
  rep.final_gap = std::abs(rep.series.back() - rep.target);
  rep.converged = rep.tail_gap <= rep.tol;
}

double space_average(const ClassicalObservable& g) {
  return g.values().dot(g.space()->measures());
}

}  // namespace

std::string to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::ErgodicCesaro: return "ergodic-cesaro";
    case ProbeKind::MixingCorrelation: return "mixing-correlation";
    case ProbeKind::ExactNorm: return "exact-norm";
  }
  return "ergodic-cesaro";
}

ProbeReport ergodic_probe(const TransferOperator& p, const Density& f,
                          const ClassicalObservable& g, std::size_t horizon, double tol) {
  if (horizon < 1) throw InvalidArgument("probe horizon must be >= 1");
  require_same_space(p.space(), f.space(), "ergodic_probe");
  require_same_space(p.space(), g.space(), "ergodic_probe");
  ProbeReport rep;
  rep.kind = ProbeKind::ErgodicCesaro;
  rep.tol = tol;
  rep.horizon = horizon;
  rep.target = space_average(g);  // <f,1> = 1 for a density
  Eigen::VectorXd v = f.values();
  double acc = 0.0;
  for (std::size_t n = 0; n <= horizon; ++n) {
    acc += inner_product(v, g);
    rep.series.push_back(acc / static_cast<double>(n + 1));
    if (n < horizon) v = p.matrix() * v;
  }
  finish(rep);
  return rep;
}

ProbeReport mixing_probe(const TransferOperator& p, const Density& f,
                         const ClassicalObservable& g, std::size_t horizon, double tol) {
  if (horizon < 1) throw InvalidArgument("probe horizon must be >= 1");
  require_same_space(p.space(), f.space(), "mixing_probe");
  require_same_space(p.space(), g.space(), "mixing_probe");
  ProbeReport rep;
  rep.kind = ProbeKind::MixingCorrelation;
  rep.tol = tol;
  rep.horizon = horizon;
  rep.target = space_average(g);
  Eigen::VectorXd v = f.values();
  for (std::size_t n = 0; n <= horizon; ++n) {
    rep.series.push_back(inner_product(v, g));
    if (n < horizon) v = p.matrix() * v;
  }
  finish(rep);
  return rep;
}

ProbeReport exact_probe(const TransferOperator& p, const Density& f, std::size_t horizon,
                        double tol) {
  if (horizon < 1) throw InvalidArgument("probe horizon must be >= 1");
  require_same_space(p.space(), f.space(), "exact_probe");
  ProbeReport rep;
  rep.kind = ProbeKind::ExactNorm;
  rep.tol = tol;
  rep.horizon = horizon;
  rep.target = 0.0;
  const auto& space = *p.space();
  const Eigen::VectorXd ones =
      Eigen::VectorXd::Ones(static_cast<Eigen::Index>(space.n_cells()));
  Eigen::VectorXd v = f.values();
  for (std::size_t n = 0; n <= horizon; ++n) {
    rep.series.push_back(l1_norm(v - ones, space));
    if (n < horizon) v = p.matrix() * v;
  }
  finish(rep);
  return rep;
}

ConsistencyReport cross_validate(const TransferOperator& p, const SpectralDecomposition& d,
                                 const ProbeSettings& settings) {
  require_same_space(p.space(), d.space, "cross_validate");
  const auto& space = p.space();
  const std::size_t n = space->n_cells();
  const EHClassification cls = classify(d);

  std::vector<std::pair<std::string, Density>> densities;
  {
    std::vector<std::size_t> picks = {0, n / 2, n - 1};
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    for (std::size_t c : picks)
      densities.emplace_back("indicator_cell_" + std::to_string(c),
                             Density::indicator(space, {c}));
    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> unif01(0.0, 1.0);
    for (std::size_t k = 0; k < settings.random_densities; ++k) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unif01(rng);
      densities.emplace_back("random_" + std::to_string(k),
                             Density::normalized(space, std::move(v)));
    }
  }
  std::vector<std::pair<std::string, ClassicalObservable>> observables;
  {
    // Sup-norm-1 ramp: Cesaro gaps scale with ||g||_inf, so a raw 1..n ramp
    // would need a horizon growing with the partition to meet a fixed tol.
    observables.emplace_back(
        "ramp", ClassicalObservable(space, ClassicalObservable::ramp(space).values() /
                                               static_cast<double>(n)));
    observables.emplace_back("indicator_cell_0", ClassicalObservable::indicator(space, {0}));
    std::mt19937_64 rng(settings.seed ^ 0xabcdef);
    std::uniform_real_distribution<double> unif11(-1.0, 1.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unif11(rng);
    observables.emplace_back("random_bounded", ClassicalObservable(space, std::move(v)));
  }

  ConsistencyReport rep;

  // Cyclic alpha <=> every Cesaro probe in the basket converges.
  {
    bool all = true;
    double worst = 0.0;
    std::string worst_pair;
    for (const auto& [fname, f] : densities)
      for (const auto& [gname, g] : observables) {
        const ProbeReport r = ergodic_probe(p, f, g, settings.horizon, settings.tol);
        if (r.tail_gap > worst) {
          worst = r.tail_gap;
          worst_pair = fname + " x " + gname;
        }
        all = all && r.converged;
      }
    ConsistencyCheck chk;
    chk.name = "cyclic alpha <=> Cesaro averages converge";
    chk.ok = (cls.ergodic == all);
    std::ostringstream os;
    os << "cycle structure says " << (cls.ergodic ? "ergodic" : "non-ergodic")
       << "; probes " << (all ? "all converge" : "do not all converge") << " (worst tail gap "
       << worst << " on " << worst_pair << ")";
    chk.evidence = os.str();
    rep.checks.push_back(std::move(chk));
  }

  if (d.r > 1) {
    // Mixing is ruled out, so some correlation must fail to settle.
    bool any_fail = false;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [fname, f] : densities)
      for (const auto& [gname, g] : observables) {
        const ProbeReport r = mixing_probe(p, f, g, settings.horizon, settings.tol);
        any_fail = any_fail || !r.converged;
        best = std::min(best, r.tail_gap);
      }
    ConsistencyCheck chk;
    chk.name = "r > 1 => correlation probe fails somewhere";
    chk.ok = any_fail;
    std::ostringstream os;
    os << (any_fail ? "found non-converging correlation" : "all correlations converged")
       << " (smallest tail gap " << best << ")";
    chk.evidence = os.str();
    rep.checks.push_back(std::move(chk));
  } else {
    // r = 1 certifies exactness: every density must relax in norm.
    bool all = true;
    double worst = 0.0;
    std::string worst_f;
    for (const auto& [fname, f] : densities) {
      const ProbeReport r = exact_probe(p, f, settings.horizon, settings.tol);
      if (r.tail_gap > worst) {
        worst = r.tail_gap;
        worst_f = fname;
      }
      all = all && r.converged;
    }
    ConsistencyCheck chk;
    chk.name = "r = 1 => norm relaxation for every density";
    chk.ok = all;
    std::ostringstream os;
    os << (all ? "all densities relax" : "some density fails to relax") << " (worst tail gap "
       << worst << " on " << worst_f << ")";
    chk.evidence = os.str();
    rep.checks.push_back(std::move(chk));
  }

  rep.consistent = std::all_of(rep.checks.begin(), rep.checks.end(),
                               [](const ConsistencyCheck& c) { return c.ok; });
  return rep;
}

}  // namespace ehkit
