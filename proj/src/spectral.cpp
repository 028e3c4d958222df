#include "ehkit/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

namespace ehkit {

namespace {

// Strongly connected components, iterative Tarjan.  Returns component id per
// node; ids are assigned in reverse topological order of the condensation.
std::vector<int> tarjan_scc(const std::vector<std::vector<std::size_t>>& adj, int& n_comp) {
  const std::size_t n = adj.size();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int next_index = 0;
  n_comp = 0;

  struct Frame {
    std::size_t v;
    std::size_t child = 0;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call;
    call.push_back({root});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      const std::size_t v = fr.v;
      if (fr.child < adj[v].size()) {
        const std::size_t w = adj[v][fr.child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          while (true) {
            const std::size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = n_comp;
            if (w == v) break;
          }
          ++n_comp;
        }
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return comp;
}

std::string cell_list(const std::vector<std::size_t>& cells, std::size_t max_shown = 6) {
  std::ostringstream os;
  os << "{";
  for (std::size_t k = 0; k < cells.size() && k < max_shown; ++k) {
    if (k) os << ",";
    os << cells[k];
  }
  if (cells.size() > max_shown) os << ",...";
  os << "}";
  return os.str();
}

}  // namespace

double default_radius_tol(Provenance p) { return p == Provenance::Ulam ? 0.05 : 1e-6; }
double default_support_tol(Provenance p) { return p == Provenance::Ulam ? 1e-2 : 1e-6; }

std::vector<EigenPair> peripheral_spectrum(const TransferOperator& p, double radius_tol) {
  if (!(radius_tol > 0.0) || radius_tol >= 1.0)
    throw InvalidArgument("radius_tol must lie in (0, 1)");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(p.matrix());
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("eigensolver failed on the transfer matrix");
  std::vector<EigenPair> out;
  const auto& vals = solver.eigenvalues();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    if (std::abs(vals[k]) >= 1.0 - radius_tol)
      out.push_back({vals[k], solver.eigenvectors().col(k)});
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
    const double aa = std::arg(a.value), ab = std::arg(b.value);
    if (aa != ab) return aa < ab;
    return std::abs(a.value) > std::abs(b.value);
  });
  return out;
}

std::vector<std::vector<std::size_t>> SpectralDecomposition::cycles() const {
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> seen(permutation.size(), 0);
  for (std::size_t s = 0; s < permutation.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> orbit;
    std::size_t v = s;
    while (!seen[v]) {
      seen[v] = 1;
      orbit.push_back(v);
      v = permutation[v];
    }
    out.push_back(std::move(orbit));
  }
  return out;
}

std::string SpectralDecomposition::cycle_notation() const {
  std::ostringstream os;
  for (const auto& c : cycles()) {
    os << "(";
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k) os << " ";
      os << (c[k] + 1);
    }
    os << ")";
  }
  return os.str();
}

std::vector<std::size_t> SpectralDecomposition::permutation_power(long long n) const {
  const std::size_t r_ = permutation.size();
  std::vector<std::size_t> out(r_);
  for (const auto& c : cycles()) {
    const auto len = static_cast<long long>(c.size());
    const long long shift = ((n % len) + len) % len;
    for (std::size_t k = 0; k < c.size(); ++k)
      out[c[k]] = c[(k + static_cast<std::size_t>(shift)) % c.size()];
  }
  return out;
}

SpectralDecomposition extract_decomposition(const TransferOperator& p, ExtractOptions opts) {
  const auto& space = p.space();
  const std::size_t n = space->n_cells();
  const double support_tol =
      opts.support_tol > 0.0 ? opts.support_tol : default_support_tol(p.provenance());
  const double radius_tol =
      opts.radius_tol > 0.0 ? opts.radius_tol : default_radius_tol(p.provenance());

  const auto peripheral = peripheral_spectrum(p, radius_tol);
  const std::size_t r = peripheral.size();
  if (r == 0) throw NumericalFailure("no peripheral eigenvalue found; operator is not stochastic");

  // Mass-fraction matrix: S(i,j) = share of cell j's mass sent to cell i.
  const auto& m = p.matrix();
  const auto ni = static_cast<Eigen::Index>(n);
  std::vector<std::vector<std::size_t>> adj(n);
  Eigen::MatrixXd frac(ni, ni);
  for (Eigen::Index j = 0; j < ni; ++j) {
    for (Eigen::Index i = 0; i < ni; ++i)
      frac(i, j) = m(i, j) * space->measure(static_cast<std::size_t>(i)) /
                   space->measure(static_cast<std::size_t>(j));
    const double colmax = frac.col(j).maxCoeff();
    for (Eigen::Index i = 0; i < ni; ++i)
      if (frac(i, j) > support_tol * colmax)
        adj[static_cast<std::size_t>(j)].push_back(static_cast<std::size_t>(i));
  }

  int n_comp = 0;
  const std::vector<int> comp = tarjan_scc(adj, n_comp);

  // A component is recurrent when no thresholded edge leaves it.
  std::vector<char> leaves(static_cast<std::size_t>(n_comp), 0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w : adj[v])
      if (comp[v] != comp[w]) leaves[static_cast<std::size_t>(comp[v])] = 1;

  std::vector<DecompositionAmbiguity::Row> transient_rows;
  for (std::size_t v = 0; v < n; ++v) {
    if (!leaves[static_cast<std::size_t>(comp[v])]) continue;
    double leak = 0.0;
    for (Eigen::Index i = 0; i < ni; ++i)
      if (comp[static_cast<std::size_t>(i)] != comp[v])
        leak += frac(i, static_cast<Eigen::Index>(v));
    transient_rows.emplace_back("cell " + std::to_string(v) + " is transient (outflow share)",
                                leak);
  }
  if (!transient_rows.empty())
    throw DecompositionAmbiguity(
        "operator has " + std::to_string(transient_rows.size()) +
            " transient cell(s); the state space does not split into permuted components",
        std::move(transient_rows));

  // Group cells per component, ordered by smallest member cell.
  std::vector<std::vector<std::size_t>> comp_cells(static_cast<std::size_t>(n_comp));
  for (std::size_t v = 0; v < n; ++v) comp_cells[static_cast<std::size_t>(comp[v])].push_back(v);
  std::sort(comp_cells.begin(), comp_cells.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  // Within each component: BFS levels, period = gcd over edges of
  // level(u) + 1 - level(v), then phase classes ordered along the flow.
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> component_period;
  for (const auto& cells : comp_cells) {
    std::vector<long long> level(n, -1);
    std::vector<std::size_t> queue;
    queue.push_back(cells.front());
    level[cells.front()] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const std::size_t u = queue[qi];
      for (std::size_t w : adj[u]) {
        if (comp[w] != comp[u]) continue;
        if (level[w] == -1) {
          level[w] = level[u] + 1;
          queue.push_back(w);
        }
      }
    }
    long long d = 0;
    for (std::size_t u : cells)
      for (std::size_t w : adj[u]) {
        if (comp[w] != comp[u]) continue;
        d = std::gcd(d, level[u] + 1 - level[w]);
      }
    if (d <= 0) d = 1;
    const auto period = static_cast<std::size_t>(d);
    std::vector<std::vector<std::size_t>> classes(period);
    for (std::size_t u : cells)
      classes[static_cast<std::size_t>(((level[u] % d) + d) % d)].push_back(u);
    for (auto& c : classes) std::sort(c.begin(), c.end());
    component_period.push_back(period);
    for (auto& c : classes) sets.push_back(std::move(c));
  }

  // Cross-check: peripheral eigenvalues must be exactly the union over
  // components of the d-th roots of unity.
  {
    std::vector<std::complex<double>> expected;
    for (std::size_t d : component_period)
      for (std::size_t k = 0; k < d; ++k) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d);
        expected.emplace_back(std::cos(ang), std::sin(ang));
      }
    std::vector<DecompositionAmbiguity::Row> rows;
    if (expected.size() != r) {
      rows.emplace_back("peripheral eigenvalue count", static_cast<double>(r));
      rows.emplace_back("cycle-structure prediction", static_cast<double>(expected.size()));
      throw DecompositionAmbiguity(
          "peripheral eigenvalue count " + std::to_string(r) +
              " disagrees with the cycle structure, which predicts " +
              std::to_string(expected.size()),
          std::move(rows));
    }
    const double match_tol = std::max(1e-6, 2.0 * radius_tol);
    std::vector<char> used(r, 0);
    for (const auto& e : expected) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < r; ++k) {
        if (used[k]) continue;
        const double dist = std::abs(peripheral[k].value - e);
        if (dist < best) {
          best = dist;
          best_k = k;
        }
      }
      if (best > match_tol)
        rows.emplace_back("expected root of unity at arg " + std::to_string(std::arg(e)), best);
      else
        used[best_k] = 1;
    }
    if (!rows.empty())
      throw DecompositionAmbiguity(
          "peripheral eigenvalues do not line up with roots of unity from the cycle structure",
          std::move(rows));
  }

  SpectralDecomposition d;
  d.space = space;
  d.r = r;
  d.cell_sets = std::move(sets);
  for (const auto& pair : peripheral) d.peripheral_values.push_back(pair.value);
  for (const auto& cells : d.cell_sets) {
    d.basis_densities.push_back(Density::indicator(space, cells));
    d.functionals.push_back(ClassicalObservable::indicator(space, cells));
    double mu = 0.0;
    for (std::size_t c : cells) mu += space->measure(c);
    d.alpha_weights.push_back(mu);
  }

  // Match P applied to each basis density against the basis to read off alpha.
  const double quality_tol = 0.5;
  d.permutation.assign(r, r);
  std::vector<char> taken(r, 0);
  for (std::size_t i = 0; i < r; ++i) {
    const Eigen::VectorXd image = p.apply_values(d.basis_densities[i].values());
    std::vector<double> dist(r);
    for (std::size_t j = 0; j < r; ++j)
      dist[j] = l1_norm(image - d.basis_densities[j].values(), *space);
    std::size_t best = 0;
    for (std::size_t j = 1; j < r; ++j)
      if (dist[j] < dist[best] - 1e-12) best = j;  // ties keep the lowest index
    std::vector<DecompositionAmbiguity::Row> rows;
    for (std::size_t j = 0; j < r; ++j)
      rows.emplace_back("||P b_" + std::to_string(i) + " - b_" + std::to_string(j) + "||_1",
                        dist[j]);
    if (dist[best] > quality_tol)
      throw DecompositionAmbiguity("image of component " + std::to_string(i) + " " +
                                       cell_list(d.cell_sets[i]) +
                                       " is not close to any basis density; nearest is " +
                                       std::to_string(dist[best]) + " away",
                                   std::move(rows));
    for (std::size_t j = 0; j < r; ++j)
      if (j != best && dist[j] <= std::max(2.0 * dist[best], dist[best] + 0.1))
        throw DecompositionAmbiguity(
            "image of component " + std::to_string(i) + " matches both basis " +
                std::to_string(best) + " and basis " + std::to_string(j) + " within tolerance",
            std::move(rows));
    if (taken[best])
      throw DecompositionAmbiguity(
          "two components map onto basis " + std::to_string(best) + "; alpha is not a bijection",
          std::move(rows));
    taken[best] = 1;
    d.permutation[i] = best;
  }

  // mu(A_i) must ride along the permutation unchanged.
  {
    std::vector<DecompositionAmbiguity::Row> rows;
    for (std::size_t i = 0; i < r; ++i) {
      const double diff = std::abs(d.alpha_weights[i] - d.alpha_weights[d.permutation[i]]);
      if (diff > 1e-8)
        rows.emplace_back("mu(A_" + std::to_string(i) + ") vs mu(A_alpha(i))", diff);
    }
    if (!rows.empty())
      throw DecompositionAmbiguity("component measures change along alpha", std::move(rows));
  }

  // Remainder diagnostics: a few singleton indicators plus seeded random
  // densities, each tracked as ||P^n f - reconstruction(n)||_1.
  std::vector<std::pair<std::string, Density>> probes;
  {
    std::vector<std::size_t> picks = {0, n / 2, n - 1};
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    for (std::size_t c : picks) {
      if (probes.size() >= opts.probe_count) break;
      probes.emplace_back("indicator_cell_" + std::to_string(c),
                          Density::indicator(space, {c}));
    }
    std::mt19937_64 rng(opts.probe_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    while (probes.size() < opts.probe_count) {
      Eigen::VectorXd v(ni);
      for (Eigen::Index i = 0; i < ni; ++i) v[i] = unif(rng);
      probes.emplace_back("random_" + std::to_string(probes.size()),
                          Density::normalized(space, std::move(v)));
    }
  }
  for (const auto& [name, f] : probes) {
    RemainderSeries series;
    series.probe = name;
    Eigen::VectorXd v = f.values();
    for (std::size_t step = 0; step <= opts.horizon; ++step) {
      const Density rec = reconstruct_pnf(d, f, step);
      series.values.push_back(l1_norm(v - rec.values(), *space));
      v = p.apply_values(v);
    }
    d.remainder_decay.push_back(std::move(series));
  }
  return d;
}

std::string to_string(EHClassification::Exact e) {
  return e == EHClassification::Exact::YesByR1 ? "yes (r = 1)" : "unknown";
}

std::string to_string(EHClassification::Mixing m) {
  switch (m) {
    case EHClassification::Mixing::NecessaryConditionHolds:
      return "unknown (necessary condition holds)";
    case EHClassification::Mixing::RuledOut:
      return "ruled out";
    case EHClassification::Mixing::Unknown:
      return "unknown";
  }
  return "unknown";
}

std::string EHClassification::verdict() const {
  if (r == 1) return "exact (r = 1)";
  if (ergodic)
    return "ergodic, not mixing (r = " + std::to_string(r) + ", cyclic α)";
  return "non-ergodic, not mixing (r = " + std::to_string(r) + ")";
}

EHClassification classify(const SpectralDecomposition& d) {
  EHClassification c;
  c.r = d.r;
  const auto cyc = d.cycles();
  c.ergodic = cyc.size() == 1;
  c.ergodic_evidence = "α = " + d.cycle_notation() + (c.ergodic
                           ? " is a single " + std::to_string(d.r) + "-cycle"
                           : " splits into " + std::to_string(cyc.size()) + " cycles");
  if (d.r == 1) {
    c.exact = EHClassification::Exact::YesByR1;
    c.mixing = EHClassification::Mixing::NecessaryConditionHolds;
    c.notes = "r = 1 certifies exactness; mixing needs a direct correlation test";
  } else {
    c.exact = EHClassification::Exact::Unknown;
    c.mixing = EHClassification::Mixing::RuledOut;
    c.notes = "r > 1 rules mixing out";
  }
  return c;
}

Density reconstruct_pnf(const SpectralDecomposition& d, const Density& f, std::size_t n) {
  require_same_space(d.space, f.space(), "reconstruct_pnf");
  std::vector<double> lambda(d.r);
  for (std::size_t i = 0; i < d.r; ++i) lambda[i] = inner_product(f, d.functionals[i]);
  const auto origin = d.permutation_power(-static_cast<long long>(n));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.space->n_cells()));
  for (std::size_t i = 0; i < d.r; ++i)
    v += lambda[origin[i]] * d.basis_densities[i].values();
  return Density::normalized(d.space, std::move(v));
}

}  // namespace ehkit
