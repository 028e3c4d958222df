#include "ehkit/catalog.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ehkit/errors.hpp"

namespace ehkit {
namespace {

using Json = nlohmann::json;

std::string cyclic_verdict(std::size_t r) {
  if (r == 1) return "exact (r = 1)";
  return "ergodic, not mixing (r = " + std::to_string(r) + ", cyclic α)";
}

std::string non_ergodic_verdict(std::size_t r) {
  return "non-ergodic, not mixing (r = " + std::to_string(r) + ")";
}

// Splits "base(arg)" into its parts; names without parentheses pass through.
struct ParsedName {
  std::string base;
  std::string arg;  // empty when absent
};

ParsedName parse_name(const std::string& name) {
  auto open = name.find('(');
  if (open == std::string::npos) return {name, ""};
  if (name.back() != ')' || open + 1 >= name.size() - 1)
    throw InvalidArgument("malformed system name: " + name);
  return {name.substr(0, open), name.substr(open + 1, name.size() - open - 2)};
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw InvalidArgument("expected a number for " + what + ", got '" + text + "'");
  }
}

unsigned long parse_unsigned(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    long value = std::stol(text, &used);
    if (used != text.size() || value <= 0) throw std::invalid_argument(text);
    return static_cast<unsigned long>(value);
  } catch (const std::exception&) {
    throw InvalidArgument("expected a positive integer for " + what + ", got '" + text + "'");
  }
}

// Smallest q <= 4096 with theta*q integral; 0 if none (irrational within tol).
std::size_t shift_denominator(double theta) {
  for (std::size_t q = 1; q <= 4096; ++q) {
    double scaled = theta * static_cast<double>(q);
    if (std::abs(scaled - std::round(scaled)) < 1e-9) return q;
  }
  return 0;
}

DiscreteSpectrumSystem two_level_template(double hbar) {
  HamiltonianModel h(Eigen::Vector2d(2.0, 1.0), hbar);
  Eigen::Matrix2cd rho;
  rho << std::complex<double>(0.6, 0.0), std::complex<double>(0.3, 0.1),
      std::complex<double>(0.3, -0.1), std::complex<double>(0.4, 0.0);
  Eigen::Matrix2cd obs;
  obs << std::complex<double>(1.0, 0.0), std::complex<double>(0.4, 0.2),
      std::complex<double>(0.4, -0.2), std::complex<double>(-0.5, 0.0);
  return DiscreteSpectrumSystem(HamiltonianModel(h), QuantumState(rho), QuantumObservable(obs));
}

DiscreteSpectrumSystem mixed_discrete_template(double hbar) {
  // Level gap hbar * 2*pi/8, so the oscillatory part has period 8 at any hbar.
  const double two_pi = 2.0 * 3.14159265358979323846;
  HamiltonianModel h(Eigen::Vector2d(hbar * two_pi / 8.0, 0.0), hbar);
  Eigen::Matrix2cd rho;
  rho << std::complex<double>(0.5, 0.0), std::complex<double>(0.25, 0.0),
      std::complex<double>(0.25, 0.0), std::complex<double>(0.5, 0.0);
  Eigen::Matrix2cd obs;
  obs << std::complex<double>(1.0, 0.0), std::complex<double>(0.5, 0.0),
      std::complex<double>(0.5, 0.0), std::complex<double>(-1.0, 0.0);
  return DiscreteSpectrumSystem(HamiltonianModel(h), QuantumState(rho), QuantumObservable(obs));
}

}  // namespace

const std::vector<CatalogEntry>& builtin_catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"rotation", "classical", "circle rotation x -> x + 1/8 mod 1",
       "rotation(theta) for any rational theta", cyclic_verdict(8), 8},
      {"dyadic", "classical", "doubling map x -> 2x mod 1", "", cyclic_verdict(1), 256},
      {"tent", "classical", "tent map x -> 1 - |1 - 2x|", "", cyclic_verdict(1), 256},
      {"baker", "classical", "baker transformation of the unit square", "", cyclic_verdict(1),
       256},
      {"cyclic_shift", "classical", "shift x -> x + 1/3 mod 1, a pure 3-cycle",
       "cyclic_shift(r) for any r >= 1", cyclic_verdict(3), 3},
      {"identity", "classical", "identity map; every cell is invariant", "",
       non_ergodic_verdict(4), 4},
      {"two-level", "quantum", "two nondegenerate levels, generic state and observable",
       "level gap 1.0", "ergodic", 0},
      {"quasi-continuous-gaussian", "quantum",
       "Gaussian band of 512 levels with a smooth correlation kernel", "omega in [0, 1]",
       "mixing", 0},
      {"mixed-spectrum", "quantum",
       "period-8 two-level pair on top of a Gaussian quasi-continuum", "", "ergodic", 0},
  };
  return entries;
}

ClassicalSystemSpec classical_system(const std::string& name) {
  ParsedName parsed = parse_name(name);
  if (parsed.base == "rotation") {
    double theta = parsed.arg.empty() ? 1.0 / 8.0 : parse_double(parsed.arg, "rotation angle");
    std::size_t q = shift_denominator(theta);
    if (q == 0)
      throw InvalidArgument(
          "rotation angle must be a rational fraction of the circle (denominator <= 4096)");
    if (q == 1) return {MapSystem::rotation(theta), 4, non_ergodic_verdict(4)};
    return {MapSystem::rotation(theta), q, cyclic_verdict(q)};
  }
  if (parsed.base == "cyclic_shift") {
    unsigned long r = parsed.arg.empty() ? 3 : parse_unsigned(parsed.arg, "cycle length");
    return {MapSystem::cyclic_shift(static_cast<unsigned>(r)), static_cast<std::size_t>(r),
            cyclic_verdict(static_cast<std::size_t>(r))};
  }
  if (!parsed.arg.empty()) throw InvalidArgument(parsed.base + " takes no parameter");
  if (parsed.base == "dyadic") return {MapSystem::dyadic(), 256, cyclic_verdict(1)};
  if (parsed.base == "tent") return {MapSystem::tent(), 256, cyclic_verdict(1)};
  if (parsed.base == "baker") return {MapSystem::baker(), 256, cyclic_verdict(1)};
  if (parsed.base == "identity")
    return {MapSystem::identity(Domain::UnitInterval), 4, non_ergodic_verdict(4)};
  throw InvalidArgument("unknown classical system: " + name);
}

QuantumSystemModel quantum_system(const std::string& name, double hbar) {
  if (hbar <= 0.0) throw InvalidArgument("hbar must be positive");
  QuantumSystemModel model;
  if (name == "two-level") {
    model.discrete.emplace(two_level_template(hbar));
    return model;
  }
  if (name == "quasi-continuous-gaussian") {
    model.continuum.emplace(make_gaussian_continuum(512, 1.0, 0.5, 0.2, 0.04, 2.0, hbar));
    return model;
  }
  if (name == "mixed-spectrum") {
    model.discrete.emplace(mixed_discrete_template(hbar));
    // 512 grid points keep the band's discrete-grid recurrence time
    // 2 pi (K - 1) / omega_max beyond the default 2000-step horizon.
    model.continuum.emplace(make_gaussian_continuum(512, 1.0, 0.5, 0.2, 0.04, 2.0, hbar));
    return model;
  }
  throw InvalidArgument("unknown quantum system: " + name);
}

std::string expected_quantum_verdict(const std::string& name) {
  for (const auto& entry : builtin_catalog())
    if (entry.kind == "quantum" && entry.name == name) return entry.expected_verdict;
  throw InvalidArgument("unknown quantum system: " + name);
}

Json catalog_to_json() {
  Json out = Json::array();
  for (const auto& entry : builtin_catalog()) {
    Json item;
    item["name"] = entry.name;
    item["kind"] = entry.kind;
    item["description"] = entry.description;
    if (!entry.parameters.empty()) item["parameters"] = entry.parameters;
    item["expected_verdict"] = entry.expected_verdict;
    if (entry.kind == "classical") item["default_cells"] = entry.default_cells;
    out.push_back(item);
  }
  return out;
}

}  // namespace ehkit
