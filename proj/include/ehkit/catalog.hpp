#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "ehkit/map_system.hpp"
#include "ehkit/quantum.hpp"

namespace ehkit {

// One built-in system with the classification the test suite holds it to.
struct CatalogEntry {
  std::string name;
  std::string kind;  // "classical" | "quantum"
  std::string description;
  std::string parameters;
  std::string expected_verdict;
  std::size_t default_cells = 0;  // classical entries only
};

const std::vector<CatalogEntry>& builtin_catalog();

struct ClassicalSystemSpec {
  MapSystem map;
  std::size_t default_cells = 0;
  std::string expected_verdict;
};

// Resolves a catalog name, including parameterized spellings such as
// rotation(0.125) or cyclic_shift(3).  Unknown names throw InvalidArgument.
ClassicalSystemSpec classical_system(const std::string& name);

// Quantum model templates: two-level, quasi-continuous-gaussian, mixed-spectrum.
QuantumSystemModel quantum_system(const std::string& name, double hbar = 1.0);
std::string expected_quantum_verdict(const std::string& name);

nlohmann::json catalog_to_json();

}  // namespace ehkit
