#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace ehkit {

// One batch invocation.  Every knob has a default; a zero in cells, horizon, or
// tol means "use the mode default" so configs stay terse.
struct RunConfig {
  // classical | quantum | two-level | wigner | cross-validate
  std::string mode;
  // Catalog name; empty picks dyadic (classical) or two-level (quantum).
  // Ignored by the remaining modes.
  std::string system;

  std::size_t cells = 0;        // partition size; 0 = catalog default
  std::size_t samples = 1000;   // Ulam samples per cell
  std::uint64_t seed = 0x5eed;  // sampling and probe seed
  long long horizon = 0;        // series length; 0 = mode default
  long long cesaro_m = 100000;  // Cesaro truncation (two-level mode)
  double tol = 0.0;             // convergence tolerance; 0 = mode default
  double hbar = 1.0;            // quantum modes

  // Two-level entries: energies, state, observable ((1,2) entries split into
  // re/im; the conjugates are implied).
  double e1 = 2.0, e2 = 1.0;
  double rho11 = 0.6, rho22 = 0.4, rho12_re = 0.3, rho12_im = 0.1;
  double o11 = 1.0, o22 = -0.5, o12_re = 0.4, o12_im = 0.2;

  // Wigner scaling scan, strictly decreasing.
  std::vector<double> hbar_scan = {0.2, 0.1, 0.05, 0.025};

  std::string out_dir;          // empty: write no artifact files
  bool json_output = false;     // machine-readable stdout
  bool with_timestamp = true;   // false for byte-identical reports
};

nlohmann::json config_to_json(const RunConfig& c);
// Strict parse: unknown or ill-typed fields raise InvalidArgument with the
// field name, so config mistakes surface as usage errors.
RunConfig config_from_json(const nlohmann::json& j);
// FNV-1a 64-bit over the canonical serialized config, as a hex string.
std::string config_hash(const RunConfig& c);

struct RunReport {
  std::string mode;
  std::string verdict;  // empty when the mode produces no classification
  std::vector<std::string> evidence;
  std::vector<std::string> artifacts;  // files actually written
  std::string hash;
  std::uint64_t seed = 0;
  std::string version;
  int exit_code = 0;  // 0 ok, 3 numerical failure, 4 classification mismatch
  nlohmann::json body;  // mode-specific payload
};

nlohmann::json report_to_json(const RunReport& r, bool with_timestamp);
std::string report_text(const RunReport& r);

// Executes the configured pipeline, writing artifacts under out_dir when set.
// Configuration errors raise InvalidArgument; numerical and classification
// failures are reported through exit_code rather than thrown.
RunReport run(const RunConfig& config);

const char* version_string();

}  // namespace ehkit
