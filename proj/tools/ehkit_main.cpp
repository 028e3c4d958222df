#include <Eigen/Core>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ehkit/catalog.hpp"
#include "ehkit/errors.hpp"
#include "ehkit/pipeline.hpp"
#include "ehkit/serialize.hpp"

namespace {

struct SubOptions {
  CLI::App* sub = nullptr;
  ehkit::RunConfig vals;  // flag storage; only fields with count() > 0 are used
  std::string config_path;
  bool json = false;
  bool no_timestamp = false;
};

void add_common(SubOptions& s) {
  s.sub->add_option("--config", s.config_path, "JSON config file; flags override its fields");
  s.sub->add_option("--out", s.vals.out_dir, "directory to write artifact files into");
  s.sub->add_option("--seed", s.vals.seed, "sampling and probe seed (default 0x5eed)");
  s.sub->add_flag("--json", s.json, "print the machine-readable report to stdout");
  s.sub->add_flag("--no-timestamp", s.no_timestamp,
                  "omit the report timestamp so identical runs emit identical bytes");
}

void add_classical_knobs(SubOptions& s) {
  s.sub->add_option("--system", s.vals.system,
                    "map name, e.g. dyadic, tent, baker, rotation(0.125), cyclic_shift(3)");
  s.sub->add_option("--cells", s.vals.cells, "partition cells (default: catalog per system)");
  s.sub->add_option("--samples", s.vals.samples, "Ulam samples per cell (default 1000)");
  s.sub->add_option("--horizon", s.vals.horizon, "probe horizon (default 1000)");
  s.sub->add_option("--tol", s.vals.tol, "probe tolerance (default 0.05)");
}

// Applies a parsed flag over the config value only when the flag appeared, so
// precedence stays flags > config file > defaults.
template <typename T>
void take(const CLI::App* sub, const std::string& flag, T& dst, const T& parsed) {
  if (sub->count(flag) > 0) dst = parsed;
}

int emit(const ehkit::RunReport& rep, const ehkit::RunConfig& cfg) {
  if (cfg.json_output)
    std::cout << ehkit::report_to_json(rep, cfg.with_timestamp).dump(2) << "\n";
  else
    std::cout << ehkit::report_text(rep);
  return rep.exit_code;
}

int run_catalog(const SubOptions& s) {
  if (s.json) {
    std::cout << ehkit::catalog_to_json().dump(2) << "\n";
    return 0;
  }
  std::cout << "built-in systems (ehkit v" << ehkit::version_string() << ")\n";
  for (const ehkit::CatalogEntry& e : ehkit::builtin_catalog()) {
    std::cout << "  " << e.name << " [" << e.kind << "]";
    if (e.default_cells > 0) std::cout << ", " << e.default_cells << " cells";
    std::cout << "\n    " << e.description << "\n";
    if (!e.parameters.empty()) std::cout << "    parameters: " << e.parameters << "\n";
    std::cout << "    expected verdict: " << e.expected_verdict << "\n";
  }
  return 0;
}

int run_pipeline(const SubOptions& s) {
  ehkit::RunConfig cfg;
  if (s.sub->count("--config") > 0)
    cfg = ehkit::config_from_json(nlohmann::json::parse(ehkit::read_text_file(s.config_path)));
  cfg.mode = s.sub->get_name();

  const CLI::App* sub = s.sub;
  take(sub, "--out", cfg.out_dir, s.vals.out_dir);
  take(sub, "--seed", cfg.seed, s.vals.seed);
  if (sub->get_option_no_throw("--system")) take(sub, "--system", cfg.system, s.vals.system);
  if (sub->get_option_no_throw("--cells")) take(sub, "--cells", cfg.cells, s.vals.cells);
  if (sub->get_option_no_throw("--samples")) take(sub, "--samples", cfg.samples, s.vals.samples);
  if (sub->get_option_no_throw("--horizon")) take(sub, "--horizon", cfg.horizon, s.vals.horizon);
  if (sub->get_option_no_throw("--tol")) take(sub, "--tol", cfg.tol, s.vals.tol);
  if (sub->get_option_no_throw("--hbar")) take(sub, "--hbar", cfg.hbar, s.vals.hbar);
  if (sub->get_option_no_throw("--cesaro-m"))
    take(sub, "--cesaro-m", cfg.cesaro_m, s.vals.cesaro_m);
  if (sub->get_option_no_throw("--hbar-scan"))
    take(sub, "--hbar-scan", cfg.hbar_scan, s.vals.hbar_scan);
  if (sub->get_option_no_throw("--e1")) {
    take(sub, "--e1", cfg.e1, s.vals.e1);
    take(sub, "--e2", cfg.e2, s.vals.e2);
    take(sub, "--rho11", cfg.rho11, s.vals.rho11);
    take(sub, "--rho22", cfg.rho22, s.vals.rho22);
    take(sub, "--rho12-re", cfg.rho12_re, s.vals.rho12_re);
    take(sub, "--rho12-im", cfg.rho12_im, s.vals.rho12_im);
    take(sub, "--o11", cfg.o11, s.vals.o11);
    take(sub, "--o22", cfg.o22, s.vals.o22);
    take(sub, "--o12-re", cfg.o12_re, s.vals.o12_re);
    take(sub, "--o12-im", cfg.o12_im, s.vals.o12_im);
  }
  if (s.json) cfg.json_output = true;
  if (s.no_timestamp) cfg.with_timestamp = false;

  return emit(ehkit::run(cfg), cfg);
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("EHKIT_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{
      "ergodic-hierarchy toolkit: spectral classification of interval maps, "
      "spectral-split classification of quantum models, and phase-space checks"};
  app.require_subcommand(1);
  std::deque<SubOptions> subs;

  auto attach = [&](const std::string& name, const std::string& desc) -> SubOptions& {
    subs.emplace_back();
    SubOptions& s = subs.back();
    s.sub = app.add_subcommand(name, desc);
    add_common(s);
    return s;
  };

  {
    SubOptions& s = attach("classical",
                           "Ulam discretization, spectral decomposition, verdict, and probes");
    add_classical_knobs(s);
  }
  {
    SubOptions& s = attach("quantum", "spectral-split classification of a quantum model");
    s.sub->add_option("--system", s.vals.system,
                      "model name: two-level, quasi-continuous-gaussian, mixed-spectrum");
    s.sub->add_option("--horizon", s.vals.horizon, "series horizon (default 2000)");
    s.sub->add_option("--tol", s.vals.tol, "decay/fit tolerance (default 1e-3)");
    s.sub->add_option("--hbar", s.vals.hbar, "Planck constant (default 1.0)");
  }
  {
    SubOptions& s = attach("two-level", "worked two-level system with Cesaro averages");
    s.sub->add_option("--horizon", s.vals.horizon, "reported series length (default 1000)");
    s.sub->add_option("--cesaro-m", s.vals.cesaro_m, "Cesaro truncation M (default 100000)");
    s.sub->add_option("--hbar", s.vals.hbar, "Planck constant (default 1.0)");
    s.sub->add_option("--e1", s.vals.e1, "upper level energy (default 2.0)");
    s.sub->add_option("--e2", s.vals.e2, "lower level energy (default 1.0)");
    s.sub->add_option("--rho11", s.vals.rho11, "state (1,1) entry (default 0.6)");
    s.sub->add_option("--rho22", s.vals.rho22, "state (2,2) entry (default 0.4)");
    s.sub->add_option("--rho12-re", s.vals.rho12_re, "Re state (1,2) entry (default 0.3)");
    s.sub->add_option("--rho12-im", s.vals.rho12_im, "Im state (1,2) entry (default 0.1)");
    s.sub->add_option("--o11", s.vals.o11, "observable (1,1) entry (default 1.0)");
    s.sub->add_option("--o22", s.vals.o22, "observable (2,2) entry (default -0.5)");
    s.sub->add_option("--o12-re", s.vals.o12_re, "Re observable (1,2) entry (default 0.4)");
    s.sub->add_option("--o12-im", s.vals.o12_im, "Im observable (1,2) entry (default 0.2)");
  }
  {
    SubOptions& s = attach("wigner", "trace pairings plus star-product and Moyal scaling scans");
    s.sub->add_option("--hbar-scan", s.vals.hbar_scan,
                      "decreasing hbar values for the scans (default 0.2 0.1 0.05 0.025)");
  }
  {
    SubOptions& s = attach("cross-validate",
                           "classify every built-in map and replay the verdict against probes");
    s.sub->add_option("--samples", s.vals.samples, "Ulam samples per cell (default 1000)");
    s.sub->add_option("--horizon", s.vals.horizon, "probe horizon (default 1000)");
    s.sub->add_option("--tol", s.vals.tol, "probe tolerance (default 0.05)");
  }
  attach("catalog", "list built-in systems with parameters and expected verdicts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (SubOptions& s : subs) {
      if (!s.sub->parsed()) continue;
      return (s.sub->get_name() == "catalog") ? run_catalog(s) : run_pipeline(s);
    }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return 2;
  } catch (const ehkit::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ehkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
