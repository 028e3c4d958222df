#include "ehkit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <random>
#include <sstream>

#include "ehkit/catalog.hpp"
#include "ehkit/errors.hpp"
#include "ehkit/probes.hpp"
#include "ehkit/quantum.hpp"
#include "ehkit/serialize.hpp"
#include "ehkit/spectral.hpp"
#include "ehkit/transfer.hpp"
#include "ehkit/wigner.hpp"

namespace ehkit {
namespace {

using Json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

const char* kModes[] = {"classical", "quantum", "two-level", "wigner", "cross-validate"};

void check_mode(const std::string& mode) {
  for (const char* m : kModes)
    if (mode == m) return;
  throw InvalidArgument("unknown mode '" + mode +
                        "' (expected classical, quantum, two-level, wigner, or cross-validate)");
}

long long effective_horizon(const RunConfig& c) {
  if (c.horizon > 0) return c.horizon;
  if (c.mode == "quantum") return 2000;
  return 1000;  // classical probes, two-level series, cross-validate probes
}

double effective_tol(const RunConfig& c) {
  if (c.tol > 0.0) return c.tol;
  if (c.mode == "quantum") return 1e-3;
  return 0.05;  // probe tolerance
}

// Collects artifact files under out_dir; disabled when no out_dir is given, so
// the report lists exactly the files that exist afterwards.
class ArtifactWriter {
 public:
  ArtifactWriter(const std::string& dir, std::vector<std::string>& sink)
      : dir_(dir), sink_(sink) {}

  void write(const std::string& name, const std::string& content) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    const std::filesystem::path path = dir_ / name;
    write_text_file(path.string(), content);
    sink_.push_back(path.string());
  }

  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
  std::vector<std::string>& sink_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ClassicalObservable unit_ramp(const SpacePtr& space) {
  ClassicalObservable ramp = ClassicalObservable::ramp(space);
  return ClassicalObservable(space, ramp.values() / ramp.sup_norm());
}

void run_classical(const RunConfig& c, RunReport& rep, ArtifactWriter& files) {
  const std::string name = c.system.empty() ? "dyadic" : c.system;
  const ClassicalSystemSpec spec = classical_system(name);
  const std::size_t cells = c.cells ? c.cells : spec.default_cells;
  const long long horizon = effective_horizon(c);
  const double tol = effective_tol(c);

  const SpacePtr space = make_uniform_space(cells, spec.map.domain());
  const TransferOperator p = ulam_operator(spec.map, space, c.samples, c.seed);
  const SpectralDecomposition decomp = extract_decomposition(p);
  const EHClassification cls = classify(decomp);
  const MarkovReport markov = verify_markov(p);

  ProbeSettings settings;
  settings.horizon = static_cast<std::size_t>(horizon);
  settings.tol = tol;
  settings.seed = c.seed;
  const ConsistencyReport consistency = cross_validate(p, decomp, settings);

  rep.verdict = cls.verdict();
  rep.evidence.push_back(cls.ergodic_evidence);
  for (const auto& check : consistency.checks)
    rep.evidence.push_back(check.name + (check.ok ? " ok: " : " FAILED: ") + check.evidence);
  rep.evidence.push_back(std::string("Markov axioms ") + (markov.all_ok() ? "hold" : "VIOLATED"));

  Json body;
  body["system"] = name;
  body["cells"] = cells;
  body["samples"] = c.samples;
  body["decomposition"] = decomposition_to_json(decomp, cls);
  body["consistency"] = consistency_to_json(consistency);
  body["markov"] = markov_to_json(markov);
  body["expected_verdict"] = spec.expected_verdict;
  body["verdict_match"] = (rep.verdict == spec.expected_verdict);
  rep.body = body;

  files.write_json("decomposition.json", body["decomposition"]);
  const Density f = Density::indicator(space, {0});
  const ClassicalObservable g = unit_ramp(space);
  files.write("ergodic_probe.csv",
              probe_csv(ergodic_probe(p, f, g, settings.horizon, tol)));
  files.write("mixing_probe.csv", probe_csv(mixing_probe(p, f, g, settings.horizon, tol)));
  files.write("exact_probe.csv", probe_csv(exact_probe(p, f, settings.horizon, tol)));
  files.write("stationary_density.csv", cell_values_csv(stationary_density(p).values()));

  if (!consistency.consistent || !body["verdict_match"].get<bool>()) rep.exit_code = 4;
  if (!markov.all_ok()) rep.exit_code = 3;
}

std::vector<VanHoveObservable> weak_limit_basket(const QuasiContinuousModel& model) {
  const Eigen::VectorXd& grid = model.omega_grid();
  std::vector<VanHoveObservable> basket;
  basket.push_back(model.own_observable());
  basket.push_back(make_gaussian_vanhove(grid, 0.45, 0.15, 0.05, 0.7, 0.0, "narrow"));
  basket.push_back(make_gaussian_vanhove(grid, 0.6, 0.25, 0.03, 0.5, 2.0, "twisted"));
  basket.push_back(make_gaussian_vanhove(grid, 0.35, 0.2, 0.04, 0.6, 1.0, "offset"));
  basket.push_back(VanHoveObservable{Eigen::VectorXd::Ones(model.n_points()),
                                     Eigen::MatrixXcd::Zero(model.n_points(), model.n_points()),
                                     "identity"});
  return basket;
}

void run_quantum(const RunConfig& c, RunReport& rep, ArtifactWriter& files) {
  const std::string name = c.system.empty() ? "two-level" : c.system;
  const QuantumSystemModel model = quantum_system(name, c.hbar);
  const long long horizon = effective_horizon(c);
  const double tol = effective_tol(c);

  const QuantumClassification cls = classify_quantum(model, horizon, tol);
  rep.verdict = cls.verdict;
  rep.evidence = cls.evidence;

  Json body;
  body["system"] = name;
  body["hbar"] = c.hbar;
  body["classification"] = quantum_to_json(cls);

  if (model.continuum) {
    const QuasiContinuousModel& qc = *model.continuum;
    const auto basket = weak_limit_basket(qc);
    const WeakLimitReport weak = weak_limit(qc, basket, 600, tol);
    body["weak_limit"] = weak_limit_to_json(weak);
    rep.evidence.push_back("weak limit certified from n = " +
                           std::to_string(weak.certified_horizon) + " on a basket of " +
                           std::to_string(basket.size()) + " observables");

    const auto alt1 = make_gaussian_continuum(qc.n_points(), 1.0, 0.5, 0.2, 0.05, 1.0, c.hbar);
    const auto alt2 = make_gaussian_continuum(qc.n_points(), 1.0, 0.5, 0.2, 0.03, 0.7, c.hbar);
    std::vector<RhoVariant> variants;
    variants.push_back({qc.rho_diag(), qc.rho_offdiag(), "base"});
    variants.push_back({alt1.rho_diag(), alt1.rho_offdiag(), "medium"});
    variants.push_back({alt2.rho_diag(), alt2.rho_offdiag(), "narrow"});
    std::vector<VanHoveObservable> homo_basket = {
        qc.own_observable(),
        make_gaussian_vanhove(qc.omega_grid(), 0.5, 0.2, 0.05, 0.6, 0.0, "probe")};
    const HomogenizationReport homo = homogenization_check(qc, variants, homo_basket, tol, 600);
    body["homogenization"] = homogenization_to_json(homo);
    rep.evidence.push_back(std::string("homogenization over ") +
                           std::to_string(variants.size()) + " initial states " +
                           (homo.homogenized ? "holds" : "FAILED"));
    if (!homo.homogenized || !homo.identity_ok) rep.exit_code = 3;
  }

  const std::string expected = expected_quantum_verdict(name);
  body["expected_verdict"] = expected;
  body["verdict_match"] = (cls.verdict == expected);
  rep.body = body;
  if (cls.verdict != expected) rep.exit_code = 4;

  files.write_json("quantum.json", body);
  files.write("quantum_series.csv", quantum_series_csv(cls));
}

void run_two_level(const RunConfig& c, RunReport& rep, ArtifactWriter& files) {
  const TwoLevelReport tl = two_level_demo(
      c.e1, c.e2, c.hbar, c.rho11, c.rho22, std::complex<double>(c.rho12_re, c.rho12_im), c.o11,
      c.o22, std::complex<double>(c.o12_re, c.o12_im), c.cesaro_m, effective_horizon(c));

  rep.verdict = tl.verdict;
  rep.evidence = tl.evidence;
  for (const auto& note : tl.notes) rep.evidence.push_back(note);

  rep.body = two_level_to_json(tl);
  files.write_json("two_level.json", rep.body);
  files.write("two_level_series.csv", split_series_csv(tl.series, tl.split));
}

void run_wigner(const RunConfig& c, RunReport& rep, ArtifactWriter& files) {
  const double pair_hbar = 0.1;
  const Eigen::VectorXd grid = uniform_qgrid(128, -1.0, 1.0);

  // Seeded random packet/observable pairs; the parameter windows keep both
  // factors well inside the grid and the p-window so the pairing identity is
  // exercised away from truncation edges.
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> uq(-0.2, 0.2), up(-0.4, 0.4);
  std::uniform_real_distribution<double> usig(0.08, 0.18), uwq(0.1, 0.22), uwp(0.2, 0.45);
  std::uniform_real_distribution<double> uamp(0.5, 2.0), ujit(-0.2, 0.2), upjit(-0.3, 0.3);

  Json checks = Json::array();
  bool pairs_ok = true;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double sq = uq(rng), sp = up(rng);
    const PositionGridOperator state = PositionGridOperator::state_from_wavefunction(
        grid, gaussian_wavepacket(grid, sq, sp, usig(rng), pair_hbar), pair_hbar);
    const PositionGridOperator obs = PositionGridOperator::gaussian_phase_space(
        grid, sq + ujit(rng), sp + upjit(rng), uwq(rng), uwp(rng), uamp(rng), pair_hbar);
    const TraceProductCheck check = trace_product_check(state, obs);
    checks.push_back(trace_check_to_json(check));
    worst_rel = std::max(worst_rel, check.relative_gap);
    if (!(check.relative_gap < 1e-5)) pairs_ok = false;
  }

  const ScalingReport star = star_product_scaling_gaussian(c.hbar_scan);
  const ScalingReport moyal = moyal_bracket_scaling_gaussian(c.hbar_scan);
  const bool star_ok = star.conclusive && star.within_band;
  const bool moyal_ok = moyal.conclusive && moyal.within_band;

  rep.evidence.push_back("trace pairings: worst relative gap " + format_double(worst_rel) +
                         (pairs_ok ? " (ok)" : " (FAILED)"));
  rep.evidence.push_back("star-product deviation slope " + format_double(star.slope) +
                         ", expected 1 +- " + format_double(star.band) +
                         (star_ok ? " (ok)" : " (FAILED)"));
  rep.evidence.push_back("Moyal-vs-Poisson deviation slope " + format_double(moyal.slope) +
                         ", expected 2 +- " + format_double(moyal.band) +
                         (moyal_ok ? " (ok)" : " (FAILED)"));

  Json body;
  body["pair_hbar"] = pair_hbar;
  body["trace_checks"] = checks;
  body["star_scaling"] = scaling_to_json(star);
  body["moyal_scaling"] = scaling_to_json(moyal);
  rep.body = body;

  files.write_json("wigner.json", body);
  files.write_json("star_scaling.json", body["star_scaling"]);
  files.write_json("moyal_scaling.json", body["moyal_scaling"]);
  const PositionGridOperator demo = PositionGridOperator::state_from_wavefunction(
      grid, gaussian_wavepacket(grid, 0.05, 0.4, 0.1, pair_hbar), pair_hbar);
  const PhaseSpaceFunction w = wigner_of_state(demo);
  files.write("wigner_state.csv", phase_space_csv(w));
  files.write_json("wigner_state.json", phase_space_to_json(w));

  if (!(pairs_ok && star_ok && moyal_ok)) rep.exit_code = 3;
}

void run_cross_validate(const RunConfig& c, RunReport& rep, ArtifactWriter& files) {
  ProbeSettings settings;
  settings.horizon = static_cast<std::size_t>(effective_horizon(c));
  settings.tol = effective_tol(c);
  settings.seed = c.seed;

  Json systems = Json::array();
  bool all_ok = true;
  bool markov_all_ok = true;
  for (const CatalogEntry& entry : builtin_catalog()) {
    if (entry.kind != "classical") continue;
    const ClassicalSystemSpec spec = classical_system(entry.name);
    const SpacePtr space = make_uniform_space(entry.default_cells, spec.map.domain());
    const TransferOperator p = ulam_operator(spec.map, space, c.samples, c.seed);
    const SpectralDecomposition decomp = extract_decomposition(p);
    const EHClassification cls = classify(decomp);
    const ConsistencyReport consistency = cross_validate(p, decomp, settings);
    const MarkovReport markov = verify_markov(p);
    const bool match = (cls.verdict() == entry.expected_verdict);
    const bool ok = match && consistency.consistent;
    all_ok = all_ok && ok;
    markov_all_ok = markov_all_ok && markov.all_ok();

    Json item;
    item["system"] = entry.name;
    item["cells"] = entry.default_cells;
    item["verdict"] = cls.verdict();
    item["expected_verdict"] = entry.expected_verdict;
    item["verdict_match"] = match;
    item["consistency"] = consistency_to_json(consistency);
    item["markov_ok"] = markov.all_ok();
    systems.push_back(item);
    rep.evidence.push_back(entry.name + ": " + cls.verdict() +
                           (ok ? " [agrees]" : " [DISAGREES]"));
  }

  Json body;
  body["systems"] = systems;
  body["consistent"] = all_ok;
  body["markov_ok"] = markov_all_ok;
  rep.body = body;
  files.write_json("cross_validate.json", body);
  if (!markov_all_ok) rep.exit_code = 3;
  if (!all_ok) rep.exit_code = 4;
}

std::string iso8601_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Json config_to_json(const RunConfig& c) {
  Json j;
  j["mode"] = c.mode;
  j["system"] = c.system;
  j["cells"] = c.cells;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["horizon"] = c.horizon;
  j["cesaro_m"] = c.cesaro_m;
  j["tol"] = c.tol;
  j["hbar"] = c.hbar;
  j["e1"] = c.e1;
  j["e2"] = c.e2;
  j["rho11"] = c.rho11;
  j["rho22"] = c.rho22;
  j["rho12_re"] = c.rho12_re;
  j["rho12_im"] = c.rho12_im;
  j["o11"] = c.o11;
  j["o22"] = c.o22;
  j["o12_re"] = c.o12_re;
  j["o12_im"] = c.o12_im;
  j["hbar_scan"] = c.hbar_scan;
  j["out_dir"] = c.out_dir;
  j["json"] = c.json_output;
  j["timestamp"] = c.with_timestamp;
  return j;
}

namespace {

template <typename T>
T typed_field(const Json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "mode") c.mode = typed_field<std::string>(value, "mode");
    else if (key == "system") c.system = typed_field<std::string>(value, "system");
    else if (key == "cells") c.cells = typed_field<std::size_t>(value, "cells");
    else if (key == "samples") c.samples = typed_field<std::size_t>(value, "samples");
    else if (key == "seed") c.seed = typed_field<std::uint64_t>(value, "seed");
    else if (key == "horizon") c.horizon = typed_field<long long>(value, "horizon");
    else if (key == "cesaro_m") c.cesaro_m = typed_field<long long>(value, "cesaro_m");
    else if (key == "tol") c.tol = typed_field<double>(value, "tol");
    else if (key == "hbar") c.hbar = typed_field<double>(value, "hbar");
    else if (key == "e1") c.e1 = typed_field<double>(value, "e1");
    else if (key == "e2") c.e2 = typed_field<double>(value, "e2");
    else if (key == "rho11") c.rho11 = typed_field<double>(value, "rho11");
    else if (key == "rho22") c.rho22 = typed_field<double>(value, "rho22");
    else if (key == "rho12_re") c.rho12_re = typed_field<double>(value, "rho12_re");
    else if (key == "rho12_im") c.rho12_im = typed_field<double>(value, "rho12_im");
    else if (key == "o11") c.o11 = typed_field<double>(value, "o11");
    else if (key == "o22") c.o22 = typed_field<double>(value, "o22");
    else if (key == "o12_re") c.o12_re = typed_field<double>(value, "o12_re");
    else if (key == "o12_im") c.o12_im = typed_field<double>(value, "o12_im");
    else if (key == "hbar_scan") c.hbar_scan = typed_field<std::vector<double>>(value, "hbar_scan");
    else if (key == "out_dir") c.out_dir = typed_field<std::string>(value, "out_dir");
    else if (key == "json") c.json_output = typed_field<bool>(value, "json");
    else if (key == "timestamp") c.with_timestamp = typed_field<bool>(value, "timestamp");
    else throw InvalidArgument("unknown config field '" + key + "'");
  }
  return c;
}

std::string config_hash(const RunConfig& c) {
  const std::string dump = config_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json report_to_json(const RunReport& r, bool with_timestamp) {
  Json j;
  j["mode"] = r.mode;
  if (!r.verdict.empty()) j["verdict"] = r.verdict;
  j["evidence"] = r.evidence;
  j["artifacts"] = r.artifacts;
  j["exit_code"] = r.exit_code;
  j["provenance"] = {{"config_hash", r.hash}, {"seed", r.seed}, {"version", r.version}};
  j["report"] = r.body;
  if (with_timestamp) j["timestamp"] = iso8601_utc_now();
  return j;
}

std::string report_text(const RunReport& r) {
  std::ostringstream os;
  os << "ehkit " << r.mode << " (v" << r.version << ")\n";
  if (!r.verdict.empty()) os << "verdict: " << r.verdict << "\n";
  if (!r.evidence.empty()) {
    os << "evidence:\n";
    for (const auto& line : r.evidence) os << "  - " << line << "\n";
  }
  if (r.body.contains("cesaro_table")) {
    os << "Cesaro averages of the mean-value series:\n";
    os << "        M        Re(sigma_M)        Im(sigma_M)\n";
    for (const auto& row : r.body["cesaro_table"]) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%9lld %18.12f %18.12f\n",
                    static_cast<long long>(row["M"].get<long long>()),
                    row["sigma_re"].get<double>(), row["sigma_im"].get<double>());
      os << buf;
    }
  }
  if (!r.artifacts.empty()) {
    os << "artifacts:\n";
    for (const auto& path : r.artifacts) os << "  - " << path << "\n";
  }
  os << "config " << r.hash << ", seed " << r.seed << ", exit " << r.exit_code << "\n";
  return os.str();
}

RunReport run(const RunConfig& config) {
  check_mode(config.mode);
  if (config.samples == 0) throw InvalidArgument("samples must be positive");
  if (config.cesaro_m <= 0) throw InvalidArgument("cesaro_m must be positive");
  if (config.horizon < 0) throw InvalidArgument("horizon must be nonnegative");
  if (config.tol < 0.0) throw InvalidArgument("tol must be nonnegative");
  if (config.hbar <= 0.0) throw InvalidArgument("hbar must be positive");

  RunReport rep;
  rep.mode = config.mode;
  rep.seed = config.seed;
  rep.version = kVersion;
  rep.hash = config_hash(config);
  ArtifactWriter files(config.out_dir, rep.artifacts);

  if (config.mode == "classical") run_classical(config, rep, files);
  else if (config.mode == "quantum") run_quantum(config, rep, files);
  else if (config.mode == "two-level") run_two_level(config, rep, files);
  else if (config.mode == "wigner") run_wigner(config, rep, files);
  else run_cross_validate(config, rep, files);

  if (!config.out_dir.empty()) {
    // The written report lists itself, so serialize once to claim the path and
    // once more with the final artifact list.
    files.write_json("report.json", report_to_json(rep, config.with_timestamp));
    write_text_file(rep.artifacts.back(),
                    report_to_json(rep, config.with_timestamp).dump(2) + "\n");
  }
  return rep;
}

const char* version_string() { return kVersion; }

}  // namespace ehkit
