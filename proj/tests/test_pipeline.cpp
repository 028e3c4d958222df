#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "ehkit/catalog.hpp"
#include "ehkit/errors.hpp"
#include "ehkit/pipeline.hpp"
#include "ehkit/probes.hpp"
#include "ehkit/serialize.hpp"
#include "ehkit/spectral.hpp"
#include "ehkit/transfer.hpp"

using namespace ehkit;
using Json = nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("ehkit_" + tag);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("density and operator survive a JSON round trip") {
  const SpacePtr space = make_uniform_space(16);
  const Density f = Density::indicator(space, {2, 3, 7});
  const Density f2 = density_from_json(density_to_json(f));
  CHECK(f2.space()->n_cells() == 16);
  CHECK((f2.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);

  const TransferOperator p = ulam_operator(MapSystem::dyadic(), space, 200, 7);
  const TransferOperator p2 = operator_from_json(operator_to_json(p));
  CHECK(p2.n_cells() == 16);
  CHECK((p2.matrix() - p.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p2.provenance() == Provenance::Custom);

  Json bad = operator_to_json(p);
  bad["format"] = "sparse";
  CHECK_THROWS_AS(operator_from_json(bad), InvalidArgument);
}

TEST_CASE("csv emitters follow the declared schemas") {
  const SpacePtr space = make_uniform_space(8);
  const TransferOperator p = ulam_operator(MapSystem::cyclic_shift(4), space);
  const ProbeReport probe =
      ergodic_probe(p, Density::uniform(space), ClassicalObservable::ramp(space), 10, 0.05);
  const std::string csv = probe_csv(probe);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "n,value,target");
  std::getline(lines, line);
  CHECK(line.rfind("0,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);  // header + n = 0..10

  CHECK(cell_values_csv(Eigen::Vector2d(0.5, 0.25)) == "cell,value\n0,0.5\n1,0.25\n");

  const std::string series = series_csv({1.0, 0.5}, "value");
  CHECK(series == "n,value\n0,1\n1,0.5\n");
}

TEST_CASE("catalog resolves names, parameters, and expected verdicts") {
  CHECK(builtin_catalog().size() == 9);
  for (const char* name :
       {"rotation", "dyadic", "tent", "baker", "cyclic_shift", "identity"}) {
    const ClassicalSystemSpec spec = classical_system(name);
    CHECK(spec.default_cells > 0);
    CHECK(!spec.expected_verdict.empty());
  }

  CHECK(classical_system("rotation(0.125)").default_cells == 8);
  CHECK(classical_system("rotation(0.2)").default_cells == 5);
  CHECK(classical_system("cyclic_shift(5)").default_cells == 5);
  CHECK(classical_system("cyclic_shift(1)").expected_verdict == "exact (r = 1)");
  CHECK_THROWS_AS(classical_system("rotation(0.1234567)"), InvalidArgument);
  CHECK_THROWS_AS(classical_system("dyadic(3)"), InvalidArgument);
  CHECK_THROWS_AS(classical_system("rotation("), InvalidArgument);
  CHECK_THROWS_AS(classical_system("rotation(x)"), InvalidArgument);
  CHECK_THROWS_AS(classical_system("sine"), InvalidArgument);

  for (const char* name : {"two-level", "quasi-continuous-gaussian", "mixed-spectrum"}) {
    const QuantumSystemModel model = quantum_system(name, 1.0);
    CHECK((model.discrete.has_value() || model.continuum.has_value()));
    CHECK(!expected_quantum_verdict(name).empty());
  }
  CHECK_THROWS_AS(quantum_system("qubit", 1.0), InvalidArgument);
  CHECK_THROWS_AS(quantum_system("two-level", 0.0), InvalidArgument);

  const Json catalog = catalog_to_json();
  REQUIRE(catalog.is_array());
  CHECK(catalog.size() == 9);
  for (const auto& entry : catalog) {
    CHECK(entry.contains("name"));
    CHECK(entry.contains("expected_verdict"));
  }
}

TEST_CASE("run config round-trips losslessly and rejects junk") {
  RunConfig c;
  c.mode = "classical";
  c.system = "cyclic_shift(3)";
  c.cells = 12;
  c.samples = 321;
  c.seed = 99;
  c.horizon = 77;
  c.cesaro_m = 1234;
  c.tol = 0.125;
  c.hbar = 0.5;
  c.e1 = 3.5;
  c.rho12_im = -0.25;
  c.hbar_scan = {0.4, 0.2, 0.05};
  c.out_dir = "somewhere";
  c.json_output = true;
  c.with_timestamp = false;

  const RunConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.system == "cyclic_shift(3)");
  CHECK(back.hbar_scan == std::vector<double>{0.4, 0.2, 0.05});
  CHECK(back.with_timestamp == false);

  CHECK_THROWS_AS(config_from_json(Json{{"mode", "classical"}, {"cellz", 8}}),
                  InvalidArgument);
  CHECK_THROWS_AS(config_from_json(Json{{"mode", "classical"}, {"cells", "many"}}),
                  InvalidArgument);
  CHECK_THROWS_AS(config_from_json(Json::array()), InvalidArgument);

  RunConfig bad_mode;
  bad_mode.mode = "sideways";
  CHECK_THROWS_AS(run(bad_mode), InvalidArgument);
  RunConfig no_samples;
  no_samples.mode = "classical";
  no_samples.samples = 0;
  CHECK_THROWS_AS(run(no_samples), InvalidArgument);
}

TEST_CASE("identical configs produce byte-identical reports without timestamps") {
  RunConfig c;
  c.mode = "classical";
  c.system = "cyclic_shift(3)";
  c.with_timestamp = false;

  const RunReport a = run(c);
  const RunReport b = run(c);
  CHECK(report_to_json(a, false).dump() == report_to_json(b, false).dump());
  CHECK(a.verdict == "ergodic, not mixing (r = 3, cyclic α)");
  CHECK(a.exit_code == 0);
  CHECK(a.hash == config_hash(c));
  CHECK(report_to_json(a, true).contains("timestamp"));
  CHECK_FALSE(report_to_json(a, false).contains("timestamp"));
}

TEST_CASE("classical pipeline writes the artifacts it reports") {
  const auto dir = fresh_dir("classical_artifacts");
  RunConfig c;
  c.mode = "classical";
  c.system = "dyadic";
  c.cells = 64;
  c.samples = 400;
  c.out_dir = dir.string();
  c.with_timestamp = false;

  const RunReport rep = run(c);
  CHECK(rep.verdict == "exact (r = 1)");
  CHECK(rep.exit_code == 0);
  REQUIRE(rep.artifacts.size() == 6);
  for (const std::string& path : rep.artifacts) CHECK(std::filesystem::exists(path));

  const Json report = Json::parse(read_text_file((dir / "report.json").string()));
  CHECK(report["verdict"] == "exact (r = 1)");
  CHECK(report["artifacts"].size() == rep.artifacts.size());
  CHECK_FALSE(report.contains("timestamp"));

  const Json decomp = Json::parse(read_text_file((dir / "decomposition.json").string()));
  CHECK(decomp["r"] == 1);
  CHECK(decomp["classification"]["verdict"] == "exact (r = 1)");
  CHECK(decomp["mu"].size() == 1);

  const std::string probe = read_text_file((dir / "exact_probe.csv").string());
  CHECK(probe.rfind("n,value,target\n", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("two-level pipeline reports the fixed-weight discrepancy") {
  RunConfig c;
  c.mode = "two-level";
  c.cesaro_m = 20000;
  c.with_timestamp = false;

  const RunReport rep = run(c);
  CHECK(rep.verdict == "ergodic");
  CHECK(rep.exit_code == 0);
  CHECK(rep.body["fixed_weight_consistent"] == false);
  CHECK(rep.body["diagonal_gap"].get<double>() < 10.0 / 20000);

  const auto& table = rep.body["cesaro_table"];
  REQUIRE(table.size() >= 5);
  long long prev = 0;
  for (const auto& row : table) {
    CHECK(row["M"].get<long long>() > prev);
    prev = row["M"].get<long long>();
  }
  CHECK(prev == 20000);

  bool noted = false;
  for (const std::string& line : rep.evidence)
    if (line.find("1/(1-z)") != std::string::npos) noted = true;
  CHECK(noted);
}

TEST_CASE("quantum pipeline covers continuum certificates") {
  const auto dir = fresh_dir("quantum_artifacts");
  RunConfig c;
  c.mode = "quantum";
  c.system = "quasi-continuous-gaussian";
  c.out_dir = dir.string();
  c.with_timestamp = false;

  const RunReport rep = run(c);
  CHECK(rep.verdict == "mixing");
  CHECK(rep.exit_code == 0);
  CHECK(rep.body.contains("weak_limit"));
  CHECK(rep.body.contains("homogenization"));
  CHECK(rep.body["homogenization"]["homogenized"] == true);
  CHECK(std::filesystem::exists(dir / "quantum_series.csv"));
  const std::string csv = read_text_file((dir / "quantum_series.csv").string());
  CHECK(csv.rfind("n,mean_value,oscillatory,remainder\n", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cross-validate pipeline agrees across the catalog") {
  RunConfig c;
  c.mode = "cross-validate";
  c.samples = 500;
  c.with_timestamp = false;

  const RunReport rep = run(c);
  CHECK(rep.exit_code == 0);
  CHECK(rep.body["consistent"] == true);
  CHECK(rep.body["systems"].size() == 6);
  for (const auto& item : rep.body["systems"]) {
    CHECK(item["verdict_match"] == true);
    CHECK(item["consistency"]["consistent"] == true);
  }
}
