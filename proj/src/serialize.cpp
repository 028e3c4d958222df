#include "ehkit/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace ehkit {

namespace {

// Shortest decimal that round-trips; keeps CSV output byte-stable across runs.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Json split_to_json(const QSDTSplit& s) {
  Json j;
  j["A"] = s.A;
  j["B"] = s.B;
  j["constant_term"] = s.constant_term;
  if (s.period_estimate) {
    j["period"] = *s.period_estimate;
  } else {
    j["period"] = nullptr;
  }
  j["period_note"] = s.period_note;
  j["decade_max"] = s.decade_max;
  j["remainder_decays"] = s.remainder_decays;
  j["remainder_negligible"] = s.remainder_negligible;
  j["fit_residual"] = s.fit_residual;
  j["component_notes"] = s.component_notes;
  return j;
}

}  // namespace

Json density_to_json(const Density& f) {
  Json j;
  j["partition"]["n_cells"] = f.space()->n_cells();
  j["partition"]["domain"] = to_string(f.space()->domain());
  j["values"] = std::vector<double>(f.values().data(), f.values().data() + f.values().size());
  return j;
}

Density density_from_json(const Json& j) {
  if (!j.contains("partition") || !j.contains("values")) {
    throw InvalidArgument("density JSON needs 'partition' and 'values'");
  }
  const auto n = j["partition"].at("n_cells").get<std::size_t>();
  const auto domain = domain_from_string(j["partition"].value("domain", "unit_interval"));
  const auto vals = j.at("values").get<std::vector<double>>();
  if (vals.size() != n) throw DimensionMismatch("density values do not match n_cells");
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
  return {make_uniform_space(n, domain), std::move(v)};
}

Json operator_to_json(const TransferOperator& p) {
  Json j;
  j["n"] = p.n_cells();
  j["format"] = "dense";
  j["domain"] = to_string(p.space()->domain());
  j["provenance"] = to_string(p.provenance());
  Json rows = Json::array();
  const Eigen::MatrixXd& m = p.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

TransferOperator operator_from_json(const Json& j) {
  if (j.value("format", "") != std::string("dense")) {
    throw InvalidArgument("operator JSON must declare format 'dense'");
  }
  const auto n = j.at("n").get<std::size_t>();
  const auto domain = domain_from_string(j.value("domain", "unit_interval"));
  const auto& rows = j.at("rows");
  if (rows.size() != n) throw DimensionMismatch("operator rows do not match n");
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = rows.at(i).get<std::vector<double>>();
    if (row.size() != n) throw DimensionMismatch("operator row length does not match n");
    for (std::size_t c = 0; c < n; ++c) m(i, c) = row[c];
  }
  return {make_uniform_space(n, domain), std::move(m), Provenance::Custom, "json"};
}

Json decomposition_to_json(const SpectralDecomposition& d, const EHClassification& c) {
  Json j;
  j["r"] = d.r;
  j["cycle_notation"] = d.cycle_notation();
  j["cell_sets"] = d.cell_sets;
  j["mu"] = d.alpha_weights;
  j["permutation"] = d.permutation;
  Json decay = Json::array();
  for (const RemainderSeries& s : d.remainder_decay) {
    decay.push_back(Json{{"probe", s.probe}, {"values", s.values}});
  }
  j["remainder_decay"] = std::move(decay);
  Json peripheral = Json::array();
  for (const std::complex<double>& z : d.peripheral_values) {
    peripheral.push_back(Json{{"re", z.real()}, {"im", z.imag()}});
  }
  j["peripheral_values"] = std::move(peripheral);
  j["classification"] = {
      {"verdict", c.verdict()},
      {"ergodic", c.ergodic},
      {"ergodic_evidence", c.ergodic_evidence},
      {"exact", to_string(c.exact)},
      {"mixing", to_string(c.mixing)},
      {"notes", c.notes},
  };
  return j;
}

Json consistency_to_json(const ConsistencyReport& r) {
  Json j;
  j["consistent"] = r.consistent;
  Json checks = Json::array();
  for (const ConsistencyCheck& c : r.checks) {
    checks.push_back(Json{{"name", c.name}, {"ok", c.ok}, {"evidence", c.evidence}});
  }
  j["checks"] = std::move(checks);
  return j;
}

Json markov_to_json(const MarkovReport& r) {
  return Json{
      {"entries_nonnegative", r.entries_nonnegative},
      {"mass_conserving", r.mass_conserving},
      {"l1_contractive", r.l1_contractive},
      {"monotone", r.monotone},
      {"worst_negative_entry", r.worst_negative_entry},
      {"worst_mass_defect", r.worst_mass_defect},
      {"worst_contraction_excess", r.worst_contraction_excess},
      {"worst_monotonicity_defect", r.worst_monotonicity_defect},
      {"all_ok", r.all_ok()},
  };
}

Json quantum_to_json(const QuantumClassification& c) {
  Json j;
  j["verdict"] = c.verdict;
  j["exactness"] = c.exactness;
  j["evidence"] = c.evidence;
  if (c.split.period_estimate) {
    j["period"] = *c.split.period_estimate;
  } else {
    j["period"] = nullptr;
  }
  j["constant_term"] = c.split.constant_term;
  j["A"] = c.split.A;
  j["B"] = c.split.B;
  j["split"] = split_to_json(c.split);
  j["horizon"] = c.horizon;
  j["tol"] = c.tol;
  return j;
}

Json two_level_to_json(const TwoLevelReport& r) {
  Json j;
  j["e1"] = r.e1;
  j["e2"] = r.e2;
  j["hbar"] = r.hbar;
  j["verdict"] = r.verdict;
  j["evidence"] = r.evidence;
  j["degenerate"] = r.degenerate;
  j["z"] = {{"re", r.z.real()}, {"im", r.z.imag()}};
  j["split"] = split_to_json(r.split);
  Json cesaro = Json::array();
  // Running averages thin out to a table: every decade plus the final value.
  const auto& run = r.cesaro.running;
  std::size_t last = 0;
  for (std::size_t m = 1; m <= run.size(); m *= 10) {
    cesaro.push_back(Json{{"M", m}, {"sigma_re", run[m - 1].real()}, {"sigma_im", run[m - 1].imag()}});
    last = m;
  }
  if (!run.empty() && last != run.size()) {
    cesaro.push_back(Json{{"M", run.size()},
                          {"sigma_re", run.back().real()},
                          {"sigma_im", run.back().imag()}});
  }
  j["cesaro_table"] = std::move(cesaro);
  j["phase_bound_margin"] = r.phase_bound_margin;
  j["diagonal_part"] = r.diagonal_part;
  j["numeric_limit"] = r.numeric_limit;
  j["diagonal_gap"] = r.diagonal_gap;
  j["fixed_weight_offdiag"] = r.fixed_weight_offdiag;
  j["fixed_weight_limit"] = r.fixed_weight_limit;
  j["fixed_weight_gap"] = r.fixed_weight_gap;
  j["fixed_weight_consistent"] = r.fixed_weight_consistent;
  j["notes"] = r.notes;
  return j;
}

Json weak_limit_to_json(const WeakLimitReport& r) {
  Json j;
  j["limit_diag"] = vector_to_json(r.limit_diag);
  j["limit_values"] = r.limit_values;
  j["certified_horizon"] = r.certified_horizon;
  j["horizon"] = r.horizon;
  j["tol"] = r.tol;
  j["notes"] = r.notes;
  return j;
}

Json homogenization_to_json(const HomogenizationReport& r) {
  Json j;
  j["homogenized"] = r.homogenized;
  j["identity_ok"] = r.identity_ok;
  j["common_limit"] = vector_to_json(r.common_limit);
  j["worst_pair_gap"] = r.worst_pair_gap;
  j["identity_coefficients"] = r.identity_coefficients;
  j["variant_names"] = r.variant_names;
  j["certified_horizons"] = r.certified_horizons;
  j["notes"] = r.notes;
  return j;
}

Json phase_space_to_json(const PhaseSpaceFunction& f) {
  Json j;
  j["qgrid"] = vector_to_json(f.qgrid);
  j["pgrid"] = vector_to_json(f.pgrid);
  j["hbar"] = f.hbar;
  Json values = Json::array();
  for (Eigen::Index a = 0; a < f.values.rows(); ++a) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < f.values.cols(); ++c) row.push_back(f.values(a, c));
    values.push_back(std::move(row));
  }
  j["values"] = std::move(values);
  return j;
}

Json scaling_to_json(const ScalingReport& r) {
  return Json{
      {"hbar", r.hbars},
      {"deviation", r.deviations},
      {"slope", r.slope},
      {"band", r.band},
      {"expected_slope", r.expected_slope},
      {"within_band", r.within_band},
      {"conclusive", r.conclusive},
      {"noise_floor", r.noise_floor},
      {"notes", r.notes},
  };
}

Json trace_check_to_json(const TraceProductCheck& c) {
  return Json{
      {"lhs", c.lhs}, {"rhs", c.rhs}, {"gap", c.gap}, {"relative_gap", c.relative_gap}};
}

std::string probe_csv(const ProbeReport& r) {
  std::ostringstream os;
  os << "n,value,target\n";
  for (std::size_t n = 0; n < r.series.size(); ++n) {
    os << n << ',' << num(r.series[n]) << ',' << num(r.target) << '\n';
  }
  return os.str();
}

std::string cell_values_csv(const Eigen::VectorXd& values) {
  std::ostringstream os;
  os << "cell,value\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) os << i << ',' << num(values(i)) << '\n';
  return os.str();
}

std::string quantum_series_csv(const QuantumClassification& c) {
  return split_series_csv(c.series, c.split);
}

std::string split_series_csv(const std::vector<double>& series, const QSDTSplit& split) {
  std::ostringstream os;
  os << "n,mean_value,oscillatory,remainder\n";
  for (std::size_t n = 0; n < series.size(); ++n) {
    os << n << ',' << num(series[n]) << ',' << num(split.oscillatory[n]) << ','
       << num(split.remainder[n]) << '\n';
  }
  return os.str();
}

std::string phase_space_csv(const PhaseSpaceFunction& f) {
  std::ostringstream os;
  os << "q,p,value\n";
  for (Eigen::Index a = 0; a < f.values.rows(); ++a) {
    for (Eigen::Index c = 0; c < f.values.cols(); ++c) {
      os << num(f.qgrid(a)) << ',' << num(f.pgrid(c)) << ',' << num(f.values(a, c)) << '\n';
    }
  }
  return os.str();
}

std::string series_csv(const std::vector<double>& series, const std::string& value_header) {
  std::ostringstream os;
  os << "n," << value_header << '\n';
  for (std::size_t n = 0; n < series.size(); ++n) os << n << ',' << num(series[n]) << '\n';
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open for writing: " + path);
  out << content;
  if (!out) throw InvalidArgument("failed writing: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace ehkit
