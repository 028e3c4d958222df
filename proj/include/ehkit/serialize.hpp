#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ehkit/measure.hpp"
#include "ehkit/probes.hpp"
#include "ehkit/quantum.hpp"
#include "ehkit/spectral.hpp"
#include "ehkit/transfer.hpp"
#include "ehkit/wigner.hpp"

namespace ehkit {

using Json = nlohmann::json;

// Densities carry their partition: {partition: {n_cells, domain}, values}.
Json density_to_json(const Density& f);
Density density_from_json(const Json& j);

// Dense operator dump: {n, format: "dense", rows, provenance}.
Json operator_to_json(const TransferOperator& p);
TransferOperator operator_from_json(const Json& j);

// {r, cycle_notation, cell_sets, mu, remainder_decay, classification}.
Json decomposition_to_json(const SpectralDecomposition& d, const EHClassification& c);

Json consistency_to_json(const ConsistencyReport& r);
Json markov_to_json(const MarkovReport& r);

// {verdict, evidence, period, constant_term, A, B, ...}.
Json quantum_to_json(const QuantumClassification& c);
Json two_level_to_json(const TwoLevelReport& r);
Json weak_limit_to_json(const WeakLimitReport& r);
Json homogenization_to_json(const HomogenizationReport& r);

// {qgrid, pgrid, values}.
Json phase_space_to_json(const PhaseSpaceFunction& f);
// {hbar, deviation, slope, band, ...}.
Json scaling_to_json(const ScalingReport& r);
Json trace_check_to_json(const TraceProductCheck& c);

// CSV emitters.  All floating-point values are written round-trip exact.
std::string probe_csv(const ProbeReport& r);                   // n,value,target
std::string cell_values_csv(const Eigen::VectorXd& values);    // cell,value
std::string quantum_series_csv(const QuantumClassification& c);  // n,mean_value,oscillatory,remainder
std::string split_series_csv(const std::vector<double>& series, const QSDTSplit& split);
std::string phase_space_csv(const PhaseSpaceFunction& f);      // q,p,value
std::string series_csv(const std::vector<double>& series, const std::string& value_header);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ehkit
