#pragma once

#include "ptlat/eigensolver.hpp"
#include "ptlat/lattice.hpp"
#include "ptlat/plaquette.hpp"
#include "ptlat/threshold.hpp"
#include "ptlat/variational.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ptlat {

using nlohmann::json;

// 12 significant digits, '.' separator, independent of the global locale.
std::string format_double(double value);

// Relative gain position 2 m0 / nx (even nx) or 2 m0 / (nx - 1) (odd nx).
double relative_gain_position(int nx, int m0);

std::string spectrum_csv(const SpectrumResult& spectrum);
std::string analytic_csv(const std::vector<AnalyticLevel>& levels);
std::string phase_diagram_csv(const PhaseDiagram& diagram);
std::string plaquette_csv(const PhaseDiagram& diagram);
std::string flow_csv(const FlowTable& flow);
std::string variational_csv(const VariationalTable& table);
std::string kappa_csv(const VariationalTable& table);
// One line per matrix row: re_0,im_0,re_1,im_1,...
std::string matrix_csv(const Eigen::MatrixXcd& matrix);

void to_json(json& j, const LatticeSpec& v);
void from_json(const json& j, LatticeSpec& v);
void to_json(json& j, const GainLossPlacement& v);
void from_json(const json& j, GainLossPlacement& v);
void to_json(json& j, const SpectrumResult& v);
void from_json(const json& j, SpectrumResult& v);
void to_json(json& j, const ThresholdResult& v);
void from_json(const json& j, ThresholdResult& v);
void to_json(json& j, const PhasePoint& v);
void from_json(const json& j, PhasePoint& v);
void to_json(json& j, const PhaseDiagram& v);
void from_json(const json& j, PhaseDiagram& v);
void to_json(json& j, const ScalingCheck& v);
void from_json(const json& j, ScalingCheck& v);
void to_json(json& j, const FlowTable& v);
void from_json(const json& j, FlowTable& v);
void to_json(json& j, const VariationalEntry& v);
void from_json(const json& j, VariationalEntry& v);
void to_json(json& j, const VariationalTable& v);
void from_json(const json& j, VariationalTable& v);
void to_json(json& j, const StrongCouplingReport& v);
void from_json(const json& j, StrongCouplingReport& v);
void to_json(json& j, const BreakingPairPrediction& v);
void from_json(const json& j, BreakingPairPrediction& v);
void to_json(json& j, const PlaquetteConfig& v);
void from_json(const json& j, PlaquetteConfig& v);

// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ptlat
