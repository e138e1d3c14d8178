#include "ptlat/io.hpp"

#include "ptlat/error.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ptlat {

NLOHMANN_JSON_SERIALIZE_ENUM(Boundary, {{Boundary::Open, "open"}, {Boundary::Periodic, "periodic"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SweepAxis, {{SweepAxis::GainColumn, "m0"},
                                         {SweepAxis::ChainIndex, "n0"},
                                         {SweepAxis::NumChains, "ny"},
                                         {SweepAxis::CouplingRatio, "ratio"}})
NLOHMANN_JSON_SERIALIZE_ENUM(PtChainPosition, {{PtChainPosition::Top, "top"}, {PtChainPosition::Middle, "middle"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ErrorKind, {{ErrorKind::InvalidSpec, "InvalidSpec"},
                                         {ErrorKind::InvalidPlacement, "InvalidPlacement"},
                                         {ErrorKind::UnsupportedBoundary, "UnsupportedBoundary"},
                                         {ErrorKind::IndexOutOfRange, "IndexOutOfRange"},
                                         {ErrorKind::NonFinite, "NonFinite"},
                                         {ErrorKind::NoConvergence, "NoConvergence"},
                                         {ErrorKind::UnconvergedSpectrum, "UnconvergedSpectrum"},
                                         {ErrorKind::NoBreakingFound, "NoBreakingFound"},
                                         {ErrorKind::DegenerateInput, "DegenerateInput"},
                                         {ErrorKind::AllDivergent, "AllDivergent"}})

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

double relative_gain_position(int nx, int m0) {
  return nx % 2 == 0 ? 2.0 * m0 / nx : 2.0 * m0 / (nx - 1);
}

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

std::string quote(const std::string& s) {
  if (s.empty()) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  out += '"';
  return out;
}

std::string optional_value(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("inf");
}

json complex_array(const std::vector<Complex>& values) {
  json arr = json::array();
  for (const auto& z : values) arr.push_back({z.real(), z.imag()});
  return arr;
}

std::vector<Complex> complex_vector(const json& arr) {
  std::vector<Complex> out;
  out.reserve(arr.size());
  for (const auto& z : arr) out.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return out;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace

std::string spectrum_csv(const SpectrumResult& spectrum) {
  std::ostringstream out;
  out << "idx,re,im\n";
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i)
    out << i << ',' << format_double(spectrum.eigenvalues[i].real()) << ','
        << format_double(spectrum.eigenvalues[i].imag()) << '\n';
  return out.str();
}

std::string analytic_csv(const std::vector<AnalyticLevel>& levels) {
  std::ostringstream out;
  out << "idx,p,q,energy\n";
  for (std::size_t i = 0; i < levels.size(); ++i)
    out << i << ',' << levels[i].p << ',' << levels[i].q << ',' << format_double(levels[i].energy) << '\n';
  return out.str();
}

std::string phase_diagram_csv(const PhaseDiagram& diagram) {
  std::ostringstream out;
  out << "parameter,nx,ny,m0,n0,mu,jy_over_jx,gamma_th,gamma_th_over_jx,bracket_lo,bracket_hi,"
         "degenerate_zero,evaluations,reentrant_warning,error\n";
  for (const auto& point : diagram.points) {
    LatticeSpec spec = diagram.spec;
    GainLossPlacement place = diagram.placement;
    try {
      std::tie(spec, place) = sweep_point(diagram.spec, diagram.placement, diagram.axis, point.parameter);
    } catch (const Error&) {
    }
    out << format_double(point.parameter) << ',' << spec.nx << ',' << spec.ny << ',' << place.m0 << ','
        << place.n0 << ',' << format_double(relative_gain_position(spec.nx, place.m0)) << ','
        << format_double(spec.jy / spec.jx) << ',';
    if (point.result) {
      const auto& r = *point.result;
      out << format_double(r.gamma_th) << ',' << format_double(r.gamma_th / spec.jx) << ','
          << format_double(r.bracket_lo) << ',' << format_double(r.bracket_hi) << ',' << flag(r.degenerate_zero)
          << ',' << r.evaluations << ',' << flag(r.reentrant_warning) << ",\n";
    } else {
      out << ",,,,,,," << quote(point.error) << '\n';
    }
  }
  return out.str();
}

std::string plaquette_csv(const PhaseDiagram& diagram) {
  std::ostringstream out;
  out << "jy_over_jx,gamma_th_over_jx,degenerate_zero,bracket_lo,bracket_hi,error\n";
  const double jx = diagram.spec.jx;
  for (const auto& point : diagram.points) {
    out << format_double(point.parameter) << ',';
    if (point.result) {
      const auto& r = *point.result;
      out << format_double(r.gamma_th / jx) << ',' << flag(r.degenerate_zero) << ','
          << format_double(r.bracket_lo) << ',' << format_double(r.bracket_hi) << ",\n";
    } else {
      out << ",,,," << quote(point.error) << '\n';
    }
  }
  return out.str();
}

std::string flow_csv(const FlowTable& flow) {
  std::ostringstream out;
  out << "gamma,branch,re,im\n";
  for (std::size_t g = 0; g < flow.gammas.size(); ++g)
    for (std::size_t b = 0; b < flow.branches[g].size(); ++b)
      out << format_double(flow.gammas[g]) << ',' << b << ',' << format_double(flow.branches[g][b].real()) << ','
          << format_double(flow.branches[g][b].imag()) << '\n';
  return out.str();
}

std::string variational_csv(const VariationalTable& table) {
  std::ostringstream out;
  out << "p,q,gamma_var,coeff,gap\n";
  for (const auto& e : table.entries)
    out << e.p << ',' << e.q << ',' << optional_value(e.gamma_var) << ',' << format_double(e.matrix_element_coeff)
        << ',' << format_double(e.level_gap) << '\n';
  return out.str();
}

std::string kappa_csv(const VariationalTable& table) {
  std::ostringstream out;
  out << "q,kappa,kappa_vs_single_chain\n";
  for (std::size_t i = 0; i < table.kappa.size(); ++i)
    out << i + 1 << ',' << optional_value(table.kappa[i]) << ',' << optional_value(table.kappa_vs_single_chain[i])
        << '\n';
  return out.str();
}

std::string matrix_csv(const Eigen::MatrixXcd& matrix) {
  std::ostringstream out;
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << (j ? "," : "") << "re_" << j << ",im_" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      out << (j ? "," : "") << format_double(matrix(i, j).real()) << ',' << format_double(matrix(i, j).imag());
    out << '\n';
  }
  return out.str();
}

void to_json(json& j, const LatticeSpec& v) {
  j = json{{"nx", v.nx}, {"ny", v.ny}, {"jx", v.jx}, {"jy", v.jy}, {"bc_x", v.bc_x}, {"bc_y", v.bc_y}};
}

void from_json(const json& j, LatticeSpec& v) {
  j.at("nx").get_to(v.nx);
  j.at("ny").get_to(v.ny);
  j.at("jx").get_to(v.jx);
  j.at("jy").get_to(v.jy);
  v.bc_x = boundary_from_string(j.at("bc_x").get<std::string>());
  v.bc_y = boundary_from_string(j.at("bc_y").get<std::string>());
}

void to_json(json& j, const GainLossPlacement& v) { j = json{{"m0", v.m0}, {"n0", v.n0}, {"gamma", v.gamma}}; }

void from_json(const json& j, GainLossPlacement& v) {
  j.at("m0").get_to(v.m0);
  j.at("n0").get_to(v.n0);
  j.at("gamma").get_to(v.gamma);
}

void to_json(json& j, const SpectrumResult& v) {
  j = json{{"eigenvalues", complex_array(v.eigenvalues)},
           {"max_residual", v.max_residual},
           {"iterations", v.iterations},
           {"converged", v.converged},
           {"frobenius_norm", v.frobenius_norm}};
  if (v.eigenvectors) {
    json cols = json::array();
    for (Eigen::Index c = 0; c < v.eigenvectors->cols(); ++c) {
      std::vector<Complex> col(v.eigenvectors->col(c).data(), v.eigenvectors->col(c).data() + v.eigenvectors->rows());
      cols.push_back(complex_array(col));
    }
    j["eigenvectors"] = std::move(cols);
  } else {
    j["eigenvectors"] = nullptr;
  }
}

void from_json(const json& j, SpectrumResult& v) {
  v.eigenvalues = complex_vector(j.at("eigenvalues"));
  j.at("max_residual").get_to(v.max_residual);
  j.at("iterations").get_to(v.iterations);
  j.at("converged").get_to(v.converged);
  j.at("frobenius_norm").get_to(v.frobenius_norm);
  v.eigenvectors.reset();
  if (const auto& cols = j.at("eigenvectors"); !cols.is_null()) {
    const auto n = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXcd m(n == 0 ? 0 : static_cast<Eigen::Index>(cols.at(0).size()), n);
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto col = complex_vector(cols.at(static_cast<std::size_t>(c)));
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = col[static_cast<std::size_t>(r)];
    }
    v.eigenvectors = std::move(m);
  }
}

void to_json(json& j, const ThresholdResult& v) {
  j = json{{"gamma_th", v.gamma_th},
           {"bracket_lo", v.bracket_lo},
           {"bracket_hi", v.bracket_hi},
           {"abs_tol", v.abs_tol},
           {"degenerate_zero", v.degenerate_zero},
           {"evaluations", v.evaluations},
           {"reentrant_warning", v.reentrant_warning},
           {"reentrant_gammas", v.reentrant_gammas},
           {"bracket_verified", v.bracket_verified}};
}

void from_json(const json& j, ThresholdResult& v) {
  j.at("gamma_th").get_to(v.gamma_th);
  j.at("bracket_lo").get_to(v.bracket_lo);
  j.at("bracket_hi").get_to(v.bracket_hi);
  j.at("abs_tol").get_to(v.abs_tol);
  j.at("degenerate_zero").get_to(v.degenerate_zero);
  j.at("evaluations").get_to(v.evaluations);
  j.at("reentrant_warning").get_to(v.reentrant_warning);
  j.at("reentrant_gammas").get_to(v.reentrant_gammas);
  j.at("bracket_verified").get_to(v.bracket_verified);
}

void to_json(json& j, const PhasePoint& v) {
  j = json{{"parameter", v.parameter},
           {"result", optional_json(v.result)},
           {"error_kind", optional_json(v.error_kind)},
           {"error", v.error}};
}

void from_json(const json& j, PhasePoint& v) {
  j.at("parameter").get_to(v.parameter);
  v.result = optional_from<ThresholdResult>(j.at("result"));
  v.error_kind = optional_from<ErrorKind>(j.at("error_kind"));
  j.at("error").get_to(v.error);
}

void to_json(json& j, const PhaseDiagram& v) {
  j = json{{"axis", v.axis}, {"spec", v.spec}, {"placement", v.placement}, {"points", v.points}};
}

void from_json(const json& j, PhaseDiagram& v) {
  v.axis = sweep_axis_from_string(j.at("axis").get<std::string>());
  j.at("spec").get_to(v.spec);
  j.at("placement").get_to(v.placement);
  j.at("points").get_to(v.points);
}

void to_json(json& j, const ScalingCheck& v) {
  j = json{{"factor", v.factor}, {"predicted", v.predicted}, {"measured", v.measured}, {"rel_err", v.rel_err}};
}

void from_json(const json& j, ScalingCheck& v) {
  j.at("factor").get_to(v.factor);
  j.at("predicted").get_to(v.predicted);
  j.at("measured").get_to(v.measured);
  j.at("rel_err").get_to(v.rel_err);
}

void to_json(json& j, const FlowTable& v) {
  json sorted = json::array();
  json branches = json::array();
  for (const auto& s : v.sorted) sorted.push_back(complex_array(s));
  for (const auto& b : v.branches) branches.push_back(complex_array(b));
  j = json{{"gammas", v.gammas}, {"sorted", sorted}, {"branches", branches}, {"imag_tol", v.imag_tol}};
}

void from_json(const json& j, FlowTable& v) {
  j.at("gammas").get_to(v.gammas);
  v.sorted.clear();
  v.branches.clear();
  for (const auto& s : j.at("sorted")) v.sorted.push_back(complex_vector(s));
  for (const auto& b : j.at("branches")) v.branches.push_back(complex_vector(b));
  j.at("imag_tol").get_to(v.imag_tol);
}

void to_json(json& j, const VariationalEntry& v) {
  j = json{{"p", v.p},
           {"q", v.q},
           {"gamma_var", optional_json(v.gamma_var)},
           {"level_gap", v.level_gap},
           {"matrix_element_coeff", v.matrix_element_coeff}};
}

void from_json(const json& j, VariationalEntry& v) {
  j.at("p").get_to(v.p);
  j.at("q").get_to(v.q);
  v.gamma_var = optional_from<double>(j.at("gamma_var"));
  j.at("level_gap").get_to(v.level_gap);
  j.at("matrix_element_coeff").get_to(v.matrix_element_coeff);
}

namespace {

template <class T>
json optional_list(const std::vector<std::optional<T>>& values) {
  json arr = json::array();
  for (const auto& v : values) arr.push_back(optional_json(v));
  return arr;
}

template <class T>
std::vector<std::optional<T>> optional_list_from(const json& arr) {
  std::vector<std::optional<T>> out;
  for (const auto& v : arr) out.push_back(optional_from<T>(v));
  return out;
}

}  // namespace

void to_json(json& j, const VariationalTable& v) {
  j = json{{"spec", v.spec},
           {"m0", v.m0},
           {"n0", v.n0},
           {"entries", v.entries},
           {"p0", optional_json(v.p0)},
           {"q0", optional_json(v.q0)},
           {"gamma_var_min", optional_json(v.gamma_var_min)},
           {"p_opt", optional_list(v.p_opt)},
           {"kappa", optional_list(v.kappa)},
           {"kappa_vs_single_chain", optional_list(v.kappa_vs_single_chain)}};
}

void from_json(const json& j, VariationalTable& v) {
  j.at("spec").get_to(v.spec);
  j.at("m0").get_to(v.m0);
  j.at("n0").get_to(v.n0);
  j.at("entries").get_to(v.entries);
  v.p0 = optional_from<int>(j.at("p0"));
  v.q0 = optional_from<int>(j.at("q0"));
  v.gamma_var_min = optional_from<double>(j.at("gamma_var_min"));
  v.p_opt = optional_list_from<int>(j.at("p_opt"));
  v.kappa = optional_list_from<double>(j.at("kappa"));
  v.kappa_vs_single_chain = optional_list_from<double>(j.at("kappa_vs_single_chain"));
}

void to_json(json& j, const StrongCouplingReport& v) {
  j = json{{"lhs", v.lhs}, {"rhs", v.rhs}, {"satisfied", v.satisfied}, {"asymptotic_rhs", v.asymptotic_rhs}};
}

void from_json(const json& j, StrongCouplingReport& v) {
  j.at("lhs").get_to(v.lhs);
  j.at("rhs").get_to(v.rhs);
  j.at("satisfied").get_to(v.satisfied);
  j.at("asymptotic_rhs").get_to(v.asymptotic_rhs);
}

void to_json(json& j, const BreakingPairPrediction& v) {
  j = json{{"p0", v.p0},
           {"q0", v.q0},
           {"gamma_var_min", v.gamma_var_min},
           {"weak_coupling_warning", v.weak_coupling_warning}};
}

void from_json(const json& j, BreakingPairPrediction& v) {
  j.at("p0").get_to(v.p0);
  j.at("q0").get_to(v.q0);
  j.at("gamma_var_min").get_to(v.gamma_var_min);
  j.at("weak_coupling_warning").get_to(v.weak_coupling_warning);
}

void to_json(json& j, const PlaquetteConfig& v) {
  j = json{{"chain_len", v.chain_len},
           {"num_chains", v.num_chains},
           {"pt_chain_pos", v.pt_chain_pos},
           {"jx", v.jx},
           {"jy", v.jy}};
}

void from_json(const json& j, PlaquetteConfig& v) {
  j.at("chain_len").get_to(v.chain_len);
  j.at("num_chains").get_to(v.num_chains);
  v.pt_chain_pos = chain_position_from_string(j.at("pt_chain_pos").get<std::string>());
  j.at("jx").get_to(v.jx);
  j.at("jy").get_to(v.jy);
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace ptlat
