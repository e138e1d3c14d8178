#include "ptlat/cli.hpp"

#include "ptlat/eigensolver.hpp"
#include "ptlat/error.hpp"
#include "ptlat/io.hpp"
#include "ptlat/lattice.hpp"
#include "ptlat/plaquette.hpp"
#include "ptlat/svg.hpp"
#include "ptlat/threshold.hpp"
#include "ptlat/variational.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>

namespace ptlat {

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  int nx = 2;
  int ny = 1;
  double jx = 1.0;
  double jy = 0.0;
  double jy_over_jx = 0.0;
  std::string bc_x = "open";
  std::string bc_y = "open";
  int m0 = 1;
  int n0 = 1;
  double gamma = 0.0;

  std::string out = ".";
  std::string format = "csv";
  bool svg = false;
  int threads = 0;
  std::string config;
  bool timestamp = false;

  std::string axis = "m0";
  std::vector<double> values;
  int ny_min = 1;
  int ny_max = 1;
  int ny_step = 1;
  int n0_max = 1;
  double ratio_min = 0.0;
  double ratio_max = 3.0;
  double ratio_step = 0.02;

  double gamma_max = 2.0;
  int steps = 200;

  int chain_len = 2;
  int num_chains = 2;
  std::string pos = "top";
  double ratio = 0.0;
};

// Option handles whose presence changes behavior.
struct Seen {
  CLI::Option* jy_over_jx = nullptr;
  CLI::Option* values = nullptr;
  CLI::Option* ny_max = nullptr;
  CLI::Option* n0_max = nullptr;
  CLI::Option* ratio = nullptr;
};

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

void add_output_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "json", "both"}));
  cmd->add_flag("--svg", o.svg, "Also write SVG plots");
  cmd->add_option("--threads", o.threads, "Sweep worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--config", o.config, "key=value configuration file");
  cmd->add_flag("--timestamp", o.timestamp, "Record the wall-clock time in run.json");
}

void add_lattice_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--nx", o.nx, "Sites per chain");
  cmd->add_option("--ny", o.ny, "Number of chains");
  cmd->add_option("--jx", o.jx, "Intra-chain hopping");
  auto* jy = cmd->add_option("--jy", o.jy, "Inter-chain hopping");
  cmd->add_option("--jy-over-jx", o.jy_over_jx, "Inter-chain hopping in units of jx")->excludes(jy);
  cmd->add_option("--bc-x", o.bc_x, "Boundary along chains")->check(CLI::IsMember({"open", "periodic"}));
  cmd->add_option("--bc-y", o.bc_y, "Boundary across chains")->check(CLI::IsMember({"open", "periodic"}));
  cmd->add_option("--m0", o.m0, "Gain column");
  cmd->add_option("--n0", o.n0, "Gain/loss chain");
  cmd->add_option("--gamma", o.gamma, "Gain/loss strength");
  add_output_options(cmd, o);
}

LatticeSpec lattice_of(const Options& o, const Seen& seen) {
  LatticeSpec spec;
  spec.nx = o.nx;
  spec.ny = o.ny;
  spec.jx = o.jx;
  spec.jy = given(seen.jy_over_jx) ? o.jy_over_jx * o.jx : o.jy;
  spec.bc_x = boundary_from_string(o.bc_x);
  spec.bc_y = boundary_from_string(o.bc_y);
  spec.validate();
  return spec;
}

GainLossPlacement placement_of(const Options& o) { return GainLossPlacement{o.m0, o.n0, o.gamma}; }

std::vector<double> int_range(int lo, int hi, int step) {
  if (step <= 0) throw Error(ErrorKind::InvalidSpec, "range step must be positive");
  if (hi < lo) throw Error(ErrorKind::InvalidSpec, "range maximum is below its minimum");
  std::vector<double> out;
  for (int v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

std::vector<double> real_range(double lo, double hi, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidSpec, "range step must be positive");
  if (!(hi >= lo)) throw Error(ErrorKind::InvalidSpec, "range maximum is below its minimum");
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> out;
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Inserts --key=value pairs from the config file right after the subcommand
// tokens, so flags given on the command line (later) take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidSpec, "cannot read config file '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidSpec, path + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty() || key == "config")
      throw Error(ErrorKind::InvalidSpec, path + ":" + std::to_string(line_no) + ": invalid key");
    extra.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }

  std::size_t head = args.empty() ? 0 : 1;
  if (args.size() >= 2 && args[0] == "threshold" && args[1] == "sweep") head = 2;
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(head));
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + static_cast<long>(head), args.end());
  return out;
}

class Run {
 public:
  Run(const Options& o, std::string command, std::ostream& out, std::ostream& err)
      : o_(o), command_(std::move(command)), out_(out), err_(err) {}

  bool want_csv() const { return o_.format != "json"; }
  bool want_json() const { return o_.format != "csv"; }

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  void finish(int exit_code, const json& config) {
    json meta = {{"program", "ptlat"},
                 {"version", kVersion},
                 {"command", command_},
                 {"config", config},
                 {"exit_code", exit_code}};
    json names = json::array();
    for (const auto& f : files_) names.push_back(f.first);
    meta["outputs"] = names;
    if (o_.timestamp) meta["timestamp"] = utc_now();
    add("run.json", meta.dump(2) + "\n");
    for (const auto& [name, content] : files_)
      write_text_file((std::filesystem::path(o_.out) / name).string(), content);
  }

 private:
  const Options& o_;
  std::string command_;
  std::ostream& out_;
  std::ostream& err_;
  std::vector<std::pair<std::string, std::string>> files_;
};

json lattice_config(const LatticeSpec& spec, const GainLossPlacement& place) {
  return json{{"lattice", spec}, {"placement", place}};
}

int cmd_spectrum(const Options& o, const Seen& seen, Run& run, json& config) {
  const auto spec = lattice_of(o, seen);
  const auto place = placement_of(o);
  place.validate(spec);
  config = lattice_config(spec, place);
  const auto h = build_hamiltonian(spec, place);
  const auto res = eigenvalues(h);
  if (!res.converged)
    throw Error(ErrorKind::NoConvergence, "eigenvalue iteration did not converge at gamma = " +
                                              format_double(place.gamma) + " for a " + std::to_string(h.dim()) +
                                              "x" + std::to_string(h.dim()) + " matrix");
  if (run.want_csv()) run.add("spectrum.csv", spectrum_csv(res));
  if (run.want_json()) run.add("spectrum.json", json(res).dump(2) + "\n");
  if (spec.bc_x == Boundary::Open && spec.bc_y == Boundary::Open && place.gamma == 0.0) {
    const auto levels = analytic_spectrum(spec);
    if (run.want_csv()) run.add("analytic.csv", analytic_csv(levels));
    if (run.want_json()) {
      json arr = json::array();
      for (const auto& l : levels) arr.push_back({{"p", l.p}, {"q", l.q}, {"energy", l.energy}});
      run.add("analytic.json", arr.dump(2) + "\n");
    }
  }
  double max_imag = 0.0;
  for (const auto& z : res.eigenvalues) max_imag = std::max(max_imag, std::abs(z.imag()));
  run.out() << res.eigenvalues.size() << " eigenvalues, max |Im| = " << format_double(max_imag)
            << ", residual = " << format_double(res.max_residual) << '\n';
  return kExitOk;
}

int cmd_threshold(const Options& o, const Seen& seen, Run& run, json& config) {
  const auto spec = lattice_of(o, seen);
  const auto place = placement_of(o);
  place.validate(spec);
  config = lattice_config(spec, place);
  const auto r = find_threshold(spec, place);
  run.add("threshold.json", json(r).dump(2) + "\n");
  run.out() << "gamma_th = " << format_double(r.gamma_th) << " (gamma_th/jx = " << format_double(r.gamma_th / spec.jx)
            << ")" << (r.degenerate_zero ? " [zero threshold]" : "") << '\n';
  if (r.reentrant_warning) run.err() << "warning: broken spectrum found below the reported threshold\n";
  return kExitOk;
}

std::vector<double> sweep_values(const Options& o, const Seen& seen, const LatticeSpec& spec, SweepAxis axis) {
  if (given(seen.values)) return o.values;
  switch (axis) {
    case SweepAxis::GainColumn: return int_range(1, spec.nx / 2, 1);
    case SweepAxis::ChainIndex: return int_range(1, given(seen.n0_max) ? o.n0_max : spec.ny, 1);
    case SweepAxis::NumChains: return int_range(o.ny_min, given(seen.ny_max) ? o.ny_max : spec.ny, o.ny_step);
    case SweepAxis::CouplingRatio: return real_range(o.ratio_min, o.ratio_max, o.ratio_step);
  }
  return {};
}

json linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return json{{"slope", nullptr}, {"intercept", nullptr}};
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return json{{"slope", nullptr}, {"intercept", nullptr}};
  const double slope = (n * sxy - sx * sy) / den;
  return json{{"slope", slope}, {"intercept", (sy - slope * sx) / n}};
}

int cmd_sweep(const Options& o, const Seen& seen, Run& run, json& config) {
  const auto spec = lattice_of(o, seen);
  auto place = placement_of(o);
  const auto axis = sweep_axis_from_string(o.axis);
  const auto values = sweep_values(o, seen, spec, axis);
  if (values.empty()) throw Error(ErrorKind::InvalidSpec, "empty sweep");
  config = lattice_config(spec, place);
  config["axis"] = to_string(axis);
  config["values"] = values;

  const auto diagram = phase_diagram(spec, place, axis, values, {}, o.threads);
  if (run.want_csv()) run.add("phase_diagram.csv", phase_diagram_csv(diagram));
  if (run.want_json()) run.add("phase_diagram.json", json(diagram).dump(2) + "\n");

  std::vector<double> xs, ys;
  for (const auto& p : diagram.points) {
    if (!p.result) continue;
    xs.push_back(p.parameter);
    ys.push_back(p.result->gamma_th / spec.jx);
  }
  json summary = {{"axis", to_string(axis)},
                  {"points", diagram.points.size()},
                  {"failures", diagram.failures()},
                  {"fit", linear_fit(xs, ys)}};
  if (!ys.empty()) {
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    summary["min"] = {{"parameter", xs[static_cast<std::size_t>(lo - ys.begin())]}, {"gamma_th_over_jx", *lo}};
    summary["max"] = {{"parameter", xs[static_cast<std::size_t>(hi - ys.begin())]}, {"gamma_th_over_jx", *hi}};
  }
  run.add("sweep_summary.json", summary.dump(2) + "\n");
  if (o.svg) {
    LinePlot plot{"PT threshold", std::string("sweep parameter ") + to_string(axis), "gamma_th / Jx",
                  {PlotSeries{"gamma_th/Jx", xs, ys, false}}};
    run.add("phase_diagram.svg", render_svg(plot));
  }

  for (const auto& p : diagram.points) {
    run.out() << to_string(axis) << " = " << format_double(p.parameter) << ": ";
    if (p.result)
      run.out() << "gamma_th/jx = " << format_double(p.result->gamma_th / spec.jx) << '\n';
    else
      run.out() << "error: " << p.error << '\n';
  }
  if (diagram.failures() > 0) {
    run.err() << diagram.failures() << " of " << diagram.points.size() << " sweep points failed\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_flow(const Options& o, const Seen& seen, Run& run, json& config) {
  const auto spec = lattice_of(o, seen);
  const auto place = placement_of(o);
  place.validate(spec);
  if (o.steps < 1) throw Error(ErrorKind::InvalidSpec, "steps must be at least 1");
  if (!(o.gamma_max > 0.0) || !std::isfinite(o.gamma_max))
    throw Error(ErrorKind::InvalidSpec, "gamma-max must be positive");
  std::vector<double> gammas;
  for (int i = 0; i <= o.steps; ++i) gammas.push_back(o.gamma_max * i / o.steps);
  config = lattice_config(spec, place);
  config["gamma_max"] = o.gamma_max;
  config["steps"] = o.steps;

  const auto flow = eigenvalue_flow(spec, place, gammas);
  if (run.want_csv()) run.add("flow.csv", flow_csv(flow));
  if (run.want_json()) run.add("flow.json", json(flow).dump(2) + "\n");
  if (o.svg) {
    LinePlot re{"Eigenvalue flow", "gamma / Jx", "Re E / Jx", {}};
    LinePlot im{"Eigenvalue flow", "gamma / Jx", "Im E / Jx", {}};
    const std::size_t nb = flow.branches.empty() ? 0 : flow.branches.front().size();
    for (std::size_t b = 0; b < nb; ++b) {
      PlotSeries sr{"", {}, {}, false}, si{"", {}, {}, false};
      for (std::size_t g = 0; g < gammas.size(); ++g) {
        sr.x.push_back(gammas[g] / spec.jx);
        si.x.push_back(gammas[g] / spec.jx);
        sr.y.push_back(flow.branches[g][b].real() / spec.jx);
        si.y.push_back(flow.branches[g][b].imag() / spec.jx);
      }
      re.series.push_back(std::move(sr));
      im.series.push_back(std::move(si));
    }
    run.add("flow.svg", render_svg(re));
    run.add("flow_imag.svg", render_svg(im));
  }
  if (const auto br = flow.first_breaking()) {
    run.out() << "first broken grid point gamma = " << format_double(gammas[br->gamma_index]) << ", branches";
    for (auto b : br->branches) run.out() << ' ' << b;
    run.out() << '\n';
  } else {
    run.out() << "spectrum real on the whole grid\n";
  }
  return kExitOk;
}

int cmd_variational(const Options& o, const Seen& seen, Run& run, json& config) {
  const auto spec = lattice_of(o, seen);
  config = lattice_config(spec, placement_of(o));
  const auto table = variational_table(spec, o.m0, o.n0);
  if (run.want_csv()) {
    run.add("variational.csv", variational_csv(table));
    run.add("kappa.csv", kappa_csv(table));
  }
  if (run.want_json()) run.add("variational.json", json(table).dump(2) + "\n");
  if (o.svg) {
    LinePlot plot{"Variational threshold", "level p", "gamma_var / Jx", {}};
    for (int q = 1; q <= spec.ny; ++q) {
      PlotSeries s{"q = " + std::to_string(q), {}, {}, false};
      for (int p = 1; p < spec.nx; ++p) {
        s.x.push_back(p);
        const auto& g = table.at(p, q).gamma_var;
        s.y.push_back(g ? *g / spec.jx : std::numeric_limits<double>::quiet_NaN());
      }
      plot.series.push_back(std::move(s));
    }
    run.add("variational.svg", render_svg(plot));
  }

  const auto sc = strong_coupling(spec);
  const auto ka = kappa_analytic(spec.ny, o.n0);
  json optimum = {{"p0", nullptr},
                  {"q0", nullptr},
                  {"gamma_var_min", nullptr},
                  {"gamma_var_min_over_jx", nullptr},
                  {"weak_coupling_warning", nullptr},
                  {"strong_coupling", sc},
                  {"kappa_analytic", {{"kappa", ka.kappa}, {"q_star", ka.q_star}}}};
  int code = kExitOk;
  try {
    const auto pred = predict_breaking_pair(spec, o.m0, o.n0);
    optimum["p0"] = pred.p0;
    optimum["q0"] = pred.q0;
    optimum["gamma_var_min"] = pred.gamma_var_min;
    optimum["gamma_var_min_over_jx"] = pred.gamma_var_min / spec.jx;
    optimum["weak_coupling_warning"] = pred.weak_coupling_warning;
    run.out() << "optimum (p, q) = (" << pred.p0 << ", " << pred.q0
              << "), gamma_var/jx = " << format_double(pred.gamma_var_min / spec.jx) << '\n';
    if (pred.weak_coupling_warning) run.err() << "warning: bands overlap, two-level estimate unreliable\n";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllDivergent) throw;
    run.err() << "error: " << e.what() << '\n';
    code = kExitNumeric;
  }
  run.add("optimum.json", optimum.dump(2) + "\n");
  return code;
}

int cmd_plaquette(const Options& o, const Seen& seen, Run& run, json& config) {
  PlaquetteConfig pc;
  pc.chain_len = o.chain_len;
  pc.num_chains = o.num_chains;
  pc.pt_chain_pos = chain_position_from_string(o.pos);
  pc.jx = o.jx;
  pc.jy = given(seen.ratio) ? o.ratio * o.jx : o.ratio_min * o.jx;
  pc.validate();
  config = json{{"plaquette", pc}};

  json header = {{"config", pc}};
  PhaseDiagram diagram;
  int code = kExitOk;
  if (given(seen.ratio)) {
    config["ratio"] = o.ratio;
    const auto r = plaquette_threshold(pc);
    diagram.axis = SweepAxis::CouplingRatio;
    diagram.spec = pc.lattice();
    diagram.placement = pc.placement();
    diagram.points.push_back(PhasePoint{o.ratio, r.threshold, std::nullopt, ""});
    header["result"] = r.threshold;
    header["gamma_th_over_jx"] = r.threshold.gamma_th / pc.jx;
    header["closed_form"] = r.closed_form ? json(*r.closed_form) : json(nullptr);
    header["cross_check_ok"] = r.cross_check_ok;
    run.out() << "gamma_th/jx = " << format_double(r.threshold.gamma_th / pc.jx)
              << (r.threshold.degenerate_zero ? " [zero threshold]" : "") << '\n';
    if (!r.cross_check_ok) run.err() << "warning: closed-form cross-check disagrees\n";
  } else {
    const auto ratios = real_range(o.ratio_min, o.ratio_max, o.ratio_step);
    config["ratios"] = {{"min", o.ratio_min}, {"max", o.ratio_max}, {"step", o.ratio_step}};
    diagram = plaquette_sweep(pc, ratios, {}, o.threads);
    header["zeros"] = flagged_zeros(diagram);
    const PhasePoint* best = nullptr;
    for (const auto& p : diagram.points)
      if (p.result && (!best || p.result->gamma_th > best->result->gamma_th)) best = &p;
    if (best)
      header["maximum"] = {{"jy_over_jx", best->parameter}, {"gamma_th_over_jx", best->result->gamma_th / pc.jx}};
    header["failures"] = diagram.failures();
    run.out() << diagram.points.size() << " points, zeros at";
    for (double z : flagged_zeros(diagram)) run.out() << ' ' << format_double(z);
    run.out() << '\n';
    if (diagram.failures() > 0) {
      run.err() << diagram.failures() << " of " << diagram.points.size() << " sweep points failed\n";
      code = kExitPartial;
    }
  }
  if (run.want_csv()) run.add("plaquette_sweep.csv", plaquette_csv(diagram));
  if (run.want_json()) header["points"] = diagram.points;
  run.add("plaquette.json", header.dump(2) + "\n");
  if (o.svg) {
    PlotSeries s{"gamma_th/Jx", {}, {}, false};
    for (const auto& p : diagram.points) {
      s.x.push_back(p.parameter);
      s.y.push_back(p.result ? p.result->gamma_th / pc.jx : std::numeric_limits<double>::quiet_NaN());
    }
    run.add("plaquette_sweep.svg", render_svg(LinePlot{"Plaquette threshold", "Jy / Jx", "gamma_th / Jx", {s}}));
  }
  return code;
}

int cmd_dump_matrix(const Options& o, const Seen& seen, Run& run, json& config) {
  const auto spec = lattice_of(o, seen);
  const auto place = placement_of(o);
  place.validate(spec);
  config = lattice_config(spec, place);
  const auto h = build_hamiltonian(spec, place);
  run.add("matrix.csv", matrix_csv(h.entries));
  run.out() << h.dim() << "x" << h.dim() << " matrix\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"PT-symmetric tight-binding lattices: spectra and symmetry-breaking thresholds", "ptlat"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* spectrum = app.add_subcommand("spectrum", "Complex spectrum of one lattice");
  add_lattice_options(spectrum, o);

  auto* threshold = app.add_subcommand("threshold", "Symmetry-breaking threshold");
  add_lattice_options(threshold, o);
  threshold->require_subcommand(0, 1);
  auto* sweep = threshold->add_subcommand("sweep", "Threshold against one parameter");
  add_lattice_options(sweep, o);
  sweep->add_option("--axis", o.axis, "Swept parameter")->check(CLI::IsMember({"m0", "n0", "ny", "ratio"}));
  sweep->add_option("--values", o.values, "Explicit comma-separated values")->delimiter(',');
  sweep->add_option("--ny-min", o.ny_min, "First chain count");
  sweep->add_option("--ny-max", o.ny_max, "Last chain count");
  sweep->add_option("--ny-step", o.ny_step, "Chain count step");
  sweep->add_option("--n0-max", o.n0_max, "Last chain index");
  sweep->add_option("--ratio-min", o.ratio_min, "First jy/jx");
  sweep->add_option("--ratio-max", o.ratio_max, "Last jy/jx");
  sweep->add_option("--ratio-step", o.ratio_step, "jy/jx step");

  auto* flow = app.add_subcommand("flow", "Eigenvalues tracked against gamma");
  add_lattice_options(flow, o);
  flow->add_option("--gamma-max", o.gamma_max, "Largest gamma");
  flow->add_option("--steps", o.steps, "Grid intervals");

  auto* variational = app.add_subcommand("variational", "Two-level threshold estimates");
  add_lattice_options(variational, o);

  auto* plaquette = app.add_subcommand("plaquette", "PT dimer/trimer coupled to neutral copies");
  plaquette->add_option("--chain-len", o.chain_len, "Sites per chain (2 or 3)");
  plaquette->add_option("--num-chains", o.num_chains, "Chains (2 or 3)");
  plaquette->add_option("--pos", o.pos, "PT chain position")->check(CLI::IsMember({"top", "middle"}));
  plaquette->add_option("--jx", o.jx, "Intra-chain hopping");
  plaquette->add_option("--ratio", o.ratio, "Single jy/jx");
  plaquette->add_option("--ratio-min", o.ratio_min, "First jy/jx");
  plaquette->add_option("--ratio-max", o.ratio_max, "Last jy/jx");
  plaquette->add_option("--ratio-step", o.ratio_step, "jy/jx step");
  add_output_options(plaquette, o);

  auto* dump = app.add_subcommand("dump-matrix", "Write the Hamiltonian as CSV");
  add_lattice_options(dump, o);

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  using Handler = int (*)(const Options&, const Seen&, Run&, json&);
  Handler handler = nullptr;
  std::string name;
  CLI::App* active = nullptr;
  if (spectrum->parsed()) handler = cmd_spectrum, name = "spectrum", active = spectrum;
  else if (sweep->parsed()) handler = cmd_sweep, name = "threshold sweep", active = sweep;
  else if (threshold->parsed()) handler = cmd_threshold, name = "threshold", active = threshold;
  else if (flow->parsed()) handler = cmd_flow, name = "flow", active = flow;
  else if (variational->parsed()) handler = cmd_variational, name = "variational", active = variational;
  else if (plaquette->parsed()) handler = cmd_plaquette, name = "plaquette", active = plaquette;
  else handler = cmd_dump_matrix, name = "dump-matrix", active = dump;

  Seen seen;
  seen.jy_over_jx = active->get_option_no_throw("--jy-over-jx");
  seen.values = active->get_option_no_throw("--values");
  seen.ny_max = active->get_option_no_throw("--ny-max");
  seen.n0_max = active->get_option_no_throw("--n0-max");
  seen.ratio = active->get_option_no_throw("--ratio");

  Run run(o, name, out, err);
  json config = json::object();
  int code = kExitOk;
  try {
    code = handler(o, seen, run, config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.is_usage_error()) return kExitUsage;
    code = kExitNumeric;
  }
  try {
    run.finish(code, config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return code;
}

}  // namespace ptlat
