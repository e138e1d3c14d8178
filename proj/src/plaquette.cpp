#include "ptlat/plaquette.hpp"

#include "ptlat/error.hpp"
#include "ptlat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptlat {

const char* to_string(PtChainPosition pos) { return pos == PtChainPosition::Top ? "top" : "middle"; }

PtChainPosition chain_position_from_string(const std::string& name) {
  if (name == "top") return PtChainPosition::Top;
  if (name == "middle") return PtChainPosition::Middle;
  throw Error(ErrorKind::InvalidSpec, "unknown chain position '" + name + "'");
}

void PlaquetteConfig::validate() const {
  if (chain_len != 2 && chain_len != 3) throw Error(ErrorKind::InvalidSpec, "chain_len must be 2 or 3");
  if (num_chains != 2 && num_chains != 3) throw Error(ErrorKind::InvalidSpec, "num_chains must be 2 or 3");
  if (pt_chain_pos == PtChainPosition::Middle && num_chains != 3)
    throw Error(ErrorKind::InvalidSpec, "a middle PT chain needs three chains");
  lattice().validate();
}

LatticeSpec PlaquetteConfig::lattice() const {
  return LatticeSpec{chain_len, num_chains, jx, jy, Boundary::Open, Boundary::Open};
}

GainLossPlacement PlaquetteConfig::placement() const {
  return GainLossPlacement{1, pt_chain_pos == PtChainPosition::Middle ? 2 : 1, 0.0};
}

Eigen::MatrixXcd h4_matrix(double jx, double jy, double gamma) {
  Eigen::Matrix2cd sx, sz, on_a;
  sx << 0.0, 1.0, 1.0, 0.0;
  sz << 1.0, 0.0, 0.0, -1.0;
  on_a << 1.0, 0.0, 0.0, 0.0;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::MatrixXcd k(4, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) k.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
    return k;
  };
  return kron(-jx * sx, id) + kron(Complex(0.0, gamma) * sz, on_a) + kron(id, -jy * sx);
}

namespace {

Complex principal_sqrt(Complex z) {
  Complex r = std::sqrt(z);
  if (r.real() == 0.0 && r.imag() < 0.0) r = -r;
  return r;
}

}  // namespace

QuarticRoots lambda4(double jx, double jy, double gamma) {
  const double g2 = gamma * gamma;
  const double disc = g2 * g2 + 16.0 * jx * jx * jy * jy - 4.0 * g2 * jy * jy;
  const Complex inner = principal_sqrt(Complex(disc, 0.0));
  const Complex base(jx * jx + jy * jy - 0.5 * g2, 0.0);
  const Complex plus = principal_sqrt(base + 0.5 * inner);
  const Complex minus = principal_sqrt(base - 0.5 * inner);
  return QuarticRoots{{plus, -plus, minus, -minus}};
}

ThresholdResult lambda4_threshold(double jx, double jy, const SearchOptions& search) {
  auto probe = [jx, jy](double gamma) {
    BreakingIndicator out;
    const double frobenius = 2.0 * std::sqrt(jx * jx + jy * jy + gamma * gamma);
    out.imag_tol = default_imag_tol(jx, frobenius);
    for (const auto& lambda : lambda4(jx, jy, gamma).roots)
      out.max_imag = std::max(out.max_imag, std::abs(lambda.imag()));
    out.broken = out.max_imag > out.imag_tol;
    return out;
  };
  const double gamma_max = search.gamma_max.value_or(8.0 * (jx + 2.0 * jy));
  return locate_threshold(probe, jx, gamma_max, search);
}

PlaquetteResult plaquette_threshold(const PlaquetteConfig& config, const SearchOptions& search) {
  config.validate();
  PlaquetteResult out;
  out.threshold = find_threshold(config.lattice(), config.placement(), search);
  if (config.chain_len == 2 && config.num_chains == 2) {
    out.closed_form = lambda4_threshold(config.jx, config.jy, search);
    out.cross_check_ok = out.closed_form->degenerate_zero == out.threshold.degenerate_zero &&
                         std::abs(out.closed_form->gamma_th - out.threshold.gamma_th) <= 1e-6 * config.jx;
  }
  return out;
}

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;
constexpr int kMaxRefineSteps = 80;

bool is_zero(const PhasePoint& p) { return p.result && p.result->degenerate_zero; }

// Golden-section search for a zero of the threshold curve inside [a, b].
std::optional<PhasePoint> refine_minimum(const PlaquetteConfig& config, double a, double b,
                                         const SearchOptions& search) {
  auto evaluate = [&](double ratio) {
    PhasePoint point;
    point.parameter = ratio;
    PlaquetteConfig c = config;
    c.jy = ratio * config.jx;
    try {
      point.result = find_threshold(c.lattice(), c.placement(), search);
    } catch (const Error& e) {
      point.error_kind = e.kind();
      point.error = e.what();
    }
    return point;
  };
  auto value = [](const PhasePoint& p) {
    return p.result ? p.result->gamma_th : std::numeric_limits<double>::infinity();
  };

  double x1 = b - kGoldenRatio * (b - a);
  double x2 = a + kGoldenRatio * (b - a);
  PhasePoint p1 = evaluate(x1);
  PhasePoint p2 = evaluate(x2);
  for (int step = 0; step < kMaxRefineSteps; ++step) {
    if (is_zero(p1)) return p1;
    if (is_zero(p2)) return p2;
    if (b - a <= 1e-13 * std::max(1.0, std::abs(a))) break;
    if (value(p1) <= value(p2)) {
      b = x2;
      x2 = x1;
      p2 = p1;
      x1 = b - kGoldenRatio * (b - a);
      p1 = evaluate(x1);
    } else {
      a = x1;
      x1 = x2;
      p1 = p2;
      x2 = a + kGoldenRatio * (b - a);
      p2 = evaluate(x2);
    }
  }
  return std::nullopt;
}

}  // namespace

PhaseDiagram plaquette_sweep(const PlaquetteConfig& config, std::vector<double> ratios,
                             const SearchOptions& search, int threads) {
  config.validate();
  auto diagram = phase_diagram(config.lattice(), config.placement(), SweepAxis::CouplingRatio,
                               std::move(ratios), search, threads);
  auto& pts = diagram.points;

  std::vector<std::pair<double, double>> candidates;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const auto& prev = pts[i - 1];
    const auto& cur = pts[i];
    const auto& next = pts[i + 1];
    if (!prev.result || !cur.result || !next.result) continue;
    if (is_zero(prev) || is_zero(cur) || is_zero(next)) continue;
    if (cur.result->gamma_th <= prev.result->gamma_th && cur.result->gamma_th <= next.result->gamma_th)
      candidates.emplace_back(prev.parameter, next.parameter);
  }

  std::vector<std::optional<PhasePoint>> refined(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t k) {
    refined[k] = refine_minimum(config, candidates[k].first, candidates[k].second, search);
  });
  for (auto& r : refined)
    if (r) pts.push_back(std::move(*r));
  std::stable_sort(pts.begin(), pts.end(),
                   [](const PhasePoint& l, const PhasePoint& r) { return l.parameter < r.parameter; });
  return diagram;
}

std::vector<double> flagged_zeros(const PhaseDiagram& diagram) {
  std::vector<double> zeros;
  bool in_run = false;
  for (const auto& p : diagram.points) {
    if (is_zero(p)) {
      if (!in_run) zeros.push_back(p.parameter);
      in_run = true;
    } else {
      in_run = false;
    }
  }
  return zeros;
}

}  // namespace ptlat
