#include "ptlat/variational.hpp"

#include "ptlat/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ptlat {

namespace {

constexpr double kDivergenceCutoff = 1e-12;
constexpr double kTieTolerance = 1e-12;

bool strictly_better(double candidate, double incumbent) {
  return candidate < incumbent * (1.0 - kTieTolerance);
}

bool tied(double a, double b) { return !strictly_better(a, b) && !strictly_better(b, a); }

// Among tied bands the one nearest the middle of the band stack wins, then the
// smaller q (callers scan q upwards).
bool closer_to_center(int q, int incumbent, int ny) {
  return std::abs(2 * q - (ny + 1)) < std::abs(2 * incumbent - (ny + 1));
}

struct BandData {
  std::vector<VariationalEntry> entries;
  std::vector<std::optional<int>> p_opt;
};

BandData compute_bands(const LatticeSpec& spec, int m0, int n0) {
  const double pi = std::numbers::pi;
  const double a2 = 4.0 / (static_cast<double>(spec.nx + 1) * static_cast<double>(spec.ny + 1));
  auto kp = [&](int p) { return p * pi / (spec.nx + 1); };

  BandData out;
  out.entries.reserve(static_cast<std::size_t>((spec.nx - 1) * spec.ny));
  out.p_opt.assign(static_cast<std::size_t>(spec.ny), std::nullopt);
  for (int q = 1; q <= spec.ny; ++q) {
    const double kq = q * pi / (spec.ny + 1);
    const double band_weight = std::sin(kq * n0) * std::sin(kq * n0);
    std::optional<double> best;
    for (int p = 1; p < spec.nx; ++p) {
      VariationalEntry e;
      e.p = p;
      e.q = q;
      // The band offset -2 jy cos(k_q) cancels in the gap.
      e.level_gap = std::abs(2.0 * spec.jx * (std::cos(kp(p + 1)) - std::cos(kp(p))));
      e.matrix_element_coeff = 2.0 * a2 * std::sin(kp(p) * m0) * std::sin(kp(p + 1) * m0) * band_weight;
      if (std::abs(e.matrix_element_coeff) >= kDivergenceCutoff * a2)
        e.gamma_var = e.level_gap / (2.0 * std::abs(e.matrix_element_coeff));
      if (e.gamma_var && (!best || strictly_better(*e.gamma_var, *best))) {
        best = e.gamma_var;
        out.p_opt[static_cast<std::size_t>(q - 1)] = p;
      }
      out.entries.push_back(e);
    }
  }
  return out;
}

void require_open(const LatticeSpec& spec) {
  if (spec.bc_x != Boundary::Open || spec.bc_y != Boundary::Open)
    throw Error(ErrorKind::UnsupportedBoundary, "variational estimate assumes open boundaries");
}

}  // namespace

VariationalTable variational_table(const LatticeSpec& spec, int m0, int n0) {
  spec.validate();
  require_open(spec);
  GainLossPlacement{m0, n0, 0.0}.validate(spec);

  VariationalTable table;
  table.spec = spec;
  table.m0 = m0;
  table.n0 = n0;
  auto bands = compute_bands(spec, m0, n0);
  table.entries = std::move(bands.entries);
  table.p_opt = std::move(bands.p_opt);

  for (int q = 1; q <= spec.ny; ++q) {
    const auto& p = table.p_opt[static_cast<std::size_t>(q - 1)];
    if (!p) continue;
    const double value = *table.at(*p, q).gamma_var;
    if (!table.gamma_var_min || strictly_better(value, *table.gamma_var_min) ||
        (tied(value, *table.gamma_var_min) && closer_to_center(q, *table.q0, spec.ny))) {
      table.gamma_var_min = value;
      table.p0 = *p;
      table.q0 = q;
    }
  }

  LatticeSpec single = spec;
  single.ny = 1;
  const auto single_bands = compute_bands(single, m0, 1);
  std::optional<double> single_best;
  if (const auto& p = single_bands.p_opt.front())
    single_best = single_bands.entries[static_cast<std::size_t>(*p - 1)].gamma_var;

  const auto& first = table.p_opt.front();
  const double band_one = first ? *table.at(*first, 1).gamma_var : 0.0;
  for (int q = 1; q <= spec.ny; ++q) {
    const auto& p = table.p_opt[static_cast<std::size_t>(q - 1)];
    std::optional<double> ratio, vs_single;
    if (p) {
      const double value = *table.at(*p, q).gamma_var;
      if (first) ratio = value / band_one;
      if (single_best) vs_single = value / *single_best;
    }
    table.kappa.push_back(ratio);
    table.kappa_vs_single_chain.push_back(vs_single);
  }
  return table;
}

KappaEstimate kappa_analytic(int ny, int n0) {
  if (ny < 1 || n0 < 1 || n0 > ny) throw Error(ErrorKind::IndexOutOfRange, "need 1 <= n0 <= ny");
  KappaEstimate best{std::numeric_limits<double>::infinity(), 0};
  for (int q = 1; q <= ny; ++q) {
    const double s = std::sin(q * std::numbers::pi * n0 / (ny + 1));
    if (std::abs(s) < kDivergenceCutoff) continue;
    const double value = 0.5 * (ny + 1) / (s * s);
    if (best.q_star == 0 || strictly_better(value, best.kappa) ||
        (tied(value, best.kappa) && closer_to_center(q, best.q_star, ny)))
      best = {value, q};
  }
  return best;
}

StrongCouplingReport strong_coupling(const LatticeSpec& spec) {
  const double pi = std::numbers::pi;
  const double nx1 = spec.nx + 1;
  const double ny1 = spec.ny + 1;
  StrongCouplingReport report;
  report.lhs = spec.jy / spec.jx;
  report.rhs = (std::cos(pi / nx1) - std::cos(spec.nx * pi / nx1)) /
               (std::cos(pi / ny1) - std::cos(2.0 * pi / ny1));
  report.satisfied = report.lhs > report.rhs;
  report.asymptotic_rhs = 4.0 * spec.ny * spec.ny / (3.0 * pi * pi);
  return report;
}

BreakingPairPrediction predict_breaking_pair(const LatticeSpec& spec, int m0, int n0) {
  const auto table = variational_table(spec, m0, n0);
  if (!table.gamma_var_min)
    throw Error(ErrorKind::AllDivergent, "every adjacent-level matrix element vanishes");
  BreakingPairPrediction out;
  out.p0 = *table.p0;
  out.q0 = *table.q0;
  out.gamma_var_min = *table.gamma_var_min;
  out.weak_coupling_warning = spec.ny >= 2 && !strong_coupling(spec).satisfied;
  return out;
}

}  // namespace ptlat
