#include "ptlat/threshold.hpp"

#include "ptlat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ptlat {

double default_imag_tol(double jx, double frobenius_norm) {
  return std::max(1e-8 * jx, 1e4 * std::numeric_limits<double>::epsilon() * frobenius_norm);
}

BreakingIndicator classify(const SpectrumResult& spectrum, double imag_tol) {
  if (!spectrum.converged)
    throw Error(ErrorKind::UnconvergedSpectrum, "cannot classify an unconverged spectrum");
  BreakingIndicator out;
  out.imag_tol = imag_tol;
  for (const auto& lambda : spectrum.eigenvalues) out.max_imag = std::max(out.max_imag, std::abs(lambda.imag()));
  out.broken = out.max_imag > imag_tol;
  return out;
}

ThresholdResult locate_threshold(const BreakingProbe& probe, double scale, double gamma_max,
                                 const SearchOptions& search) {
  ThresholdResult result;
  result.abs_tol = search.abs_tol_factor * scale;
  auto broken_at = [&](double gamma) {
    ++result.evaluations;
    return probe(gamma).broken;
  };

  const double probe_min = search.probe_min_factor * scale;
  double lo = 0.0;
  double hi = probe_min;
  bool found = false;
  for (double gamma = probe_min;; gamma *= 2.0) {
    const double g = std::min(gamma, gamma_max);
    if (broken_at(g)) {
      hi = g;
      found = true;
      break;
    }
    lo = g;
    if (g >= gamma_max) break;
  }
  if (!found) {
    std::ostringstream msg;
    msg << "spectrum still unbroken at gamma_max = " << gamma_max;
    throw Error(ErrorKind::NoBreakingFound, msg.str());
  }

  if (lo == 0.0) {
    result.degenerate_zero = true;
    result.bracket_lo = 0.0;
    result.bracket_hi = hi;
    result.gamma_th = 0.0;
    result.bracket_verified = true;
    return result;
  }

  while (hi - lo > result.abs_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (broken_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.gamma_th = 0.5 * (lo + hi);

  for (int k = 1; k <= search.audit_points; ++k) {
    const double gamma = lo * k / (search.audit_points + 1);
    if (broken_at(gamma)) {
      result.reentrant_warning = true;
      result.reentrant_gammas.push_back(gamma);
    }
  }
  if (search.verify_bracket) result.bracket_verified = !broken_at(lo) && broken_at(hi);
  return result;
}

double default_gamma_max(const LatticeSpec& spec) { return 8.0 * (spec.jx + spec.jy * spec.ny); }

BreakingProbe lattice_probe(const LatticeSpec& spec, const GainLossPlacement& placement,
                            const SearchOptions& search) {
  return [spec, placement, search](double gamma) {
    GainLossPlacement at = placement;
    at.gamma = gamma;
    const auto h = build_hamiltonian(spec, at, search.side);
    const auto spectrum = eigenvalues(h, search.eig);
    if (!spectrum.converged) {
      std::ostringstream msg;
      msg << "eigensolver failed at gamma = " << gamma << " for a " << h.dim() << "x" << h.dim()
          << " matrix (" << spectrum.iterations << " sweeps, residual " << spectrum.max_residual << ")";
      throw Error(ErrorKind::NoConvergence, msg.str());
    }
    return classify(spectrum, default_imag_tol(spec.jx, spectrum.frobenius_norm));
  };
}

ThresholdResult find_threshold(const LatticeSpec& spec, const GainLossPlacement& placement,
                               const SearchOptions& search) {
  spec.validate();
  GainLossPlacement tmpl = placement;
  tmpl.gamma = 0.0;
  tmpl.validate(spec);
  const double gamma_max = search.gamma_max.value_or(default_gamma_max(spec));
  return locate_threshold(lattice_probe(spec, tmpl, search), spec.jx, gamma_max, search);
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::GainColumn: return "m0";
    case SweepAxis::ChainIndex: return "n0";
    case SweepAxis::NumChains: return "ny";
    case SweepAxis::CouplingRatio: return "ratio";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "m0") return SweepAxis::GainColumn;
  if (name == "n0") return SweepAxis::ChainIndex;
  if (name == "ny") return SweepAxis::NumChains;
  if (name == "ratio") return SweepAxis::CouplingRatio;
  throw Error(ErrorKind::InvalidSpec, "unknown sweep axis '" + name + "'");
}

std::size_t PhaseDiagram::failures() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const PhasePoint& p) { return !p.result; }));
}

std::pair<LatticeSpec, GainLossPlacement> sweep_point(const LatticeSpec& spec,
                                                      const GainLossPlacement& placement,
                                                      SweepAxis axis, double value) {
  LatticeSpec s = spec;
  GainLossPlacement p = placement;
  const auto as_index = [&]() {
    const double rounded = std::round(value);
    if (std::abs(rounded - value) > 1e-9)
      throw Error(ErrorKind::InvalidSpec, "sweep value must be an integer on this axis");
    return static_cast<int>(rounded);
  };
  switch (axis) {
    case SweepAxis::GainColumn: p.m0 = as_index(); break;
    case SweepAxis::ChainIndex: p.n0 = as_index(); break;
    case SweepAxis::NumChains: s.ny = as_index(); break;
    case SweepAxis::CouplingRatio: s.jy = value * s.jx; break;
  }
  return {s, p};
}

PhaseDiagram phase_diagram(const LatticeSpec& spec, const GainLossPlacement& placement, SweepAxis axis,
                           std::vector<double> values, const SearchOptions& search, int threads) {
  std::stable_sort(values.begin(), values.end());
  PhaseDiagram diagram;
  diagram.axis = axis;
  diagram.spec = spec;
  diagram.placement = placement;
  diagram.placement.gamma = 0.0;
  diagram.points.resize(values.size());

  parallel_for(values.size(), threads, [&](std::size_t i) {
    PhasePoint& point = diagram.points[i];
    point.parameter = values[i];
    try {
      const auto [s, p] = sweep_point(spec, placement, axis, values[i]);
      point.result = find_threshold(s, p, search);
    } catch (const Error& e) {
      point.error_kind = e.kind();
      point.error = e.what();
    }
  });
  return diagram;
}

ScalingCheck scaling_law_check(const ThresholdResult& base, const ThresholdResult& multi, int ny,
                               Boundary bc_y) {
  if (base.degenerate_zero || multi.degenerate_zero || !(base.gamma_th > 0.0))
    throw Error(ErrorKind::DegenerateInput, "scaling check needs two nonzero thresholds");
  if (ny < 1) throw Error(ErrorKind::DegenerateInput, "ny must be positive");
  ScalingCheck check;
  check.factor = bc_y == Boundary::Open ? 0.5 * (ny + 1) : 0.5 * ny;
  check.predicted = check.factor * base.gamma_th;
  check.measured = multi.gamma_th;
  check.rel_err = std::abs(check.measured - check.predicted) / check.predicted;
  return check;
}

std::vector<std::size_t> match_nearest(const std::vector<Complex>& previous,
                                       const std::vector<Complex>& current) {
  // Hungarian algorithm with potentials, 1-based internally.
  const std::size_t n = previous.size();
  if (current.size() != n) throw Error(ErrorKind::InvalidSpec, "spectra of different sizes");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  auto cost = [&](std::size_t i, std::size_t j) { return std::abs(previous[i - 1] - current[j - 1]); };
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

FlowTable eigenvalue_flow(const LatticeSpec& spec, const GainLossPlacement& placement,
                          const std::vector<double>& gammas, const EigOptions& eig) {
  if (gammas.empty()) throw Error(ErrorKind::InvalidSpec, "empty gamma grid");
  if (!std::is_sorted(gammas.begin(), gammas.end()))
    throw Error(ErrorKind::InvalidSpec, "gamma grid must be ascending");
  FlowTable flow;
  flow.gammas = gammas;
  for (const double gamma : gammas) {
    GainLossPlacement at = placement;
    at.gamma = gamma;
    const auto h = build_hamiltonian(spec, at);
    auto spectrum = eigenvalues(h, eig);
    if (!spectrum.converged) {
      std::ostringstream msg;
      msg << "eigensolver failed at gamma = " << gamma << " for a " << h.dim() << "x" << h.dim()
          << " matrix";
      throw Error(ErrorKind::NoConvergence, msg.str());
    }
    flow.imag_tol.push_back(default_imag_tol(spec.jx, spectrum.frobenius_norm));
    if (flow.branches.empty()) {
      flow.branches.push_back(spectrum.eigenvalues);
    } else {
      const auto& prev = flow.branches.back();
      const auto assignment = match_nearest(prev, spectrum.eigenvalues);
      std::vector<Complex> next(prev.size());
      for (std::size_t b = 0; b < prev.size(); ++b) next[b] = spectrum.eigenvalues[assignment[b]];
      flow.branches.push_back(std::move(next));
    }
    flow.sorted.push_back(std::move(spectrum.eigenvalues));
  }
  return flow;
}

std::optional<FlowTable::Breaking> FlowTable::first_breaking() const {
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    Breaking out;
    out.gamma_index = g;
    for (std::size_t b = 0; b < branches[g].size(); ++b)
      if (std::abs(branches[g][b].imag()) > imag_tol[g]) out.branches.push_back(b);
    if (!out.branches.empty()) return out;
  }
  return std::nullopt;
}

}  // namespace ptlat
