#pragma once

#include "ptlat/lattice.hpp"

#include <optional>
#include <vector>

namespace ptlat {

// Two-level estimate for the adjacent pair (p, p+1) inside band q.
struct VariationalEntry {
  int p = 1;
  int q = 1;
  // Energy units; empty when the gain/loss matrix element vanishes.
  std::optional<double> gamma_var;
  double level_gap = 0.0;
  // 2 A^2 sin(k_p m0) sin(k_{p+1} m0) sin^2(k_q n0)
  double matrix_element_coeff = 0.0;

  bool divergent() const { return !gamma_var.has_value(); }
  friend bool operator==(const VariationalEntry&, const VariationalEntry&) = default;
};

struct VariationalTable {
  LatticeSpec spec;
  int m0 = 1;
  int n0 = 1;
  // Band-major: entries[(q-1)*(nx-1) + (p-1)].
  std::vector<VariationalEntry> entries;
  // Global minimum over finite entries; ties go to the band nearest the
  // center of the stack, then smaller q, then smaller p.
  std::optional<int> p0;
  std::optional<int> q0;
  std::optional<double> gamma_var_min;
  // Per band (index q-1): minimizing p, or empty if the band is divergent.
  std::vector<std::optional<int>> p_opt;
  // gamma_var(p_opt(q), q) / gamma_var(p_opt(1), 1); kappa[0] == 1.
  std::vector<std::optional<double>> kappa;
  // gamma_var(p_opt(q), q) over the single-chain (ny = 1) optimum of the same
  // chain; its minimum over q is the closed form of kappa_analytic.
  std::vector<std::optional<double>> kappa_vs_single_chain;

  const VariationalEntry& at(int p, int q) const {
    return entries[static_cast<std::size_t>((q - 1) * (spec.nx - 1) + (p - 1))];
  }
  friend bool operator==(const VariationalTable&, const VariationalTable&) = default;
};

// Requires open boundaries along both axes.
VariationalTable variational_table(const LatticeSpec& spec, int m0, int n0);

struct KappaEstimate {
  double kappa = 0.0;
  int q_star = 1;
};

// min over q of ((ny+1)/2) cosec^2(q pi n0 / (ny+1)), skipping q where the
// sine vanishes. Ties resolve as in VariationalTable.
KappaEstimate kappa_analytic(int ny, int n0);

struct StrongCouplingReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double asymptotic_rhs = 0.0;
};

// Bands are well separated when jy/jx exceeds the ratio of the intra-band
// width to the smallest inter-band spacing.
StrongCouplingReport strong_coupling(const LatticeSpec& spec);

struct BreakingPairPrediction {
  int p0 = 1;
  int q0 = 1;
  double gamma_var_min = 0.0;
  // Bands overlap, so the two-level picture is not expected to hold.
  bool weak_coupling_warning = false;
};

BreakingPairPrediction predict_breaking_pair(const LatticeSpec& spec, int m0, int n0);

}  // namespace ptlat
