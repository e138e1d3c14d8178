#pragma once

#include "ptlat/eigensolver.hpp"
#include "ptlat/error.hpp"
#include "ptlat/lattice.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ptlat {

struct BreakingIndicator {
  double max_imag = 0.0;
  bool broken = false;
  double imag_tol = 0.0;
};

// max(1e-8 jx, 1e4 eps ||H||_F)
double default_imag_tol(double jx, double frobenius_norm);

BreakingIndicator classify(const SpectrumResult& spectrum, double imag_tol);

struct SearchOptions {
  // Probing starts at probe_min_factor * jx and doubles.
  double probe_min_factor = 1e-4;
  double abs_tol_factor = 1e-6;
  // Defaults to 8 (jx + jy ny).
  std::optional<double> gamma_max;
  int audit_points = 8;
  bool verify_bracket = true;
  GainSide side = GainSide::AtM0;
  EigOptions eig;
};

struct ThresholdResult {
  double gamma_th = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double abs_tol = 0.0;
  // Broken already at the smallest probe.
  bool degenerate_zero = false;
  int evaluations = 0;
  // Set when a probe below gamma_th came out broken.
  bool reentrant_warning = false;
  std::vector<double> reentrant_gammas;
  // Post-hoc re-solve at both bracket ends agreed with the bisection.
  bool bracket_verified = false;

  friend bool operator==(const ThresholdResult&, const ThresholdResult&) = default;
};

// Classification of the spectrum at a given gain/loss strength.
using BreakingProbe = std::function<BreakingIndicator(double gamma)>;

// Geometric bracketing followed by bisection on an arbitrary probe. `scale`
// is the energy unit (jx) that the relative tolerances refer to.
ThresholdResult locate_threshold(const BreakingProbe& probe, double scale, double gamma_max,
                                 const SearchOptions& search);

// Spectrum probe for a lattice: builds H at gamma, solves, classifies. Throws
// NoConvergence carrying gamma and the matrix size.
BreakingProbe lattice_probe(const LatticeSpec& spec, const GainLossPlacement& placement,
                            const SearchOptions& search);

double default_gamma_max(const LatticeSpec& spec);

// First gamma at which PT symmetry breaks. The gamma field of `placement` is
// ignored.
ThresholdResult find_threshold(const LatticeSpec& spec, const GainLossPlacement& placement,
                               const SearchOptions& search = {});

enum class SweepAxis { GainColumn, ChainIndex, NumChains, CouplingRatio };

const char* to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct PhasePoint {
  double parameter = 0.0;
  std::optional<ThresholdResult> result;
  std::optional<ErrorKind> error_kind;
  std::string error;

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

struct PhaseDiagram {
  SweepAxis axis = SweepAxis::GainColumn;
  LatticeSpec spec;
  GainLossPlacement placement;
  std::vector<PhasePoint> points;

  std::size_t failures() const;
  friend bool operator==(const PhaseDiagram&, const PhaseDiagram&) = default;
};

// Lattice and placement for one sweep value: m0, n0 or ny set to the
// (integer) value, or jy = value * jx.
std::pair<LatticeSpec, GainLossPlacement> sweep_point(const LatticeSpec& spec,
                                                      const GainLossPlacement& placement,
                                                      SweepAxis axis, double value);

// One independent threshold search per value. Failures are recorded on the
// point and the sweep continues. Output is sorted by parameter regardless of
// the thread count.
PhaseDiagram phase_diagram(const LatticeSpec& spec, const GainLossPlacement& placement, SweepAxis axis,
                           std::vector<double> values, const SearchOptions& search = {},
                           int threads = 0);

struct ScalingCheck {
  double factor = 1.0;
  double predicted = 0.0;
  double measured = 0.0;
  double rel_err = 0.0;
};

// Compares a multi-chain threshold against factor * single-chain threshold,
// factor = (ny + 1)/2 for open and ny/2 for periodic y boundaries.
ScalingCheck scaling_law_check(const ThresholdResult& base, const ThresholdResult& multi, int ny,
                               Boundary bc_y);

struct FlowTable {
  std::vector<double> gammas;
  // sorted[g] is the (Re, Im)-sorted spectrum at gammas[g].
  std::vector<std::vector<Complex>> sorted;
  // branches[g][b] follows branch b continuously in gamma; branch order is
  // the sorted order at gammas[0].
  std::vector<std::vector<Complex>> branches;
  std::vector<double> imag_tol;

  struct Breaking {
    std::size_t gamma_index = 0;
    std::vector<std::size_t> branches;
  };
  // First grid point with a broken spectrum and the branches that carry
  // the imaginary parts there.
  std::optional<Breaking> first_breaking() const;
};

FlowTable eigenvalue_flow(const LatticeSpec& spec, const GainLossPlacement& placement,
                          const std::vector<double>& gammas, const EigOptions& eig = {});

// Minimum-cost assignment: result[i] is the column matched to row i.
std::vector<std::size_t> match_nearest(const std::vector<Complex>& previous,
                                       const std::vector<Complex>& current);

}  // namespace ptlat
