#pragma once

#include "ptlat/lattice.hpp"
#include "ptlat/threshold.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace ptlat {

enum class PtChainPosition { Top, Middle };

const char* to_string(PtChainPosition pos);
PtChainPosition chain_position_from_string(const std::string& name);

// A PT dimer or trimer (gain on its first site, loss on its last) coupled
// side by side to one or two neutral copies.
struct PlaquetteConfig {
  int chain_len = 2;
  int num_chains = 2;
  PtChainPosition pt_chain_pos = PtChainPosition::Top;
  double jx = 1.0;
  double jy = 0.0;

  void validate() const;
  LatticeSpec lattice() const;
  GainLossPlacement placement() const;

  friend bool operator==(const PlaquetteConfig&, const PlaquetteConfig&) = default;
};

// -jx sx x 1 + i gamma sz x |A><A| + 1 x (-jy sx) in the basis
// {gain, loss} x {chain A, chain B}, index = 2 * site + chain. Gain and loss
// sit on chain A only; chain B is the neutral dimer.
Eigen::MatrixXcd h4_matrix(double jx, double jy, double gamma);

// Closed-form eigenvalues of h4_matrix: all four sign combinations of
// +-[jx^2 + jy^2 - gamma^2/2 +- sqrt(gamma^4 + 16 jx^2 jy^2 - 4 gamma^2 jy^2)/2]^(1/2),
// principal roots (Re >= 0, Im >= 0 on the imaginary axis).
struct QuarticRoots {
  std::array<Complex, 4> roots;
};

QuarticRoots lambda4(double jx, double jy, double gamma);

// Threshold where the closed-form roots first leave the real axis.
ThresholdResult lambda4_threshold(double jx, double jy, const SearchOptions& search = {});

struct PlaquetteResult {
  ThresholdResult threshold;
  // Closed-form cross-check, present for the two-dimer (4-site) plaquette.
  std::optional<ThresholdResult> closed_form;
  bool cross_check_ok = true;
};

PlaquetteResult plaquette_threshold(const PlaquetteConfig& config, const SearchOptions& search = {});

// Threshold against jy/jx. Interior local minima of the sampled curve are
// refined by golden-section search; refinements that reach a zero threshold
// are inserted as extra (flagged) points.
PhaseDiagram plaquette_sweep(const PlaquetteConfig& config, std::vector<double> ratios,
                             const SearchOptions& search = {}, int threads = 0);

// One representative ratio per run of consecutive zero-threshold points.
std::vector<double> flagged_zeros(const PhaseDiagram& diagram);

}  // namespace ptlat
