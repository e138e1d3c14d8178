#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ptlat {

using Complex = std::complex<double>;

enum class Boundary { Open, Periodic };

const char* to_string(Boundary bc);
Boundary boundary_from_string(const std::string& name);

// Geometry and couplings of an nx-by-ny tight-binding lattice. Sites are
// labelled (m, n) with 1 <= m <= nx along a chain and 1 <= n <= ny across
// chains.
struct LatticeSpec {
  int nx = 2;
  int ny = 1;
  double jx = 1.0;
  double jy = 0.0;
  Boundary bc_x = Boundary::Open;
  Boundary bc_y = Boundary::Open;

  int num_sites() const { return nx * ny; }

  // Throws Error(InvalidSpec) on violation.
  void validate() const;

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

// Gain +i*gamma at (m0, n0) and loss -i*gamma at the parity image
// (nx + 1 - m0, n0). The loss column is always derived.
struct GainLossPlacement {
  int m0 = 1;
  int n0 = 1;
  double gamma = 0.0;

  int loss_column(const LatticeSpec& spec) const { return spec.nx + 1 - m0; }

  // Throws Error(InvalidPlacement).
  void validate(const LatticeSpec& spec) const;

  friend bool operator==(const GainLossPlacement&, const GainLossPlacement&) = default;
};

// Which of the two placement sites carries the gain. Exchanging them maps the
// system onto its PT partner (gamma -> -gamma).
enum class GainSide { AtM0, AtMirror };

// Row-major within a chain, chains stacked: i = (n-1)*nx + (m-1).
inline std::size_t flatten(const LatticeSpec& spec, int m, int n) {
  return static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(spec.nx) +
         static_cast<std::size_t>(m - 1);
}

inline std::pair<int, int> unflatten(const LatticeSpec& spec, std::size_t index) {
  const auto nx = static_cast<std::size_t>(spec.nx);
  return {static_cast<int>(index % nx) + 1, static_cast<int>(index / nx) + 1};
}

struct HamiltonianMatrix {
  LatticeSpec spec;
  GainLossPlacement placement;
  Eigen::MatrixXcd entries;

  Eigen::Index dim() const { return entries.rows(); }
  Complex at(int m, int n, int m2, int n2) const {
    return entries(static_cast<Eigen::Index>(flatten(spec, m, n)),
                   static_cast<Eigen::Index>(flatten(spec, m2, n2)));
  }
};

HamiltonianMatrix build_hamiltonian(const LatticeSpec& spec, const GainLossPlacement& placement,
                                    GainSide side = GainSide::AtM0);

// Max-norm of P*conj(H)*P - H with P the reflection m -> nx + 1 - m.
double pt_commutator_defect(const HamiltonianMatrix& h);

struct AnalyticLevel {
  int p = 1;
  int q = 1;
  double kp = 0.0;
  double kq = 0.0;
  double energy = 0.0;
  double norm_a = 0.0;
};

// Closed-form open-boundary spectrum, sorted by energy (ties by q then p).
std::vector<AnalyticLevel> analytic_spectrum(const LatticeSpec& spec);

// Open-boundary eigenfunction A sin(k_p m) sin(k_q n).
double analytic_wavefunction(const LatticeSpec& spec, int p, int q, int m, int n);

}  // namespace ptlat
