#include "ptlat/lattice.hpp"

#include "ptlat/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ptlat {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidPlacement: return "InvalidPlacement";
    case ErrorKind::UnsupportedBoundary: return "UnsupportedBoundary";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnconvergedSpectrum: return "UnconvergedSpectrum";
    case ErrorKind::NoBreakingFound: return "NoBreakingFound";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::AllDivergent: return "AllDivergent";
  }
  return "Unknown";
}

const char* to_string(Boundary bc) { return bc == Boundary::Open ? "open" : "periodic"; }

Boundary boundary_from_string(const std::string& name) {
  if (name == "open") return Boundary::Open;
  if (name == "periodic") return Boundary::Periodic;
  throw Error(ErrorKind::InvalidSpec, "unknown boundary condition '" + name + "'");
}

void LatticeSpec::validate() const {
  if (nx < 2) throw Error(ErrorKind::InvalidSpec, "nx must be >= 2, got " + std::to_string(nx));
  if (ny < 1) throw Error(ErrorKind::InvalidSpec, "ny must be >= 1, got " + std::to_string(ny));
  if (!(jx > 0.0) || !std::isfinite(jx)) throw Error(ErrorKind::InvalidSpec, "jx must be positive");
  if (!(jy >= 0.0) || !std::isfinite(jy)) throw Error(ErrorKind::InvalidSpec, "jy must be nonnegative");
  // Fewer than three sites would double-count the wrap-around bond.
  if (bc_x == Boundary::Periodic && nx < 3)
    throw Error(ErrorKind::InvalidSpec, "periodic x needs nx >= 3");
  if (bc_y == Boundary::Periodic && ny < 3)
    throw Error(ErrorKind::InvalidSpec, "periodic y needs ny >= 3");
}

void GainLossPlacement::validate(const LatticeSpec& spec) const {
  const int max_m0 = (spec.nx + 1) / 2;
  if (m0 < 1 || m0 > max_m0)
    throw Error(ErrorKind::InvalidPlacement,
                "m0 = " + std::to_string(m0) + " outside [1, " + std::to_string(max_m0) + "]");
  if (spec.nx % 2 == 1 && m0 == (spec.nx + 1) / 2)
    throw Error(ErrorKind::InvalidPlacement, "gain and loss coincide at the center of an odd chain");
  if (n0 < 1 || n0 > spec.ny)
    throw Error(ErrorKind::InvalidPlacement,
                "n0 = " + std::to_string(n0) + " outside [1, " + std::to_string(spec.ny) + "]");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw Error(ErrorKind::InvalidPlacement, "gamma must be finite and nonnegative");
}

HamiltonianMatrix build_hamiltonian(const LatticeSpec& spec, const GainLossPlacement& placement,
                                    GainSide side) {
  spec.validate();
  placement.validate(spec);

  const auto dim = static_cast<Eigen::Index>(spec.num_sites());
  HamiltonianMatrix h{spec, placement, Eigen::MatrixXcd::Zero(dim, dim)};
  auto bond = [&](int m, int n, int m2, int n2, double j) {
    const auto a = static_cast<Eigen::Index>(flatten(spec, m, n));
    const auto b = static_cast<Eigen::Index>(flatten(spec, m2, n2));
    h.entries(a, b) -= j;
    h.entries(b, a) -= j;
  };

  for (int n = 1; n <= spec.ny; ++n) {
    for (int m = 1; m <= spec.nx; ++m) {
      if (m < spec.nx) bond(m, n, m + 1, n, spec.jx);
      if (n < spec.ny && spec.jy != 0.0) bond(m, n, m, n + 1, spec.jy);
    }
  }
  if (spec.bc_x == Boundary::Periodic)
    for (int n = 1; n <= spec.ny; ++n) bond(spec.nx, n, 1, n, spec.jx);
  if (spec.bc_y == Boundary::Periodic && spec.jy != 0.0)
    for (int m = 1; m <= spec.nx; ++m) bond(m, spec.ny, m, 1, spec.jy);

  if (placement.gamma != 0.0) {
    const double sign = side == GainSide::AtM0 ? 1.0 : -1.0;
    const auto gain = static_cast<Eigen::Index>(flatten(spec, placement.m0, placement.n0));
    const auto loss =
        static_cast<Eigen::Index>(flatten(spec, placement.loss_column(spec), placement.n0));
    h.entries(gain, gain) += Complex(0.0, sign * placement.gamma);
    h.entries(loss, loss) -= Complex(0.0, sign * placement.gamma);
  }
  return h;
}

double pt_commutator_defect(const HamiltonianMatrix& h) {
  const auto& spec = h.spec;
  const auto dim = h.dim();
  std::vector<Eigen::Index> mirror(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto [m, n] = unflatten(spec, static_cast<std::size_t>(i));
    mirror[static_cast<std::size_t>(i)] =
        static_cast<Eigen::Index>(flatten(spec, spec.nx + 1 - m, n));
  }
  double defect = 0.0;
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const Complex transformed =
          std::conj(h.entries(mirror[static_cast<std::size_t>(i)], mirror[static_cast<std::size_t>(j)]));
      defect = std::max(defect, std::abs(transformed - h.entries(i, j)));
    }
  return defect;
}

namespace {

void require_open(const LatticeSpec& spec) {
  if (spec.bc_x != Boundary::Open || spec.bc_y != Boundary::Open)
    throw Error(ErrorKind::UnsupportedBoundary, "closed-form spectrum requires open boundaries");
}

double norm_constant(const LatticeSpec& spec) {
  return 2.0 / std::sqrt(static_cast<double>(spec.nx + 1) * static_cast<double>(spec.ny + 1));
}

}  // namespace

std::vector<AnalyticLevel> analytic_spectrum(const LatticeSpec& spec) {
  spec.validate();
  require_open(spec);
  const double a = norm_constant(spec);
  std::vector<AnalyticLevel> levels;
  levels.reserve(static_cast<std::size_t>(spec.num_sites()));
  for (int q = 1; q <= spec.ny; ++q) {
    for (int p = 1; p <= spec.nx; ++p) {
      AnalyticLevel level;
      level.p = p;
      level.q = q;
      level.kp = p * std::numbers::pi / (spec.nx + 1);
      level.kq = q * std::numbers::pi / (spec.ny + 1);
      level.energy = -2.0 * spec.jx * std::cos(level.kp) - 2.0 * spec.jy * std::cos(level.kq);
      level.norm_a = a;
      levels.push_back(level);
    }
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const AnalyticLevel& l, const AnalyticLevel& r) { return l.energy < r.energy; });
  return levels;
}

double analytic_wavefunction(const LatticeSpec& spec, int p, int q, int m, int n) {
  spec.validate();
  require_open(spec);
  if (p < 1 || p > spec.nx || q < 1 || q > spec.ny || m < 1 || m > spec.nx || n < 1 || n > spec.ny)
    throw Error(ErrorKind::IndexOutOfRange, "level or site index outside the lattice");
  const double kp = p * std::numbers::pi / (spec.nx + 1);
  const double kq = q * std::numbers::pi / (spec.ny + 1);
  return norm_constant(spec) * std::sin(kp * m) * std::sin(kq * n);
}

}  // namespace ptlat
