#pragma once

#include "ptlat/lattice.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace ptlat {

struct EigOptions {
  // Relative to the Frobenius norm of the input.
  double residual_tol = 1e-10;
  // Total QR sweeps allowed; 0 selects 40 * dim.
  int max_sweeps = 0;
  bool compute_vectors = false;

  int sweep_limit(Eigen::Index dim) const;
  void validate(Eigen::Index dim) const;
};

struct SpectrumResult {
  // Sorted by (Re, Im) ascending.
  std::vector<Complex> eigenvalues;
  // Relative to the Frobenius norm. Measured ||Hv - lambda v|| when vectors
  // were computed, otherwise the backward error accumulated by deflation.
  double max_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double frobenius_norm = 0.0;
  // Column k pairs with eigenvalues[k]; unit 2-norm.
  std::optional<Eigen::MatrixXcd> eigenvectors;
};

// Balancing, Householder reduction to upper Hessenberg form, then
// single-shift complex QR with Wilkinson shifts and aggressive early
// deflation. Deterministic: identical input gives bit-identical output.
// On sweep exhaustion the partial result comes back with converged = false.
SpectrumResult eigenvalues(const Eigen::MatrixXcd& a, const EigOptions& opts = {});
SpectrumResult eigenvalues(const HamiltonianMatrix& h, const EigOptions& opts = {});

struct SymmetryDefect {
  double conj_defect = 0.0;
  double neg_defect = 0.0;
};

// Hausdorff distances between the spectrum and its images under
// lambda -> conj(lambda) and lambda -> -lambda.
SymmetryDefect spectrum_symmetry_defect(const SpectrumResult& s);

namespace detail {

// Diagonal similarity scaling by powers of two; returns the scale factors.
Eigen::VectorXd balance(Eigen::MatrixXcd& a);

// In-place unitary similarity to upper Hessenberg form.
void reduce_to_hessenberg(Eigen::MatrixXcd& a);

struct HessenbergQrStats {
  int sweeps = 0;
  bool converged = false;
  double deflated_mass = 0.0;
};

// Eigenvalues of an upper Hessenberg matrix; `a` is destroyed. When `z` is
// non-null the full Schur form and Schur vectors are accumulated (z must be
// initialized, usually to identity), otherwise only the active window is
// updated.
HessenbergQrStats hessenberg_qr(Eigen::MatrixXcd& a, std::vector<Complex>& values, int max_sweeps,
                                Eigen::MatrixXcd* z = nullptr);

}  // namespace detail

}  // namespace ptlat
