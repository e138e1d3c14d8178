#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ptlat/eigensolver.hpp"
#include "ptlat/error.hpp"
#include "ptlat/lattice.hpp"
#include "ptlat/plaquette.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace ptlat;

namespace {

Complex cofactor_det(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  Complex det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::MatrixXcd minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index c = 0, k = 0; c < n; ++c)
        if (c != j) minor(r - 1, k++) = a(r, c);
    det += (j % 2 == 0 ? 1.0 : -1.0) * a(0, j) * cofactor_det(minor);
  }
  return det;
}

// Largest distance from an element of `a` to its greedy partner in `b`.
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](const Complex& l, const Complex& r) { return std::abs(l - x) < std::abs(r - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("identity") {
  const auto r = eigenvalues(Eigen::MatrixXcd::Identity(3, 3));
  CHECK(r.converged);
  REQUIRE(r.eigenvalues.size() == 3);
  for (const auto& z : r.eigenvalues) CHECK(std::abs(z - 1.0) < 1e-15);
}

TEST_CASE("empty and 1x1") {
  CHECK(eigenvalues(Eigen::MatrixXcd(0, 0)).converged);
  Eigen::MatrixXcd a(1, 1);
  a(0, 0) = Complex(2, -3);
  const auto r = eigenvalues(a);
  CHECK(r.eigenvalues[0] == Complex(2, -3));
}

TEST_CASE("dimer closed form") {
  for (double g : {0.0, 0.3, 0.5, 0.99, 1.2, 3.0}) {
    Eigen::MatrixXcd h(2, 2);
    h << Complex(0, g), -1.0, -1.0, Complex(0, -g);
    const auto r = eigenvalues(h);
    const Complex root = std::sqrt(Complex(1.0 - g * g, 0.0));
    CHECK(multiset_distance(r.eigenvalues, {root, -root}) < 1e-14);
  }
  Eigen::MatrixXcd h(2, 2);
  h << Complex(0, 0.5), -1.0, -1.0, Complex(0, -0.5);
  const auto r = eigenvalues(h);
  CHECK(r.eigenvalues[0].real() == doctest::Approx(-std::sqrt(0.75)).epsilon(1e-14));
  CHECK(r.eigenvalues[1].real() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
}

TEST_CASE("four-site plaquette at gamma = 0") {
  const auto r = eigenvalues(h4_matrix(1.0, 2.0, 0.0));
  CHECK(multiset_distance(r.eigenvalues, {-3.0, -1.0, 1.0, 3.0}) < 1e-14);
}

TEST_CASE("sorted by real then imaginary part") {
  const auto r = eigenvalues(build_hamiltonian(LatticeSpec{6, 3, 1.0, 0.8}, {1, 2, 2.5}).entries);
  CHECK(std::is_sorted(r.eigenvalues.begin(), r.eigenvalues.end(), [](const Complex& a, const Complex& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  }));
}

TEST_CASE("general complex matrices against Eigen") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int n : {2, 3, 5, 8, 17, 40, 64, 90}) {
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
    const auto r = eigenvalues(a);
    CHECK(r.converged);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ref(a, false);
    std::vector<Complex> expected(ref.eigenvalues().data(), ref.eigenvalues().data() + n);
    CHECK(multiset_distance(r.eigenvalues, expected) < 1e-10 * a.norm());
  }
}

TEST_CASE("trace and determinant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 6;
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(u(rng), u(rng));
    const auto r = eigenvalues(a);
    Complex sum = 0.0, prod = 1.0;
    for (const auto& z : r.eigenvalues) {
      sum += z;
      prod *= z;
    }
    CHECK(std::abs(sum - a.trace()) <= 1e-10 * a.norm());
    const Complex det = cofactor_det(a);
    CHECK(std::abs(prod - det) <= 1e-8 * std::max(std::abs(det), 1e-3));
  }

  // Lattice matrices are traceless.
  for (int nx = 2; nx <= 6; ++nx)
    for (int ny = 1; ny <= 3; ++ny) {
      const auto h = build_hamiltonian(LatticeSpec{nx, ny, 1.0, 1.7}, {1, ny, 0.6});
      const auto r = eigenvalues(h);
      Complex sum = 0.0, prod = 1.0;
      for (const auto& z : r.eigenvalues) {
        sum += z;
        prod *= z;
      }
      CHECK(std::abs(sum) <= 1e-10 * r.frobenius_norm);
      if (h.dim() <= 6) {
        const Complex det = cofactor_det(h.entries);
        CHECK(std::abs(prod - det) <= 1e-8 * std::max(std::abs(det), 1.0));
      }
    }
}

TEST_CASE("analytic oracle on random lattices") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> nxd(2, 10), nyd(1, 5);
  std::uniform_real_distribution<double> logr(std::log(0.1), std::log(50.0));
  for (int trial = 0; trial < 100; ++trial) {
    const int nx = nxd(rng), ny = nyd(rng);
    const double jx = 1.0, jy = std::exp(logr(rng));
    const auto r = eigenvalues(build_hamiltonian(LatticeSpec{nx, ny, jx, jy}, {1, 1, 0.0}));
    std::vector<double> e;
    for (int p = 1; p <= nx; ++p)
      for (int q = 1; q <= ny; ++q)
        e.push_back(-2 * jx * std::cos(p * std::numbers::pi / (nx + 1)) -
                    2 * jy * std::cos(q * std::numbers::pi / (ny + 1)));
    std::sort(e.begin(), e.end());
    const double scale = 2.0 * (jx + jy);
    for (std::size_t i = 0; i < e.size(); ++i)
      CHECK(std::abs(r.eigenvalues[i] - e[i]) <= 1e-9 * scale);
  }
}

TEST_CASE("spectra are closed under conjugation and negation") {
  SUBCASE("examples") {
    SpectrumResult real;
    real.eigenvalues = {-1.0, 1.0};
    CHECK(spectrum_symmetry_defect(real).conj_defect == 0.0);
    CHECK(spectrum_symmetry_defect(real).neg_defect == 0.0);
    SpectrumResult quad;
    quad.eigenvalues = {{-0.5, -1}, {-0.5, 1}, {0.5, -1}, {0.5, 1}};
    CHECK(spectrum_symmetry_defect(quad).conj_defect == 0.0);
    CHECK(spectrum_symmetry_defect(quad).neg_defect == 0.0);
    SpectrumResult odd;
    odd.eigenvalues = {{1.0, 0.5}};
    CHECK(spectrum_symmetry_defect(odd).conj_defect == doctest::Approx(1.0));
    CHECK(spectrum_symmetry_defect(odd).neg_defect == doctest::Approx(std::abs(Complex(2.0, 1.0))));
  }
  SUBCASE("8x5 broken lattice") {
    const auto r = eigenvalues(build_hamiltonian(LatticeSpec{8, 5, 1.0, 8.0}, {1, 3, 4.0}));
    const auto d = spectrum_symmetry_defect(r);
    CHECK(d.conj_defect <= 1e-8);
    CHECK(d.neg_defect <= 1e-8);
  }
  SUBCASE("random lattices") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> nxd(2, 9), nyd(1, 4);
    std::uniform_real_distribution<double> jyd(0.0, 5.0), gd(0.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
      LatticeSpec spec{nxd(rng), nyd(rng), 1.0, jyd(rng)};
      GainLossPlacement place{1 + static_cast<int>(rng() % static_cast<unsigned>(spec.nx / 2)),
                              1 + static_cast<int>(rng() % static_cast<unsigned>(spec.ny)), gd(rng)};
      const auto r = eigenvalues(build_hamiltonian(spec, place));
      REQUIRE(r.converged);
      const auto d = spectrum_symmetry_defect(r);
      CHECK(d.conj_defect <= 10 * 1e-10 * r.frobenius_norm);
      CHECK(d.neg_defect <= 10 * 1e-10 * r.frobenius_norm);
    }
  }
}

TEST_CASE("eigenvectors and residuals") {
  EigOptions opts;
  opts.compute_vectors = true;
  for (double g : {0.0, 0.4, 1.7}) {
    const auto h = build_hamiltonian(LatticeSpec{7, 3, 1.0, 1.3}, {2, 2, g});
    const auto r = eigenvalues(h, opts);
    CHECK(r.converged);
    REQUIRE(r.eigenvectors.has_value());
    CHECK(r.max_residual <= opts.residual_tol);
    for (Eigen::Index k = 0; k < h.dim(); ++k) {
      const auto v = r.eigenvectors->col(k);
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((h.entries * v - r.eigenvalues[static_cast<std::size_t>(k)] * v).norm() <= 1e-10 * r.frobenius_norm);
    }
  }
  // Degenerate levels still get independent vectors.
  const auto r = eigenvalues(Eigen::MatrixXcd::Identity(4, 4), opts);
  REQUIRE(r.eigenvectors.has_value());
  CHECK(std::abs(r.eigenvectors->determinant()) > 0.5);
}

TEST_CASE("determinism") {
  const auto h = build_hamiltonian(LatticeSpec{12, 4, 1.0, 3.0}, {3, 2, 1.1});
  const auto a = eigenvalues(h);
  const auto b = eigenvalues(h);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("larger lattices converge") {
  const auto h = build_hamiltonian(LatticeSpec{26, 5, 1.0, 20.0}, {1, 1, 2.0});
  const auto r = eigenvalues(h);
  CHECK(r.converged);
  CHECK(r.max_residual <= 1e-10);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ref(h.entries, false);
  std::vector<Complex> expected(ref.eigenvalues().data(), ref.eigenvalues().data() + h.dim());
  CHECK(multiset_distance(r.eigenvalues, expected) < 1e-9 * r.frobenius_norm);
}

TEST_CASE("highly degenerate periodic stacks converge at tiny gamma") {
  for (int ny : {6, 8, 10}) {
    CAPTURE(ny);
    const auto h = build_hamiltonian(LatticeSpec{26, ny, 1.0, 20.0, Boundary::Open, Boundary::Periodic}, {1, 1, 1e-4});
    const auto r = eigenvalues(h);
    CHECK(r.converged);
    CHECK(r.max_residual <= 1e-12);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ref(h.entries, false);
    std::vector<Complex> expected(ref.eigenvalues().data(), ref.eigenvalues().data() + h.dim());
    CHECK(multiset_distance(r.eigenvalues, expected) < 1e-12 * r.frobenius_norm);
  }
}

TEST_CASE("errors") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(3, 3);
  a(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eigenvalues(a), Error);
  try {
    eigenvalues(a);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
  a(1, 2) = Complex(0, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(eigenvalues(a), Error);
  CHECK_THROWS_AS(eigenvalues(Eigen::MatrixXcd(2, 3)), Error);

  EigOptions bad;
  bad.residual_tol = 0.0;
  CHECK_THROWS_AS(eigenvalues(Eigen::MatrixXcd::Identity(2, 2), bad), Error);
  bad = {};
  bad.max_sweeps = 1;
  CHECK_THROWS_AS(eigenvalues(Eigen::MatrixXcd::Identity(3, 3), bad), Error);
}

TEST_CASE("sweep exhaustion reports an unconverged partial result") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  const int n = 60;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  EigOptions opts;
  opts.max_sweeps = n;
  const auto r = eigenvalues(a, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.eigenvalues.size() == static_cast<std::size_t>(n));
}

TEST_CASE("Hessenberg reduction preserves the spectrum") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd a(12, 12);
  for (Eigen::Index i = 0; i < 12; ++i)
    for (Eigen::Index j = 0; j < 12; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::MatrixXcd h = a;
  detail::reduce_to_hessenberg(h);
  for (Eigen::Index j = 0; j < 12; ++j)
    for (Eigen::Index i = j + 2; i < 12; ++i) CHECK(h(i, j) == Complex(0, 0));
  CHECK(std::abs(h.trace() - a.trace()) < 1e-12);
  CHECK(h.norm() == doctest::Approx(a.norm()).epsilon(1e-12));

  Eigen::MatrixXcd t = h;
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(12, 12);
  std::vector<Complex> values;
  const auto stats = detail::hessenberg_qr(t, values, 480, &z);
  CHECK(stats.converged);
  // h z = z t with t upper triangular
  CHECK((h * z - z * t).norm() < 1e-12 * h.norm());
  CHECK((z.adjoint() * z - Eigen::MatrixXcd::Identity(12, 12)).norm() < 1e-12);
  for (Eigen::Index j = 0; j < 12; ++j)
    for (Eigen::Index i = j + 1; i < 12; ++i) CHECK(std::abs(t(i, j)) < 1e-12 * h.norm());
}
