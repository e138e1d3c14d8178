#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ptlat/eigensolver.hpp"
#include "ptlat/error.hpp"
#include "ptlat/plaquette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace ptlat;

namespace {

const double kSqrt2 = std::sqrt(2.0);

// First breaking of the two-dimer plaquette, jx = 1: the outer root pair
// meets at |1 - y^2|; for y > 2 the discriminant turns negative first at
// gamma^2 = 2y^2 - 2y sqrt(y^2 - 4).
double dimer_pair_oracle(double y) {
  double g = std::abs(1.0 - y * y);
  if (y > 2.0) g = std::min(g, std::sqrt(2 * y * y - 2 * y * std::sqrt(y * y - 4)));
  return g;
}

double greedy_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](const Complex& l, const Complex& r) { return std::abs(l - x) < std::abs(r - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

double gamma_over_jx(int len, int chains, PtChainPosition pos, double ratio) {
  return plaquette_threshold(PlaquetteConfig{len, chains, pos, 1.0, ratio}).threshold.gamma_th;
}

}  // namespace

TEST_CASE("h4 basis layout") {
  const auto h = h4_matrix(1.5, 0.7, 0.3);
  // index = 2 * site + chain; site 0 carries the gain
  CHECK(h(0, 0) == Complex(0, 0.3));
  CHECK(h(1, 1) == Complex(0, 0));
  CHECK(h(2, 2) == Complex(0, -0.3));
  CHECK(h(3, 3) == Complex(0, 0));
  CHECK(h(0, 2) == Complex(-1.5, 0));
  CHECK(h(1, 3) == Complex(-1.5, 0));
  CHECK(h(0, 1) == Complex(-0.7, 0));
  CHECK(h(2, 3) == Complex(-0.7, 0));
  CHECK(h(0, 3) == Complex(0, 0));
  CHECK(h(1, 2) == Complex(0, 0));
}

TEST_CASE("h4 is the two-by-two lattice up to relabelling") {
  const auto h = h4_matrix(1.0, 2.0, 0.7);
  const auto lat = build_hamiltonian(LatticeSpec{2, 2, 1.0, 2.0}, {1, 1, 0.7});
  for (int site = 0; site < 2; ++site)
    for (int chain = 0; chain < 2; ++chain)
      for (int site2 = 0; site2 < 2; ++site2)
        for (int chain2 = 0; chain2 < 2; ++chain2)
          CHECK(h(2 * site + chain, 2 * site2 + chain2) == lat.at(site + 1, chain + 1, site2 + 1, chain2 + 1));
}

TEST_CASE("decoupled dimers") {
  const auto r = eigenvalues(h4_matrix(1.0, 0.0, 0.6));
  CHECK(greedy_distance(r.eigenvalues, {-1.0, -0.8, 0.8, 1.0}) < 1e-14);
  const auto l = lambda4(1.0, 0.0, 0.6).roots;
  CHECK(greedy_distance({l.begin(), l.end()}, {-1.0, -0.8, 0.8, 1.0}) < 1e-14);
}

TEST_CASE("closed-form roots match the eigensolver") {
  for (int i = 1; i <= 20; ++i)
    for (int j = 1; j <= 20; ++j) {
      const double y = 0.25 * i, g = 0.25 * j;
      const auto roots = lambda4(1.0, y, g).roots;
      const auto solved = eigenvalues(h4_matrix(1.0, y, g));
      // near-coincident roots (close to an exceptional point) are only sqrt(eps) accurate
      double closest = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) closest = std::min(closest, std::abs(roots[a] - roots[b]));
      const double tol = closest < 0.1 ? 1e-6 : 1e-10;
      CAPTURE(y);
      CAPTURE(g);
      CHECK(greedy_distance({roots.begin(), roots.end()}, solved.eigenvalues) <= tol);
    }
}

TEST_CASE("closed-form root conventions") {
  for (double y : {0.3, 1.0, 2.5})
    for (double g : {0.0, 0.5, 1.7, 4.0}) {
      const auto r = lambda4(1.0, y, g).roots;
      CHECK(r[1] == -r[0]);
      CHECK(r[3] == -r[2]);
      for (int k : {0, 2}) {
        CHECK(r[k].real() >= 0.0);
        if (r[k].real() == 0.0) CHECK(r[k].imag() >= 0.0);
      }
    }
  const auto r = lambda4(1.0, 2.0, 0.0).roots;
  CHECK(greedy_distance({r.begin(), r.end()}, {-3.0, -1.0, 1.0, 3.0}) < 1e-14);

  double max_imag = 0.0;
  for (const auto& z : lambda4(1.0, 1.0, 0.1).roots) max_imag = std::max(max_imag, std::abs(z.imag()));
  CHECK(max_imag > 1e-6);
}

TEST_CASE("two-dimer plaquette against the closed form") {
  for (double y : {0.0, 0.3, 0.5, 0.9, 1.2, 1.5, 1.9, 2.3, 3.0, 5.0, 10.0, 100.0}) {
    CAPTURE(y);
    const auto r = plaquette_threshold(PlaquetteConfig{2, 2, PtChainPosition::Top, 1.0, y});
    CHECK(r.closed_form.has_value());
    CHECK(r.cross_check_ok);
    CHECK(std::abs(r.threshold.gamma_th - dimer_pair_oracle(y)) <= 2e-6);
  }
  // exactly at jy = 2 jx the isolated touching point at 2 sqrt2 does not break
  CHECK(std::abs(gamma_over_jx(2, 2, PtChainPosition::Top, 2.0) - 3.0) <= 1e-6);
  CHECK(gamma_over_jx(2, 2, PtChainPosition::Top, 2.001) < 2.9);

  const auto sym = plaquette_threshold(PlaquetteConfig{2, 2, PtChainPosition::Top, 1.0, 1.0});
  CHECK(sym.threshold.degenerate_zero);
  CHECK(sym.closed_form->degenerate_zero);
  CHECK(sym.cross_check_ok);

  // jx sets the unit
  const auto scaled = plaquette_threshold(PlaquetteConfig{2, 2, PtChainPosition::Top, 2.0, 4.0});
  CHECK(std::abs(scaled.threshold.gamma_th - 6.0) <= 4e-6);
}

TEST_CASE("golden values") {
  CHECK(std::abs(gamma_over_jx(2, 2, PtChainPosition::Top, 0.0) - 1.0) <= 1e-5);
  CHECK(std::abs(gamma_over_jx(2, 2, PtChainPosition::Top, 100.0) - 2.0) <= 0.1);
  CHECK(std::abs(gamma_over_jx(2, 3, PtChainPosition::Middle, kSqrt2) - 3.0) <= 1e-3);
  CHECK(std::abs(gamma_over_jx(3, 2, PtChainPosition::Top, 0.0) - kSqrt2) <= 1e-6);
  CHECK(std::abs(gamma_over_jx(3, 2, PtChainPosition::Top, 100.0) - 2 * kSqrt2) <= 0.05 * 2 * kSqrt2);
  // larger plaquettes have no closed-form cross-check
  const auto r = plaquette_threshold(PlaquetteConfig{3, 3, PtChainPosition::Middle, 1.0, 1.0});
  CHECK_FALSE(r.closed_form.has_value());
  CHECK(r.cross_check_ok);
}

TEST_CASE("sweeps locate zeros") {
  std::vector<double> grid;
  for (int i = 0; i <= 150; ++i) grid.push_back(0.02 * i);

  const auto d1 = plaquette_sweep(PlaquetteConfig{2, 2, PtChainPosition::Top, 1.0, 0.0}, grid, {}, 2);
  const auto z1 = flagged_zeros(d1);
  REQUIRE(z1.size() == 1);
  CHECK(z1[0] == doctest::Approx(1.0).epsilon(1e-9));

  const auto d2 = plaquette_sweep(PlaquetteConfig{2, 3, PtChainPosition::Top, 1.0, 0.0}, grid, {}, 2);
  const auto z2 = flagged_zeros(d2);
  REQUIRE(z2.size() == 2);
  CHECK(std::abs(z2[0] - 1 / kSqrt2) < 1e-3);
  CHECK(std::abs(z2[1] - kSqrt2) < 1e-3);
  CHECK(d2.points.size() > grid.size());
  CHECK(std::is_sorted(d2.points.begin(), d2.points.end(),
                       [](const auto& a, const auto& b) { return a.parameter < b.parameter; }));

  // located maximum of the PT-top curve
  double best = 0.0, at = 0.0;
  for (const auto& p : d2.points)
    if (p.result && p.result->gamma_th > best) best = p.result->gamma_th, at = p.parameter;
  CHECK(at == doctest::Approx(2.0));
  CHECK(best == doctest::Approx(7.0 / 3.0).epsilon(1e-5));

  const auto d1b = plaquette_sweep(PlaquetteConfig{2, 2, PtChainPosition::Top, 1.0, 0.0}, grid, {}, 1);
  CHECK(d1 == d1b);
}

TEST_CASE("continuity away from level-switching points") {
  struct Case {
    int len, chains;
    PtChainPosition pos;
    std::vector<std::pair<double, double>> skip;
  };
  const std::vector<Case> cases = {
      {2, 2, PtChainPosition::Top, {{1.99, 2.03}}},
      {2, 3, PtChainPosition::Top, {{0.77, 0.83}, {1.97, 2.01}}},
      {2, 3, PtChainPosition::Middle, {{1.39, 1.43}}},
      {3, 2, PtChainPosition::Top, {}},
      {3, 3, PtChainPosition::Top, {{0.51, 0.61}}},
      {3, 3, PtChainPosition::Middle, {}},
  };
  std::vector<double> grid;
  for (int i = 0; i <= 250; ++i) grid.push_back(0.02 * i);
  for (const auto& c : cases) {
    const auto d = plaquette_sweep(PlaquetteConfig{c.len, c.chains, c.pos, 1.0, 0.0}, grid, {}, 0);
    CHECK(d.failures() == 0);
    for (std::size_t i = 1; i < d.points.size(); ++i) {
      const auto& a = d.points[i - 1];
      const auto& b = d.points[i];
      const bool skipped = std::any_of(c.skip.begin(), c.skip.end(), [&](const auto& w) {
        return a.parameter >= w.first && b.parameter <= w.second;
      });
      if (skipped) continue;
      CAPTURE(c.len);
      CAPTURE(c.chains);
      CAPTURE(b.parameter);
      CHECK(std::abs(a.result->gamma_th - b.result->gamma_th) < 0.2);
    }
  }
}

TEST_CASE("plaquette spectra symmetries") {
  for (int len : {2, 3})
    for (int chains : {2, 3})
      for (auto pos : {PtChainPosition::Top, PtChainPosition::Middle}) {
        if (pos == PtChainPosition::Middle && chains == 2) continue;
        for (double y : {0.4, 1.3, 3.0})
          for (double g : {0.2, 1.1, 2.9}) {
            PlaquetteConfig cfg{len, chains, pos, 1.0, y};
            auto place = cfg.placement();
            place.gamma = g;
            const auto r = eigenvalues(build_hamiltonian(cfg.lattice(), place));
            const auto d = spectrum_symmetry_defect(r);
            CHECK(d.conj_defect <= 1e-9 * r.frobenius_norm);
            CHECK(d.neg_defect <= 1e-9 * r.frobenius_norm);
          }
      }
}

TEST_CASE("configuration") {
  PlaquetteConfig mid{3, 3, PtChainPosition::Middle, 1.0, 2.0};
  CHECK(mid.placement().n0 == 2);
  CHECK(mid.placement().m0 == 1);
  CHECK(mid.lattice().num_sites() == 9);
  CHECK(PlaquetteConfig{2, 3, PtChainPosition::Top, 1.0, 1.0}.placement().n0 == 1);

  CHECK_THROWS_AS(PlaquetteConfig({4, 2, PtChainPosition::Top, 1.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(PlaquetteConfig({2, 1, PtChainPosition::Top, 1.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(PlaquetteConfig({2, 2, PtChainPosition::Middle, 1.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(PlaquetteConfig({2, 2, PtChainPosition::Top, 0.0, 1.0}).validate(), Error);
  CHECK(chain_position_from_string("middle") == PtChainPosition::Middle);
  CHECK(std::string(to_string(PtChainPosition::Top)) == "top");
  CHECK_THROWS_AS(chain_position_from_string("bottom"), Error);
}
