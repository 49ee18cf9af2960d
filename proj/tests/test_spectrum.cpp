#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dce/errors.hpp"
#include "dce/spectrum.hpp"

using namespace dce;

namespace {

constexpr double pi = std::numbers::pi;

// Reference roots by a plain sign scan plus long-double bisection of
// x sin x + (chi0 x^2 - b0) cos x, which has the same positive roots as the
// boundary condition but no poles.
std::vector<double> reference_roots(double chi0, double b0, int count) {
  auto h = [&](long double x) {
    return x * std::sin(x) + (chi0 * x * x - b0) * std::cos(x);
  };
  std::vector<double> roots;
  const long double step = 1e-3L;
  long double a = 1e-9L;
  long double ha = h(a);
  while (static_cast<int>(roots.size()) < count) {
    const long double b = a + step;
    const long double hb = h(b);
    if (hb == 0.0L) {
      roots.push_back(static_cast<double>(b));
      a = b + step;
      ha = h(a);
      continue;
    }
    if ((ha < 0) != (hb < 0)) {
      long double lo = a, hi = b;
      for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if ((h(mid) < 0) == (ha < 0))
          lo = mid;
        else
          hi = mid;
      }
      roots.push_back(static_cast<double>(0.5L * (lo + hi)));
    }
    a = b;
    ha = hb;
  }
  return roots;
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("roots agree with an independent scan-and-bisect reference") {
  struct Case {
    double chi0, b0;
  };
  for (const Case c : {Case{0.05, 1.0}, Case{0.01, 4.96}, Case{1.0, 1.0}, Case{0.05, 14.14},
                       Case{0.0, 0.3}, Case{10.0, 2.0}, Case{0.05, -0.5}}) {
    CAPTURE(c.chi0);
    CAPTURE(c.b0);
    const Spectrum sp = solve_spectrum(c.chi0, c.b0, 10);
    const auto ref = reference_roots(c.chi0, c.b0, 10);
    REQUIRE(sp.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(sp.k[i] == doctest::Approx(ref[i]).epsilon(1e-9));
  }
}

TEST_CASE("frozen values for the reference cavities") {
  // Regression values; the reference scan above is the oracle.
  const Spectrum a = solve_spectrum(0.05, 1.0, 4);
  CHECK(a.k[0] == doctest::Approx(0.848830134).epsilon(1e-8));
  CHECK(a.k[1] == doctest::Approx(3.281359191).epsilon(1e-8));
  CHECK(a.k[2] == doctest::Approx(6.140034975).epsilon(1e-8));
  CHECK(a.k[3] == doctest::Approx(9.092862253).epsilon(1e-8));

  const Spectrum b = solve_spectrum(0.01, 4.96, 4);
  const double quoted[] = {1.311, 4.015, 6.862, 9.810};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(b.k[static_cast<std::size_t>(i)] - quoted[i]) < 5e-3);

  const Spectrum c = solve_spectrum(1.0, 1.0, 1);
  CHECK(c.k1() == doctest::Approx(0.676253).epsilon(1e-5));
}

TEST_CASE("neumann limit gives n pi exactly") {
  const Spectrum sp = solve_spectrum(0.0, 0.0, 12);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    CHECK(sp.k[i] == doctest::Approx((i + 1) * pi).epsilon(1e-13));
    CHECK(sp.masses[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (double g : sp.gaps) CHECK(g == doctest::Approx(pi).epsilon(1e-12));
}

TEST_CASE("residuals, ordering and positive masses over a parameter grid") {
  for (double chi0 : {0.0, 0.01, 0.05, 1.0, 10.0, 50.0})
    for (double b0 : {-2.0, -0.5, 0.0, 0.5, 1.0, 4.96, 14.14, 100.0, 350.0}) {
      CAPTURE(chi0);
      CAPTURE(b0);
      const Spectrum sp = solve_spectrum(chi0, b0, 10);
      for (std::size_t i = 0; i < sp.size(); ++i) {
        CHECK(std::abs(boundary_residual(sp.k[i], chi0, b0)) < kDefaultRootTolerance);
        CHECK(sp.k[i] > 0.0);
        CHECK(sp.masses[i] > 0.0);
        if (i > 0) CHECK(sp.k[i] > sp.k[i - 1]);
      }
      REQUIRE(sp.gaps.size() == sp.size() - 1);
      for (std::size_t i = 0; i < sp.gaps.size(); ++i)
        CHECK(sp.gaps[i] == sp.k[i + 1] - sp.k[i]);
    }
}

TEST_CASE("solving twice is bit-identical") {
  const Spectrum a = solve_spectrum(0.05, 14.14, 25);
  const Spectrum b = solve_spectrum(0.05, 14.14, 25);
  CHECK(a.k == b.k);
  CHECK(a.masses == b.masses);
}

TEST_CASE("negative boundary potential pushes the first root past pi/2") {
  const Spectrum sp = solve_spectrum(0.05, -0.5, 3);
  CHECK(sp.k1() > pi / 2);
  CHECK(sp.k1() < pi);
}

TEST_CASE("params overload uses the circuit triple when present") {
  CavityParams p;
  p.chi0 = 0.05;
  p.b0 = 123.0;  // ignored
  p.n_modes = 3;
  p.circuit = CircuitDrive{2.0, pi / 3, 0.01};
  const Spectrum sp = solve_spectrum(p);
  CHECK(sp.b0 == doctest::Approx(1.0).epsilon(1e-14));
  const Spectrum direct = solve_spectrum(0.05, 1.0, 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(sp.k[i] == doctest::Approx(direct.k[i]).epsilon(1e-12));
  // alpha = 2 v0 sin f0 eps / k1^2
  CHECK(p.drive_strength(sp.k1()) ==
        doctest::Approx(2.0 * 2.0 * std::sin(pi / 3) * 0.01 / (sp.k1() * sp.k1())));
}

TEST_CASE("invalid inputs and unreachable tolerances") {
  CHECK_THROWS_AS(solve_spectrum(-0.1, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(solve_spectrum(0.05, 1.0, 0), ConfigError);
  CHECK_THROWS_AS(solve_spectrum(0.05, 1.0, 3, 0.0), ConfigError);
  try {
    solve_spectrum(0.05, 1.0, 3, 1e-300);
    FAIL("expected SpectrumError");
  } catch (const SpectrumError& e) {
    CHECK(std::string(e.what()).find("root 1") != std::string::npos);
  }
}

TEST_CASE("mode mass") {
  for (int n = 1; n <= 5; ++n)
    for (double chi0 : {0.0, 0.05, 1.0}) CHECK(mode_mass(n * pi, chi0) == doctest::Approx(1 + 2 * chi0).epsilon(1e-12));
  // Long-double evaluation of the same expression as the oracle.
  auto ref = [](long double kd, long double chi0) {
    return 1.0L + std::sin(2 * kd) / (2 * kd) + 2 * chi0 * std::cos(kd) * std::cos(kd);
  };
  CHECK(mode_mass(0.8495, 0.05) == doctest::Approx(static_cast<double>(ref(0.8495L, 0.05L))).epsilon(1e-14));
  CHECK(mode_mass(0.8495, 0.05) == doctest::Approx(1.627).epsilon(1e-3));
  CHECK(mode_mass(3.2819, 0.05) == doctest::Approx(static_cast<double>(ref(3.2819L, 0.05L))).epsilon(1e-14));
  CHECK(mode_mass(3.2819, 0.05) == doctest::Approx(1.140).epsilon(1e-3));
}

TEST_CASE("gap profile") {
  CHECK_THROWS_AS(gap_profile(0.05, {}, 5), ConfigError);

  const auto rows = gap_profile(0.0, {0.0}, 6);
  REQUIRE(rows.size() == 6);
  for (int i = 0; i < 5; ++i) CHECK(rows[static_cast<std::size_t>(i)].gap == doctest::Approx(pi).epsilon(1e-12));
  CHECK(std::isnan(rows.back().gap));
  CHECK(rows.back().n == 6);

  const Spectrum sp = solve_spectrum(0.05, 1.0, 2);
  const auto one = gap_profile(0.05, {1.0}, 2);
  CHECK(one[0].gap == doctest::Approx(sp.k[1] - sp.k[0]).epsilon(1e-15));
  CHECK(one[0].gap == doctest::Approx(2.4324).epsilon(1e-3));

  // Large b0: every gap moves monotonically towards pi.
  std::vector<double> grid;
  for (double b = 50; b <= 1000; b += 50) grid.push_back(b);
  const auto big = gap_profile(0.05, grid, 6);
  for (int n = 1; n <= 5; ++n) {
    double prev = 1e9;
    for (const auto& r : big) {
      if (r.n != n) continue;
      const double dist = std::abs(r.gap - pi);
      CHECK(dist <= prev);
      prev = dist;
    }
    CHECK(prev < 0.05 * pi);
  }
}

TEST_CASE("resonant set") {
  const Spectrum a = solve_spectrum(0.05, 1.0, 10);
  auto res = resonant_set(a, 2 * a.k1());
  REQUIRE(res.size() == 1);
  CHECK(res[0].kind == ResonanceKind::self);
  CHECK(res[0].n == 1);
  CHECK(to_string(res[0]) == "self(1)");

  const Spectrum b = solve_spectrum(0.01, 4.96, 10);
  // k2 - 3k1 is about -0.08, so the pair only matches at a wide tolerance.
  CHECK(resonant_set(b, 2 * b.k1()).size() == 1);
  res = resonant_set(b, 2 * b.k1(), 0.1);
  REQUIRE(res.size() == 2);
  CHECK(res[1].kind == ResonanceKind::difference);
  CHECK(to_string(res[1]) == "pair(1,2,-)");
  CHECK(res[1].detuning == doctest::Approx(2 * b.k[0] - (b.k[1] - b.k[0])));

  res = resonant_set(a, a.k[0] + a.k[2]);
  REQUIRE(res.size() == 1);
  CHECK(to_string(res[0]) == "pair(1,3,+)");

  // Far from every 2k_n and |k_n +- k_m|.
  CHECK(resonant_set(a, 0.3).empty());
  CHECK_THROWS_AS(resonant_set(a, 1.0, 0.0), ConfigError);
}

}  // TEST_SUITE
