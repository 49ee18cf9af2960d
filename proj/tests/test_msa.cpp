#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dce/analysis.hpp"
#include "dce/msa.hpp"

using namespace dce;

namespace {

Eigen::MatrixXd dense(const SlowFlowSystem& sys) {
  const int dim = 2 * sys.n;
  Eigen::MatrixXd m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = sys.at(r, c);
  return m;
}

double max_real_eigenvalue(const SlowFlowSystem& sys) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(dense(sys));
  return es.eigenvalues().real().maxCoeff();
}

// A two-mode cavity with k2 = 3 k1 exactly, so that omega = 2 k1 meets
// both the self resonance of mode 1 and the difference k2 - k1.
Spectrum exact_pair_spectrum() {
  Spectrum sp;
  sp.k = {1.0, 3.0};
  sp.masses = {1.3, 1.1};
  sp.gaps = {2.0};
  return sp;
}

}  // namespace

TEST_SUITE("msa") {

TEST_CASE("single-mode rate") {
  const Spectrum sp = solve_spectrum(0.05, 1.0, 10);
  for (int n = 1; n <= 3; ++n) {
    const double k = sp.k[static_cast<std::size_t>(n - 1)];
    const double M = mode_mass(k, 0.05);
    const double expected = 0.1 * sp.k1() * sp.k1() / k * std::cos(k) * std::cos(k) / (2 * M);
    CHECK(single_mode_rate(n, sp, 0.1) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(single_mode_rate(n, sp, 0.1) > 0.0);
  }
  CHECK(single_mode_rate(1, sp, 0.0) == 0.0);
  CHECK(single_mode_rate(1, sp, 0.1) == doctest::Approx(0.0113857).epsilon(1e-5));
  CHECK(single_mode_rate(2, sp, 0.1) == doctest::Approx(0.0094428).epsilon(1e-4));

  const double r1 = single_mode_rate(2, sp, 0.1) / single_mode_rate(1, sp, 0.1);
  const double r2 = single_mode_rate(2, sp, 0.73) / single_mode_rate(1, sp, 0.73);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-14));
  CHECK(std::abs(r1 / (0.0265 / 0.0315) - 1.0) < 0.03);
}

TEST_CASE("pair roots") {
  for (auto [gs, gp] : {std::pair{0.0362, -0.0266}, std::pair{1.0, 0.2}, std::pair{0.3, 0.0},
                        std::pair{0.0, 0.4}, std::pair{2.0, 1.0}}) {
    const auto roots = pair_roots(gs, gp);
    // Each root solves G^2 -+ gs G + gp^2 = 0 for one choice of the sign.
    for (const cplx& g : roots) {
      const double plus = std::abs(g * g - gs * g + gp * gp);
      const double minus = std::abs(g * g + gs * g + gp * gp);
      CHECK(std::min(plus, minus) < 1e-15 * (1 + gs * gs + gp * gp));
    }
    // They come in +- pairs.
    CHECK(std::abs(roots[0] + roots[3]) < 1e-15);
    CHECK(std::abs(roots[1] + roots[2]) < 1e-15);
  }
  auto r = pair_roots(0.3, 0.0);
  CHECK(r[0] == cplx(0.3));
  CHECK(r[1] == cplx(0.0));
  CHECK(r[2] == cplx(0.0));
  CHECK(r[3] == cplx(-0.3));
  r = pair_roots(0.0, 0.4);
  for (const cplx& g : r) {
    CHECK(g.real() == 0.0);
    CHECK(std::abs(g.imag()) == doctest::Approx(0.4));
  }
}

TEST_CASE("coupled pair of the k2 ~ 3 k1 cavity") {
  const Spectrum sp = solve_spectrum(0.01, 4.96, 10);
  const auto pr = coupled_pair_rates(1, 2, sp, 0.1);
  CHECK(pr.gamma_self * pr.gamma_self - 4 * pr.gamma_pair * pr.gamma_pair < 0.0);
  double best = -1e9;
  for (const cplx& g : pr.roots) best = std::max(best, g.real());
  CHECK(best == doctest::Approx(pr.gamma_self / 2).epsilon(1e-14));
  CHECK(pr.slope == doctest::Approx(2 * 0.1 * best).epsilon(1e-14));
  CHECK(pr.oscillation ==
        doctest::Approx(0.1 * 0.5 * std::sqrt(4 * pr.gamma_pair * pr.gamma_pair -
                                              pr.gamma_self * pr.gamma_self)));
}

TEST_CASE("slow-flow matrix against a dense eigen-decomposition") {
  const Spectrum sp = solve_spectrum(0.05, 1.0, 10);
  // Single resonance: the dominant exponent in tau is Gamma_1 / 2, so
  // |B_1|^2 grows as exp(alpha Gamma_1 t) = exp(lambda_1 t).
  const auto single = slow_flow_system(sp, 2 * sp.k1());
  const double alpha = 0.07;
  CHECK(2 * alpha * max_real_eigenvalue(single) ==
        doctest::Approx(single_mode_rate(1, sp, alpha)).epsilon(1e-12));

  // Off resonance the matrix vanishes and the amplitudes stay put.
  const auto none = slow_flow_system(sp, 0.3);
  for (double v : none.matrix) CHECK(v == 0.0);
  const auto still = slow_flow_evolve(sp, 0.3, kDefaultMatchTolerance, 50.0);
  CHECK(still.b.back()[0] == cplx(1.0));
  CHECK(still.a.back()[0] == cplx(0.0));

  // Pair resonance of the k2 ~ 3 k1 cavity (matched at a wide tolerance).
  const Spectrum pair = solve_spectrum(0.01, 4.96, 10);
  const auto sys = slow_flow_system(pair, 2 * pair.k1(), 0.1);
  const double lam = max_real_eigenvalue(sys);
  const auto traj = slow_flow_evolve(pair, 2 * pair.k1(), 0.1, 400.0, {}, 8000);
  // Growth of |A_1|^2 + |B_1|^2 over the second half of the run.
  auto weight = [&](std::size_t s) {
    return std::norm(traj.a[s][0]) + std::norm(traj.b[s][0]) + std::norm(traj.a[s][1]) +
           std::norm(traj.b[s][1]);
  };
  const std::size_t mid = traj.tau.size() / 2, end = traj.tau.size() - 1;
  const double rate = std::log(weight(end) / weight(mid)) / (traj.tau[end] - traj.tau[mid]);
  CHECK(rate == doctest::Approx(2 * lam).epsilon(0.02));
}

TEST_CASE("slow flow reproduces the full mode dynamics at an exact pair resonance") {
  const Spectrum sp = exact_pair_spectrum();
  const double alpha = 0.05, t_final = 2000.0;
  CavityParams p;
  p.n_modes = 2;
  p.alpha = alpha;
  p.omega_drive = 2.0;
  p.t_final = p.t_max = t_final;
  RunOptions ro;
  ro.windowed = false;
  const auto h = run_particles(p, sp, ro);

  const int steps = 4000;
  const auto col1 = slow_flow_evolve(sp, 2.0, 1e-9, alpha * t_final, {1.0, 0.0}, steps);
  const auto col2 = slow_flow_evolve(sp, 2.0, 1e-9, alpha * t_final, {0.0, 1.0}, steps);
  for (int s = 1; s <= 10; ++s) {
    const double t = t_final * s / 10;
    std::size_t i = 0;
    while (i + 1 < h.t.size() && h.t[i] < t) ++i;
    const auto j = static_cast<std::size_t>(std::lround(steps * (h.t[i] / t_final)));
    for (std::size_t m = 0; m < 2; ++m) {
      // A plays the role of beta in the slow-flow labelling.
      const double slow = std::norm(col1.a[j][m]) + std::norm(col2.a[j][m]);
      CAPTURE(t);
      CAPTURE(m);
      CHECK(h.particles[i][m] == doctest::Approx(slow).epsilon(0.03));
    }
  }
  // The resulting exponent differs from the literal two-root formula.
  const double lam = max_real_eigenvalue(slow_flow_system(sp, 2.0, 1e-9));
  const auto literal = coupled_pair_rates(1, 2, sp, alpha);
  CHECK(2 * alpha * lam == doctest::Approx(literal.slope / 2).epsilon(1e-6));
}

TEST_CASE("regime classification") {
  const Spectrum a = solve_spectrum(0.05, 1.0, 10);
  CHECK(classify_regime(a, 2 * a.k1(), 0.1).regime == Regime::single_mode);
  CHECK(classify_regime(a, 2 * a.k1(), 0.0).regime == Regime::off_resonant);
  CHECK(classify_regime(a, 0.3, 0.1).regime == Regime::off_resonant);
  CHECK(classify_regime(a, a.k[0] + a.k[1], 0.1).regime == Regime::finite_pair);

  const Spectrum b = solve_spectrum(0.01, 4.96, 10);
  RegimeOptions wide;
  wide.match_tol = 0.1;
  const auto rep = classify_regime(b, 2 * b.k1(), 0.1, wide);
  CHECK(rep.regime == Regime::finite_pair);
  const auto pred = predict(b, 2 * b.k1(), 0.1, wide);
  REQUIRE(pred.pair);
  CHECK(pred.modes == std::vector<int>{1, 2});
  CHECK(pred.rates[0] == pred.rates[1]);

  RegimeOptions weak;
  weak.epsilon = 0.005;
  const Spectrum c = solve_spectrum(0.05, 14.14, 10);
  const auto rc = classify_regime(c, 2 * c.k1(), 0.05, weak);
  CHECK(rc.equidistant);
  CHECK(rc.regime == Regime::equidistant_weak);
  CHECK(rc.amplitude_proxy == doctest::Approx(14.14 * 0.005));

  RegimeOptions strong;
  strong.epsilon = 0.5;
  const Spectrum d = solve_spectrum(0.05, 350.0, 10);
  const auto rd = classify_regime(d, d.k[1] - d.k[0], 140.0, strong);
  CHECK(rd.regime == Regime::equidistant_strong);
  CHECK(growth_law(rd.regime) == "exponential-despite-equidistance");
  CHECK(growth_law(Regime::equidistant_weak) == "quadratic-then-linear");

  const std::string text = format_prediction(predict(a, 2 * a.k1(), 0.1));
  CHECK(text.find("single-mode") != std::string::npos);
  CHECK(text.find("self(1)") != std::string::npos);
}

}  // TEST_SUITE
