#include "dce/msa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dce/errors.hpp"

namespace dce {

namespace {

void check_mode(const Spectrum& spectrum, int n) {
  if (n < 1 || n > static_cast<int>(spectrum.size()))
    throw ConfigError("mode " + std::to_string(n) + " outside 1.." +
                      std::to_string(spectrum.size()));
}

std::size_t idx(int n) { return static_cast<std::size_t>(n - 1); }

}  // namespace

double self_coefficient(const Spectrum& spectrum, int n) {
  check_mode(spectrum, n);
  const double k1 = spectrum.k1();
  const double k = spectrum.k[idx(n)];
  const double c = std::cos(k);
  return k1 * k1 * c * c / (2.0 * k * spectrum.masses[idx(n)]);
}

double pair_coefficient(const Spectrum& spectrum, int n, int m) {
  check_mode(spectrum, n);
  check_mode(spectrum, m);
  const double k1 = spectrum.k1();
  const double kn = spectrum.k[idx(n)];
  const double km = spectrum.k[idx(m)];
  return k1 * k1 * std::cos(kn) * std::cos(km) /
         (4.0 * std::sqrt(kn * km * spectrum.masses[idx(n)] * spectrum.masses[idx(m)]));
}

double single_mode_rate(int n, const Spectrum& spectrum, double alpha) {
  return alpha * self_coefficient(spectrum, n);
}

std::array<cplx, 4> pair_roots(double g_self, double g_pair) {
  const cplx d = std::sqrt(cplx(g_self * g_self - 4.0 * g_pair * g_pair, 0.0));
  return {0.5 * (g_self + d), 0.5 * (g_self - d), 0.5 * (-g_self + d),
          0.5 * (-g_self - d)};
}

PairRates coupled_pair_rates(int j, int l, const Spectrum& spectrum, double alpha) {
  PairRates r;
  r.gamma_self = self_coefficient(spectrum, j);
  r.gamma_pair = pair_coefficient(spectrum, j, l);
  r.roots = pair_roots(r.gamma_self, r.gamma_pair);
  const auto best = std::max_element(
      r.roots.begin(), r.roots.end(),
      [](const cplx& a, const cplx& b) { return a.real() < b.real(); });
  r.slope = 2.0 * alpha * best->real();
  r.oscillation = alpha * std::abs(best->imag());
  return r;
}

SlowFlowSystem slow_flow_system(const Spectrum& spectrum, double omega,
                                double match_tol) {
  SlowFlowSystem sys;
  sys.n = static_cast<int>(spectrum.size());
  const int dim = 2 * sys.n;
  sys.matrix.assign(static_cast<std::size_t>(dim * dim), 0.0);
  auto add = [&](int row, int col, double v) {
    sys.matrix[static_cast<std::size_t>(row * dim + col)] += v;
  };
  // Variable layout: A_n at 2(n-1), B_n at 2(n-1)+1.
  auto A = [](int n) { return 2 * (n - 1); };
  auto B = [](int n) { return 2 * (n - 1) + 1; };
  for (const auto& r : resonant_set(spectrum, omega, match_tol)) {
    const double g = pair_coefficient(spectrum, r.n, r.m);
    switch (r.kind) {
      case ResonanceKind::self:
        // g here is k1^2 cos^2 / (4 k M) = Gamma_n / 2.
        add(A(r.n), B(r.n), -g);
        add(B(r.n), A(r.n), -g);
        break;
      case ResonanceKind::sum:
        add(A(r.n), B(r.m), -g);
        add(A(r.m), B(r.n), -g);
        add(B(r.n), A(r.m), -g);
        add(B(r.m), A(r.n), -g);
        break;
      case ResonanceKind::difference:
        add(A(r.n), A(r.m), g);
        add(A(r.m), A(r.n), -g);
        add(B(r.n), B(r.m), g);
        add(B(r.m), B(r.n), -g);
        break;
    }
  }
  return sys;
}

SlowFlowTrajectory slow_flow_evolve(const Spectrum& spectrum, double omega,
                                    double match_tol, double tau_max,
                                    std::vector<cplx> initial_b, int steps) {
  if (!(tau_max >= 0.0) || !std::isfinite(tau_max))
    throw ConfigError("tau_max must be finite and >= 0");
  if (steps < 1) throw ConfigError("slow-flow steps must be >= 1");
  const auto sys = slow_flow_system(spectrum, omega, match_tol);
  const auto n = static_cast<std::size_t>(sys.n);
  const std::size_t dim = 2 * n;
  if (initial_b.empty()) {
    initial_b.assign(n, 0.0);
    initial_b[0] = 1.0;
  }
  if (initial_b.size() != n) throw ConfigError("initial B has the wrong size");

  std::vector<cplx> y(dim, 0.0);
  for (std::size_t m = 0; m < n; ++m) y[2 * m + 1] = initial_b[m];

  auto rhs = [&](const std::vector<cplx>& x, std::vector<cplx>& out) {
    for (std::size_t r = 0; r < dim; ++r) {
      cplx s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double a = sys.matrix[r * dim + c];
        if (a != 0.0) s += a * x[c];
      }
      out[r] = s;
    }
  };

  SlowFlowTrajectory traj;
  auto record = [&](double tau) {
    traj.tau.push_back(tau);
    std::vector<cplx> a(n), b(n);
    for (std::size_t m = 0; m < n; ++m) {
      a[m] = y[2 * m];
      b[m] = y[2 * m + 1];
    }
    traj.a.push_back(std::move(a));
    traj.b.push_back(std::move(b));
  };
  record(0.0);
  const double h = tau_max / steps;
  std::vector<cplx> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  for (int i = 0; i < steps; ++i) {
    rhs(y, k1);
    for (std::size_t r = 0; r < dim; ++r) tmp[r] = y[r] + 0.5 * h * k1[r];
    rhs(tmp, k2);
    for (std::size_t r = 0; r < dim; ++r) tmp[r] = y[r] + 0.5 * h * k2[r];
    rhs(tmp, k3);
    for (std::size_t r = 0; r < dim; ++r) tmp[r] = y[r] + h * k3[r];
    rhs(tmp, k4);
    for (std::size_t r = 0; r < dim; ++r)
      y[r] += h / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r]);
    record((i + 1 == steps) ? tau_max : (i + 1) * h);
  }
  return traj;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::single_mode: return "single-mode";
    case Regime::finite_pair: return "finite-pair";
    case Regime::equidistant_weak: return "equidistant-weak";
    case Regime::equidistant_strong: return "equidistant-strong";
    case Regime::off_resonant: return "off-resonant";
  }
  return "unknown";
}

std::string growth_law(Regime r) {
  switch (r) {
    case Regime::single_mode: return "exponential";
    case Regime::finite_pair: return "exponential-with-oscillation";
    case Regime::equidistant_weak: return "quadratic-then-linear";
    case Regime::equidistant_strong: return "exponential-despite-equidistance";
    case Regime::off_resonant: return "bounded";
  }
  return "unknown";
}

RegimeReport classify_regime(const Spectrum& spectrum, double omega, double alpha,
                             const RegimeOptions& options) {
  RegimeReport rep;
  rep.resonances = resonant_set(spectrum, omega, options.match_tol);
  rep.amplitude_proxy =
      options.epsilon ? spectrum.b0 * *options.epsilon : alpha;
  if (alpha == 0.0 || omega <= 0.0) {
    rep.regime = Regime::off_resonant;
    return rep;
  }

  // A ladder of nearly equal gaps that the drive frequency bridges couples
  // every mode to its neighbours.
  const std::size_t rungs = std::min<std::size_t>(
      spectrum.gaps.size(), static_cast<std::size_t>(std::max(1, options.ladder_modes - 1)));
  if (rungs >= 2) {
    rep.equidistant = true;
    for (std::size_t n = 0; n < rungs; ++n)
      if (std::abs(spectrum.gaps[n] - omega) > options.gap_spread * omega)
        rep.equidistant = false;
  }
  if (rep.equidistant) {
    rep.regime = rep.amplitude_proxy >= options.strong_threshold
                     ? Regime::equidistant_strong
                     : Regime::equidistant_weak;
    return rep;
  }
  if (rep.resonances.empty()) {
    rep.regime = Regime::off_resonant;
    return rep;
  }
  const bool only_self = std::all_of(
      rep.resonances.begin(), rep.resonances.end(),
      [](const Resonance& r) { return r.kind == ResonanceKind::self; });
  rep.regime = only_self ? Regime::single_mode : Regime::finite_pair;
  return rep;
}

MsaPrediction predict(const Spectrum& spectrum, double omega, double alpha,
                      const RegimeOptions& options) {
  MsaPrediction p;
  p.report = classify_regime(spectrum, omega, alpha, options);
  const auto& res = p.report.resonances;
  if (p.report.regime == Regime::single_mode) {
    const int n = res.front().n;
    p.modes = {n};
    p.rates = {single_mode_rate(n, spectrum, alpha)};
  } else if (p.report.regime == Regime::finite_pair) {
    const auto self = std::find_if(res.begin(), res.end(), [](const Resonance& r) {
      return r.kind == ResonanceKind::self;
    });
    if (self != res.end()) {
      const int j = self->n;
      const auto partner = std::find_if(res.begin(), res.end(), [&](const Resonance& r) {
        return r.kind != ResonanceKind::self && (r.n == j || r.m == j);
      });
      if (partner != res.end()) {
        const int l = partner->n == j ? partner->m : partner->n;
        p.pair = coupled_pair_rates(j, l, spectrum, alpha);
        p.modes = {j, l};
        p.rates = {p.pair->slope, p.pair->slope};
      } else {
        p.modes = {j};
        p.rates = {single_mode_rate(j, spectrum, alpha)};
      }
    } else {
      // Without a self resonance only an isolated sum pair grows, at
      // 2 alpha |Gamma_nm| for |B|^2; an isolated difference pair only
      // exchanges quanta.
      const auto& r = res.front();
      const double g = pair_coefficient(spectrum, r.n, r.m);
      const double rate = r.kind == ResonanceKind::sum ? 2.0 * alpha * std::abs(g) : 0.0;
      p.modes = {r.n, r.m};
      p.rates = {rate, rate};
    }
  }
  return p;
}

std::string format_prediction(const MsaPrediction& prediction) {
  std::ostringstream os;
  os.precision(6);
  const auto& rep = prediction.report;
  os << "regime: " << to_string(rep.regime) << '\n';
  os << "growth law: " << growth_law(rep.regime) << '\n';
  os << "amplitude proxy: " << rep.amplitude_proxy << '\n';
  os << "resonances:";
  if (rep.resonances.empty()) os << " none";
  for (const auto& r : rep.resonances)
    os << ' ' << to_string(r) << "[detuning=" << r.detuning << ']';
  os << '\n';
  for (std::size_t i = 0; i < prediction.modes.size(); ++i)
    os << "rate mode " << prediction.modes[i] << ": " << prediction.rates[i] << '\n';
  if (prediction.pair) {
    const auto& pr = *prediction.pair;
    os << "Gamma_j: " << pr.gamma_self << "  Gamma_jl: " << pr.gamma_pair << '\n';
    os << "Gamma roots:";
    for (const auto& g : pr.roots) os << " (" << g.real() << (g.imag() < 0 ? "" : "+") << g.imag() << "i)";
    os << '\n';
    os << "oscillation frequency: " << pr.oscillation << '\n';
  }
  return os.str();
}

}  // namespace dce
