#include "dce/spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dce/errors.hpp"

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxNewtonIterations = 200;
constexpr double kStepTolerance = 1e-10;

// kd sin(kd) + (chi0 kd^2 - b0) cos(kd) = cos(kd) g(kd), finite everywhere.
double regular_form(double x, double chi0, double b0) {
  return x * std::sin(x) + (chi0 * x * x - b0) * std::cos(x);
}

double regular_form_derivative(double x, double chi0, double b0) {
  return std::sin(x) + x * std::cos(x) + 2.0 * chi0 * x * std::cos(x) -
         (chi0 * x * x - b0) * std::sin(x);
}

// Root of the regular form inside [lo, hi] where it changes sign.
double refine_root(double lo, double hi, double chi0, double b0, int index) {
  double f_lo = regular_form(lo, chi0, b0);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    const double f = regular_form(x, chi0, b0);
    if (f == 0.0) return x;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = x;
      f_lo = f;
    } else {
      hi = x;
    }
    const double df = regular_form_derivative(x, chi0, b0);
    double next = x - f / df;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step < kStepTolerance * std::max(1.0, x) ||
        hi - lo < 4.0 * std::numeric_limits<double>::epsilon() * x) {
      // A last Newton polish keeps the result independent of where the
      // bracket happened to stop.
      const double f_end = regular_form(x, chi0, b0);
      const double d_end = regular_form_derivative(x, chi0, b0);
      const double polished = x - f_end / d_end;
      if (std::isfinite(polished) && std::abs(polished - x) < 1e-9 * x)
        x = polished;
      return x;
    }
  }
  std::ostringstream os;
  os << "root " << index << " did not converge in " << kMaxNewtonIterations
     << " iterations (chi0=" << chi0 << ", b0=" << b0 << ")";
  throw SpectrumError(os.str());
}

}  // namespace

std::vector<double> Spectrum::coupling_weights() const {
  std::vector<double> w(k.size());
  for (std::size_t n = 0; n < k.size(); ++n)
    w[n] = std::cos(k[n]) / std::sqrt(masses[n]);
  return w;
}

double boundary_residual(double kd, double chi0, double b0) {
  return kd * std::tan(kd) + chi0 * kd * kd - b0;
}

double mode_mass(double kd, double chi0) {
  const double c = std::cos(kd);
  return 1.0 + std::sin(2.0 * kd) / (2.0 * kd) + 2.0 * chi0 * c * c;
}

Spectrum solve_spectrum(double chi0, double b0, int n_modes, double tol) {
  if (!(tol > 0.0)) throw ConfigError("root tolerance must be positive");
  if (n_modes < 1) throw ConfigError("n_modes must be >= 1");
  if (!std::isfinite(chi0) || chi0 < 0.0) throw ConfigError("chi0 must be >= 0");
  if (!std::isfinite(b0)) throw ConfigError("b0 must be finite");

  Spectrum s;
  s.chi0 = chi0;
  s.b0 = b0;
  const auto wanted = static_cast<std::size_t>(n_modes);
  // Every pair of quarter intervals past k ~ sqrt(|b0|/chi0) holds a root, so
  // this bound is generous.
  const long max_intervals =
      8L * n_modes + 64L +
      (chi0 > 0.0 ? static_cast<long>(4.0 * std::sqrt(std::abs(b0) / chi0) / kPi)
                  : 0L);

  for (long m = 0; m < max_intervals && s.k.size() < wanted; ++m) {
    const double a = m * kPi / 2.0;
    const double b = (m + 1) * kPi / 2.0;
    // Zeros of tan at even m sit on the interval's left end; a root there is
    // exact (chi0 (m pi/2)^2 == b0) and belongs to this interval.
    if (m > 0 && m % 2 == 0) {
      const double at_zero = chi0 * a * a - b0;
      if (std::abs(at_zero) <= 8.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(1.0, std::abs(b0))) {
        if (s.k.empty() || std::abs(s.k.back() - a) > 1e-9 * a) s.k.push_back(a);
        continue;
      }
    }
    const double lo = (m == 0) ? 0.0 : a;
    const double f_lo = (m == 0) ? -b0 : regular_form(lo, chi0, b0);
    const double f_hi = regular_form(b, chi0, b0);
    if (m == 0 && b0 == 0.0) continue;  // kd = 0 is not a mode
    if ((f_lo < 0.0) == (f_hi < 0.0) || f_lo == 0.0) continue;
    const double root =
        refine_root(lo, b, chi0, b0, static_cast<int>(s.k.size()) + 1);
    const double residual = boundary_residual(root, chi0, b0);
    if (!(std::abs(residual) < tol)) {
      std::ostringstream os;
      os << "root " << s.k.size() + 1 << " at kd=" << root
         << " has residual " << residual << " above tolerance " << tol;
      throw SpectrumError(os.str());
    }
    s.k.push_back(root);
  }
  if (s.k.size() < wanted) {
    std::ostringstream os;
    os << "found only " << s.k.size() << " of " << n_modes
       << " roots (chi0=" << chi0 << ", b0=" << b0 << ")";
    throw SpectrumError(os.str());
  }
  for (std::size_t n = 1; n < s.k.size(); ++n)
    if (!(s.k[n] > s.k[n - 1]))
      throw SpectrumError("spectrum is not strictly increasing at root " +
                          std::to_string(n + 1));

  s.masses.reserve(s.k.size());
  for (double kd : s.k) s.masses.push_back(mode_mass(kd, chi0));
  for (std::size_t n = 0; n + 1 < s.k.size(); ++n)
    s.gaps.push_back(s.k[n + 1] - s.k[n]);
  return s;
}

Spectrum solve_spectrum(const CavityParams& params, double tol) {
  return solve_spectrum(params.chi0, params.boundary_potential(),
                        params.n_modes, tol);
}

std::vector<GapRow> gap_profile(double chi0, const std::vector<double>& b0_grid,
                                int n_modes, double tol) {
  if (b0_grid.empty()) throw ConfigError("b0 grid is empty");
  std::vector<GapRow> rows;
  rows.reserve(b0_grid.size() * static_cast<std::size_t>(n_modes));
  for (double b0 : b0_grid) {
    Spectrum s;
    try {
      s = solve_spectrum(chi0, b0, n_modes, tol);
    } catch (const SpectrumError& e) {
      std::ostringstream os;
      os.precision(17);
      os << "b0=" << b0 << ": " << e.what();
      throw SpectrumError(os.str());
    }
    for (std::size_t n = 0; n < s.size(); ++n)
      rows.push_back({b0, static_cast<int>(n + 1), s.k[n], s.masses[n],
                      n < s.gaps.size()
                          ? s.gaps[n]
                          : std::numeric_limits<double>::quiet_NaN()});
  }
  return rows;
}

std::string to_string(const Resonance& r) {
  std::ostringstream os;
  switch (r.kind) {
    case ResonanceKind::self:
      os << "self(" << r.n << ")";
      break;
    case ResonanceKind::sum:
      os << "pair(" << r.n << "," << r.m << ",+)";
      break;
    case ResonanceKind::difference:
      os << "pair(" << r.n << "," << r.m << ",-)";
      break;
  }
  return os.str();
}

std::vector<Resonance> resonant_set(const Spectrum& spectrum, double omega,
                                    double match_tol) {
  if (!(match_tol > 0.0)) throw ConfigError("match tolerance must be positive");
  std::vector<Resonance> out;
  const auto& k = spectrum.k;
  for (std::size_t n = 0; n < k.size(); ++n) {
    const int nn = static_cast<int>(n + 1);
    const double self = omega - 2.0 * k[n];
    if (std::abs(self) < match_tol)
      out.push_back({ResonanceKind::self, nn, nn, self});
  }
  for (std::size_t n = 0; n < k.size(); ++n) {
    for (std::size_t m = n + 1; m < k.size(); ++m) {
      const int nn = static_cast<int>(n + 1);
      const int mm = static_cast<int>(m + 1);
      const double sum = omega - (k[n] + k[m]);
      const double diff = omega - (k[m] - k[n]);
      if (std::abs(sum) < match_tol)
        out.push_back({ResonanceKind::sum, nn, mm, sum});
      if (std::abs(diff) < match_tol)
        out.push_back({ResonanceKind::difference, nn, mm, diff});
    }
  }
  return out;
}

}  // namespace dce
