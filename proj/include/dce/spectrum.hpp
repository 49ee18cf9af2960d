#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dce/params.hpp"

namespace dce {

/// Eigenfrequencies k_n d of the static cavity, ordered and positive.
struct Spectrum {
  double chi0 = 0.0;
  double b0 = 0.0;
  std::vector<double> k;
  std::vector<double> masses;
  std::vector<double> gaps;  // k[n+1] - k[n], one shorter than k

  std::size_t size() const { return k.size(); }
  double k1() const { return k.front(); }

  /// cos(k_n d) / sqrt(M_n): the weight of mode n in the boundary coupling.
  std::vector<double> coupling_weights() const;
};

inline constexpr double kDefaultRootTolerance = 1e-6;

/// g(kd) = kd tan(kd) + chi0 kd^2 - b0.
double boundary_residual(double kd, double chi0, double b0);

double mode_mass(double kd, double chi0);

/// Lowest `n_modes` positive roots of the static boundary condition.
///
/// The function g is monotone between consecutive zeros and poles of tan, so
/// every quarter-period interval (m pi/2, (m+1) pi/2) holds at most one root.
/// Each bracketed root is refined with Newton steps on the pole-free form
/// kd sin(kd) + (chi0 kd^2 - b0) cos(kd), falling back to bisection whenever a
/// step leaves the bracket. Throws SpectrumError on non-convergence or when
/// the residual |g| stays above `tol`.
Spectrum solve_spectrum(double chi0, double b0, int n_modes,
                        double tol = kDefaultRootTolerance);
Spectrum solve_spectrum(const CavityParams& params,
                        double tol = kDefaultRootTolerance);

struct GapRow {
  double b0;
  int n;  // 1-based mode number
  double k;
  double mass;
  double gap;  // NaN for the last mode
};

/// Solves the spectrum at every b0 of the grid. Solver failures are rethrown
/// as SpectrumError naming the offending b0.
std::vector<GapRow> gap_profile(double chi0, const std::vector<double>& b0_grid,
                                int n_modes,
                                double tol = kDefaultRootTolerance);

enum class ResonanceKind { self, sum, difference };

struct Resonance {
  ResonanceKind kind;
  int n;  // 1-based; for self entries m == n
  int m;
  double detuning;  // omega - (matched combination)
};

std::string to_string(const Resonance& r);

inline constexpr double kDefaultMatchTolerance = 1e-2;

/// All n with |omega - 2 k_n| < tol and all pairs n < m with
/// |omega - (k_n + k_m)| < tol or |omega - (k_m - k_n)| < tol.
std::vector<Resonance> resonant_set(const Spectrum& spectrum, double omega,
                                    double match_tol = kDefaultMatchTolerance);

}  // namespace dce
