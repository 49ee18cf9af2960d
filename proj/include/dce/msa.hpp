#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dce/spectrum.hpp"
#include "dce/types.hpp"

namespace dce {

/// Gamma_n = k1^2 cos^2(k_n d) / (2 k_n M_n). The growth rate of |B_n|^2 under
/// single-mode resonance is alpha Gamma_n.
double self_coefficient(const Spectrum& spectrum, int n);

/// Gamma_nm = k1^2 cos(k_n d) cos(k_m d) / (4 sqrt(k_n k_m M_n M_m)).
double pair_coefficient(const Spectrum& spectrum, int n, int m);

/// lambda_n = alpha k1^2 cos^2(k_n d) / (2 k_n M_n), for drive omega = 2 k_n.
double single_mode_rate(int n, const Spectrum& spectrum, double alpha);

/// The four roots (1/2)(+-g_self +- sqrt(g_self^2 - 4 g_pair^2)).
std::array<cplx, 4> pair_roots(double g_self, double g_pair);

struct PairRates {
  double gamma_self = 0.0;  // Gamma_j
  double gamma_pair = 0.0;  // Gamma_jl
  std::array<cplx, 4> roots{};
  double slope = 0.0;  // 2 alpha max Re Gamma, for log|B|^2 of both modes
  double oscillation = 0.0;  // alpha |Im Gamma| of the dominant root
};

/// Two-mode resonance with omega = 2 k_j and k_l close to 3 k_j.
PairRates coupled_pair_rates(int j, int l, const Spectrum& spectrum,
                             double alpha);

/// Linear slow-flow system over tau = alpha t for the variables
/// (A_1, B_1, ..., A_N, B_N); the resonance delta functions are realised as
/// indicators over resonant_set(). The self-resonant entry is Gamma_n/2, which
/// makes |B_n|^2 grow as exp(alpha Gamma_n t).
struct SlowFlowSystem {
  int n = 0;
  std::vector<double> matrix;  // row-major (2n) x (2n)

  double at(int r, int c) const {
    return matrix[static_cast<std::size_t>(r * 2 * n + c)];
  }
};

SlowFlowSystem slow_flow_system(const Spectrum& spectrum, double omega,
                                double match_tol = kDefaultMatchTolerance);

struct SlowFlowTrajectory {
  std::vector<double> tau;
  std::vector<std::vector<cplx>> a;  // [sample][mode]
  std::vector<std::vector<cplx>> b;
};

/// Integrates the slow flow from A = 0 and B = `initial_b` (default: in-mode
/// 1, i.e. B_1 = 1) up to tau_max with `steps` RK4 steps.
SlowFlowTrajectory slow_flow_evolve(const Spectrum& spectrum, double omega,
                                    double match_tol, double tau_max,
                                    std::vector<cplx> initial_b = {},
                                    int steps = 2000);

enum class Regime {
  single_mode,
  finite_pair,
  equidistant_weak,
  equidistant_strong,
  off_resonant,
};

std::string to_string(Regime r);

/// Expected growth law for each regime, in words.
std::string growth_law(Regime r);

struct RegimeOptions {
  double match_tol = kDefaultMatchTolerance;
  // Amplitude proxy above which the equidistant case counts as strong.
  double strong_threshold = 0.5;
  // Modulation depth, when known; the proxy is then b0 * epsilon.
  std::optional<double> epsilon;
  // Gaps within this relative spread of each other (and of omega) count as
  // an equidistant ladder.
  double gap_spread = 0.05;
  int ladder_modes = 4;
};

struct RegimeReport {
  Regime regime = Regime::off_resonant;
  std::vector<Resonance> resonances;
  double amplitude_proxy = 0.0;
  bool equidistant = false;
};

RegimeReport classify_regime(const Spectrum& spectrum, double omega,
                             double alpha, const RegimeOptions& options = {});

struct MsaPrediction {
  RegimeReport report;
  std::vector<int> modes;  // 1-based modes carrying a rate
  std::vector<double> rates;
  std::optional<PairRates> pair;
};

MsaPrediction predict(const Spectrum& spectrum, double omega, double alpha,
                      const RegimeOptions& options = {});

std::string format_prediction(const MsaPrediction& prediction);

}  // namespace dce
