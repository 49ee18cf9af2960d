#pragma once

#include <vector>

#include "dce/dynamics.hpp"

namespace dce {

/// Coefficients of q_n(t) = (alpha_n e^{-i k_n t} + beta_n e^{+i k_n t}) / sqrt(2 k_n).
/// alpha is the positive-frequency (no-mixing) part; |beta_n|^2 counts quanta.
struct ModeCoefficients {
  double t = 0.0;
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
};

ModeCoefficients project_instantaneous(const SystemState& state,
                                       const Spectrum& spectrum);

/// Window-averaged amplitudes in the A/B labelling of the slow-flow ansatz
///   q_n = A_n e^{+i k_n t}/sqrt(2k_n) + B_n e^{-i k_n t}/sqrt(2k_n),
/// i.e. A_n plays the role of beta_n and B_n of alpha_n.
struct WindowedAmplitudes {
  std::vector<cplx> a;
  std::vector<cplx> b;
};

/// B_n = sqrt(2k_n) <q_n e^{+i k_n t}>, A_n = sqrt(2k_n) <q_n e^{-i k_n t}>,
/// averaged over the samples with t in [t_lo, t_hi]. Requires the window to
/// span at least two periods of the slowest mode, else ConfigError.
WindowedAmplitudes project_windowed(const Trajectory& trajectory,
                                    const Spectrum& spectrum, double t_lo,
                                    double t_hi);

/// Running window average, for integrations that do not keep a trajectory.
class WindowAccumulator {
 public:
  WindowAccumulator(const Spectrum& spectrum, double t_lo, double t_hi);
  void add(const SystemState& state);
  WindowedAmplitudes result() const;
  std::size_t count() const { return count_; }

 private:
  std::vector<double> k_;
  double t_lo_;
  double t_hi_;
  std::vector<cplx> sum_a_;
  std::vector<cplx> sum_b_;
  std::size_t count_ = 0;
};

/// Row j holds the evolution of in-mode j: alpha(j, n), beta(j, n).
/// A superposition run stores a single row whose norm is n instead of 1.
struct BogoliubovMatrix {
  int rows = 0;
  int n = 0;
  double expected_norm = 1.0;
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
  std::vector<double> particles;  // N_n = sum_j |beta(j, n)|^2

  cplx a(int j, int m) const { return alpha[static_cast<std::size_t>(j * n + m)]; }
  cplx b(int j, int m) const { return beta[static_cast<std::size_t>(j * n + m)]; }

  /// sum_n (|alpha_jn|^2 - |beta_jn|^2), equal to 1 for a bosonic transformation.
  double row_norm(int j) const;
  double max_norm_defect() const;
};

BogoliubovMatrix bogoliubov_matrix(const CavityParams& params,
                                   const Spectrum& spectrum, double dt,
                                   int workers = 1);

enum class InitMode { columns, superposition };

struct RunOptions {
  double dt = 0.0;  // 0 selects max_time_step(.., kRunPointsPerPeriod)
  int sample_stride = 0;  // 0 selects about 20 samples per slowest period
  InitMode init = InitMode::columns;
  int workers = 1;
  bool windowed = true;  // also run the windowed estimator over [t_F, t_max]
  int trajectory_column = 0;  // 1-based column to keep as a full trajectory
};

/// Particle numbers of one experiment: the instantaneous projection at every
/// sample plus the final Bogoliubov data and the windowed estimate.
struct ParticleHistory {
  std::vector<double> t;
  std::vector<std::vector<double>> particles;  // [sample][mode]
  std::vector<double> energy;  // summed over runs
  BogoliubovMatrix final;
  std::vector<double> windowed_particles;  // sum_j |A_jn|^2, empty if disabled
  Trajectory trajectory;  // only when trajectory_column > 0
  double dt = 0.0;

  std::vector<double> mode_series(int n) const;  // 1-based
  std::vector<double> total_series() const;
};

ParticleHistory run_particles(const CavityParams& params,
                              const Spectrum& spectrum,
                              const RunOptions& options);

}  // namespace dce
