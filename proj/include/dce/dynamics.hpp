#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "dce/params.hpp"
#include "dce/spectrum.hpp"
#include "dce/types.hpp"

namespace dce {

/// Mode amplitudes q_n (mass-rescaled) and velocities u_n = dq_n/dt.
struct SystemState {
  double t = 0.0;
  std::vector<cplx> q;
  std::vector<cplx> u;

  std::size_t size() const { return q.size(); }
};

struct Trajectory {
  std::vector<SystemState> samples;
};

/// Instantaneous coefficients of  q_n'' + omega_n^2(t) q_n = sum_{m!=n} S_nm q_m.
struct DriveCoefficients {
  std::vector<double> omega_sq;
  std::vector<double> omega;  // sqrt(omega_sq); NaN if omega_sq < 0
  std::vector<double> coupling;  // row-major n x n, zero diagonal

  double S(std::size_t n, std::size_t m) const {
    return coupling[n * omega.size() + m];
  }
};

/// Drive profile g(t) = alpha k1^2 sin(omega t) inside [0, t_F], zero outside.
///
/// The mode equations read
///   q_n'' + k_n^2 q_n = g(t) w_n sum_m w_m q_m,   w_n = cos(k_n d)/sqrt(M_n),
/// so omega_n^2 = k_n^2 - g w_n^2 and S_nm = g w_n w_m.
DriveCoefficients drive_at(const CavityParams& params, const Spectrum& spectrum,
                           double t);

/// In-mode j (1-based): q_j = 1/sqrt(2k_j), u_j = -i sqrt(k_j/2), rest zero.
SystemState in_mode_state(int j, const Spectrum& spectrum);

/// Every in-mode excited at once (figure-reproduction mode).
SystemState vacuum_superposition_state(const Spectrum& spectrum);

inline constexpr int kDefaultPointsPerPeriod = 40;
// Resolution used when a run does not set dt: long resonant runs need it to
// keep the Bogoliubov norm within 1e-4.
inline constexpr int kRunPointsPerPeriod = 200;

/// Largest admissible step: min(2 pi/k_max, 2 pi/omega) / points_per_period.
double max_time_step(const CavityParams& params, const Spectrum& spectrum,
                     int points_per_period = kDefaultPointsPerPeriod);

using StepObserver = std::function<void(const SystemState&)>;

/// Fixed-step RK4 from t = 0 to t_max, calling `observe` at t = 0 and after
/// every step. The step is shrunk so that t_F and t_max fall on step
/// boundaries; the drive is on for steps inside [0, t_F] and off afterwards.
/// Throws ConfigError if dt exceeds max_time_step() and IntegrationError on a
/// non-finite state.
void integrate(const SystemState& state0, const CavityParams& params,
               const Spectrum& spectrum, double dt, const StepObserver& observe);

/// Trajectory with every `sample_stride`-th step kept; the final time is
/// always included.
Trajectory evolve(const SystemState& state0, const CavityParams& params,
                  const Spectrum& spectrum, double dt, int sample_stride = 1);

/// 1/2 sum_n (|u_n|^2 + k_n^2 |q_n|^2) with static frequencies.
double total_quadratic_energy(const SystemState& state, const Spectrum& spectrum);

/// sum_n (q^a_n u^b_n - u^a_n q^b_n), conserved by the symmetric flow.
cplx wronskian(const SystemState& a, const SystemState& b);

}  // namespace dce
