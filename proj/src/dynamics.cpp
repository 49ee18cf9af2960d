#include "dce/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dce/errors.hpp"

namespace dce {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Right-hand side in the rank-one form
//   u' = -k^2 q + g w (w . q),
// which equals -omega^2 q + S q with the coefficients of drive_at().
struct ModeSystem {
  std::vector<double> k_sq;
  std::vector<double> w;
  double amplitude = 0.0;  // alpha k1^2
  double omega = 0.0;

  void accel(double t, bool drive_on, const std::vector<cplx>& q,
             std::vector<cplx>& out) const {
    const std::size_t n = q.size();
    cplx proj = 0.0;
    double g = 0.0;
    if (drive_on && amplitude != 0.0) {
      g = amplitude * std::sin(omega * t);
      for (std::size_t i = 0; i < n; ++i) proj += w[i] * q[i];
      proj *= g;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = -k_sq[i] * q[i] + w[i] * proj;
  }
};

ModeSystem make_system(const CavityParams& params, const Spectrum& spectrum) {
  ModeSystem sys;
  sys.k_sq.reserve(spectrum.size());
  for (double k : spectrum.k) sys.k_sq.push_back(k * k);
  sys.w = spectrum.coupling_weights();
  const double k1 = spectrum.k1();
  sys.amplitude = params.drive_strength(k1) * k1 * k1;
  sys.omega = params.omega_drive;
  return sys;
}

bool finite_state(const SystemState& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!std::isfinite(s.q[i].real()) || !std::isfinite(s.q[i].imag()) ||
        !std::isfinite(s.u[i].real()) || !std::isfinite(s.u[i].imag()))
      return false;
  return true;
}

}  // namespace

DriveCoefficients drive_at(const CavityParams& params, const Spectrum& spectrum,
                           double t) {
  const std::size_t n = spectrum.size();
  const double k1 = spectrum.k1();
  const bool on = t >= 0.0 && t <= params.t_final;
  const double g = on ? params.drive_strength(k1) * k1 * k1 *
                            std::sin(params.omega_drive * t)
                      : 0.0;
  const auto w = spectrum.coupling_weights();
  DriveCoefficients d;
  d.omega_sq.resize(n);
  d.omega.resize(n);
  d.coupling.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    d.omega_sq[i] = spectrum.k[i] * spectrum.k[i] - g * w[i] * w[i];
    d.omega[i] = d.omega_sq[i] >= 0.0 ? std::sqrt(d.omega_sq[i])
                                      : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < i; ++j)
      d.coupling[i * n + j] = d.coupling[j * n + i] = g * w[i] * w[j];
  }
  return d;
}

SystemState in_mode_state(int j, const Spectrum& spectrum) {
  const int n = static_cast<int>(spectrum.size());
  if (j < 1 || j > n)
    throw ConfigError("in-mode index " + std::to_string(j) + " outside 1.." +
                      std::to_string(n));
  SystemState s;
  s.q.assign(spectrum.size(), 0.0);
  s.u.assign(spectrum.size(), 0.0);
  const double k = spectrum.k[static_cast<std::size_t>(j - 1)];
  s.q[static_cast<std::size_t>(j - 1)] = 1.0 / std::sqrt(2.0 * k);
  s.u[static_cast<std::size_t>(j - 1)] = cplx(0.0, -std::sqrt(k / 2.0));
  return s;
}

SystemState vacuum_superposition_state(const Spectrum& spectrum) {
  SystemState s;
  s.q.reserve(spectrum.size());
  s.u.reserve(spectrum.size());
  for (double k : spectrum.k) {
    s.q.emplace_back(1.0 / std::sqrt(2.0 * k));
    s.u.emplace_back(0.0, -std::sqrt(k / 2.0));
  }
  return s;
}

double max_time_step(const CavityParams& params, const Spectrum& spectrum,
                     int points_per_period) {
  double fastest = spectrum.k.back();
  if (params.drive_strength(spectrum.k1()) != 0.0)
    fastest = std::max(fastest, params.omega_drive);
  return kTwoPi / fastest / points_per_period;
}

void integrate(const SystemState& state0, const CavityParams& params,
               const Spectrum& spectrum, double dt, const StepObserver& observe) {
  if (state0.q.size() != spectrum.size() || state0.u.size() != spectrum.size())
    throw ConfigError("state size does not match the number of modes");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const double dt_max = max_time_step(params, spectrum);
  if (dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the resolution limit " << dt_max;
    throw ConfigError(os.str());
  }

  const ModeSystem sys = make_system(params, spectrum);
  const std::size_t n = spectrum.size();
  SystemState s = state0;
  s.t = 0.0;
  if (!finite_state(s)) throw IntegrationError("initial state is not finite");
  observe(s);

  std::vector<cplx> k1q(n), k1u(n), k2q(n), k2u(n), k3q(n), k3u(n), k4q(n),
      k4u(n), tmp(n);

  auto run_segment = [&](double t0, double t1, bool drive_on) {
    if (!(t1 > t0)) return;
    const long steps = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
    const double h = (t1 - t0) / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      // k1
      k1q = s.u;
      sys.accel(t, drive_on, s.q, k1u);
      // k2
      for (std::size_t m = 0; m < n; ++m) tmp[m] = s.q[m] + 0.5 * h * k1q[m];
      for (std::size_t m = 0; m < n; ++m) k2q[m] = s.u[m] + 0.5 * h * k1u[m];
      sys.accel(t + 0.5 * h, drive_on, tmp, k2u);
      // k3
      for (std::size_t m = 0; m < n; ++m) tmp[m] = s.q[m] + 0.5 * h * k2q[m];
      for (std::size_t m = 0; m < n; ++m) k3q[m] = s.u[m] + 0.5 * h * k2u[m];
      sys.accel(t + 0.5 * h, drive_on, tmp, k3u);
      // k4
      for (std::size_t m = 0; m < n; ++m) tmp[m] = s.q[m] + h * k3q[m];
      for (std::size_t m = 0; m < n; ++m) k4q[m] = s.u[m] + h * k3u[m];
      sys.accel(t + h, drive_on, tmp, k4u);

      for (std::size_t m = 0; m < n; ++m) {
        s.q[m] += h / 6.0 * (k1q[m] + 2.0 * k2q[m] + 2.0 * k3q[m] + k4q[m]);
        s.u[m] += h / 6.0 * (k1u[m] + 2.0 * k2u[m] + 2.0 * k3u[m] + k4u[m]);
      }
      s.t = (i + 1 == steps) ? t1 : t0 + static_cast<double>(i + 1) * h;
      if (!finite_state(s)) {
        std::ostringstream os;
        os << "state became non-finite at t=" << s.t;
        throw IntegrationError(os.str());
      }
      observe(s);
    }
  };

  run_segment(0.0, params.t_final, true);
  run_segment(params.t_final, params.t_max, false);
}

Trajectory evolve(const SystemState& state0, const CavityParams& params,
                  const Spectrum& spectrum, double dt, int sample_stride) {
  if (sample_stride < 1) throw ConfigError("sample stride must be >= 1");
  Trajectory traj;
  long counter = 0;
  SystemState last;
  integrate(state0, params, spectrum, dt, [&](const SystemState& s) {
    if (counter++ % sample_stride == 0) traj.samples.push_back(s);
    last = s;
  });
  if (traj.samples.back().t < last.t) traj.samples.push_back(last);
  return traj;
}

double total_quadratic_energy(const SystemState& state, const Spectrum& spectrum) {
  double e = 0.0;
  for (std::size_t n = 0; n < state.size(); ++n)
    e += std::norm(state.u[n]) + spectrum.k[n] * spectrum.k[n] * std::norm(state.q[n]);
  return 0.5 * e;
}

cplx wronskian(const SystemState& a, const SystemState& b) {
  cplx w = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) w += a.q[n] * b.u[n] - a.u[n] * b.q[n];
  return w;
}

}  // namespace dce
