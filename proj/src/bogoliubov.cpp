#include "dce/bogoliubov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dce/errors.hpp"
#include "dce/parallel.hpp"

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

void check_window(const Spectrum& spectrum, double t_lo, double t_hi) {
  if (!((t_hi - t_lo) * spectrum.k1() >= 4.0 * kPi)) {
    std::ostringstream os;
    os << "projection window [" << t_lo << ", " << t_hi
       << "] is shorter than two periods of the slowest mode";
    throw ConfigError(os.str());
  }
}

struct ColumnResult {
  std::vector<double> particles;  // [sample * n + mode]
  std::vector<double> energy;
  std::vector<double> times;
  ModeCoefficients final;
  WindowedAmplitudes windowed;
  Trajectory trajectory;
};

}  // namespace

ModeCoefficients project_instantaneous(const SystemState& state,
                                       const Spectrum& spectrum) {
  ModeCoefficients c;
  c.t = state.t;
  const std::size_t n = state.size();
  c.alpha.resize(n);
  c.beta.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double k = spectrum.k[m];
    const double scale = std::sqrt(k / 2.0);
    const cplx phase = std::polar(1.0, k * state.t);
    const cplx iu = kI * state.u[m] / k;
    c.alpha[m] = scale * phase * (state.q[m] + iu);
    c.beta[m] = scale * std::conj(phase) * (state.q[m] - iu);
  }
  return c;
}

WindowAccumulator::WindowAccumulator(const Spectrum& spectrum, double t_lo,
                                     double t_hi)
    : k_(spectrum.k),
      t_lo_(t_lo),
      t_hi_(t_hi),
      sum_a_(spectrum.size(), 0.0),
      sum_b_(spectrum.size(), 0.0) {
  check_window(spectrum, t_lo, t_hi);
}

void WindowAccumulator::add(const SystemState& state) {
  if (state.t < t_lo_ || state.t > t_hi_) return;
  for (std::size_t m = 0; m < k_.size(); ++m) {
    const cplx phase = std::polar(1.0, k_[m] * state.t);
    sum_b_[m] += state.q[m] * phase;
    sum_a_[m] += state.q[m] * std::conj(phase);
  }
  ++count_;
}

WindowedAmplitudes WindowAccumulator::result() const {
  if (count_ == 0) throw ConfigError("projection window holds no samples");
  WindowedAmplitudes w;
  w.a.resize(k_.size());
  w.b.resize(k_.size());
  for (std::size_t m = 0; m < k_.size(); ++m) {
    const double scale = std::sqrt(2.0 * k_[m]) / static_cast<double>(count_);
    w.a[m] = scale * sum_a_[m];
    w.b[m] = scale * sum_b_[m];
  }
  return w;
}

WindowedAmplitudes project_windowed(const Trajectory& trajectory,
                                    const Spectrum& spectrum, double t_lo,
                                    double t_hi) {
  WindowAccumulator acc(spectrum, t_lo, t_hi);
  for (const auto& s : trajectory.samples) acc.add(s);
  return acc.result();
}

double BogoliubovMatrix::row_norm(int j) const {
  double s = 0.0;
  for (int m = 0; m < n; ++m) s += std::norm(a(j, m)) - std::norm(b(j, m));
  return s;
}

double BogoliubovMatrix::max_norm_defect() const {
  double worst = 0.0;
  for (int j = 0; j < rows; ++j)
    worst = std::max(worst, std::abs(row_norm(j) - expected_norm));
  return worst;
}

std::vector<double> ParticleHistory::mode_series(int n) const {
  std::vector<double> out;
  out.reserve(particles.size());
  for (const auto& row : particles) out.push_back(row.at(static_cast<std::size_t>(n - 1)));
  return out;
}

std::vector<double> ParticleHistory::total_series() const {
  std::vector<double> out;
  out.reserve(particles.size());
  for (const auto& row : particles) {
    double s = 0.0;
    for (double v : row) s += v;
    out.push_back(s);
  }
  return out;
}

ParticleHistory run_particles(const CavityParams& params,
                              const Spectrum& spectrum,
                              const RunOptions& options) {
  params.validate();
  const std::size_t n = spectrum.size();
  const double dt = options.dt > 0.0 ? options.dt
                                      : max_time_step(params, spectrum, kRunPointsPerPeriod);
  int stride = options.sample_stride;
  if (stride <= 0) {
    const double slow_period = 2.0 * kPi / spectrum.k1();
    stride = std::max(1, static_cast<int>(slow_period / 20.0 / dt));
  }
  const bool windowed =
      options.windowed &&
      (params.t_max - params.t_final) * spectrum.k1() >= 4.0 * kPi;

  const bool columns = options.init == InitMode::columns;
  const std::size_t runs = columns ? n : 1;
  std::vector<ColumnResult> results(runs);

  parallel_for(runs, options.workers, [&](std::size_t j) {
    ColumnResult& r = results[j];
    const SystemState start = columns ? in_mode_state(static_cast<int>(j + 1), spectrum)
                                      : vacuum_superposition_state(spectrum);
    std::optional<WindowAccumulator> acc;
    if (windowed) acc.emplace(spectrum, params.t_final, params.t_max);
    const bool keep_traj = options.trajectory_column == static_cast<int>(j + 1) ||
                           (!columns && options.trajectory_column > 0);
    long counter = 0;
    auto record = [&](const SystemState& s) {
      const auto c = project_instantaneous(s, spectrum);
      for (std::size_t m = 0; m < n; ++m) r.particles.push_back(std::norm(c.beta[m]));
      r.energy.push_back(total_quadratic_energy(s, spectrum));
      r.times.push_back(s.t);
      if (keep_traj) r.trajectory.samples.push_back(s);
    };
    SystemState last;
    try {
      integrate(start, params, spectrum, dt, [&](const SystemState& s) {
        if (counter++ % stride == 0) record(s);
        if (acc) acc->add(s);
        last = s;
      });
    } catch (const IntegrationError& e) {
      throw IntegrationError("column " + std::to_string(j + 1) + ": " + e.what());
    }
    if (r.times.back() < last.t) record(last);
    r.final = project_instantaneous(last, spectrum);
    if (acc) r.windowed = acc->result();
  });

  ParticleHistory h;
  h.dt = dt;
  h.t = results.front().times;
  const std::size_t samples = h.t.size();
  h.particles.assign(samples, std::vector<double>(n, 0.0));
  h.energy.assign(samples, 0.0);
  for (const auto& r : results) {
    for (std::size_t s = 0; s < samples; ++s) {
      for (std::size_t m = 0; m < n; ++m) h.particles[s][m] += r.particles[s * n + m];
      h.energy[s] += r.energy[s];
    }
  }

  BogoliubovMatrix& bm = h.final;
  bm.rows = static_cast<int>(runs);
  bm.n = static_cast<int>(n);
  bm.expected_norm = columns ? 1.0 : static_cast<double>(n);
  bm.alpha.reserve(runs * n);
  bm.beta.reserve(runs * n);
  bm.particles.assign(n, 0.0);
  for (const auto& r : results) {
    for (std::size_t m = 0; m < n; ++m) {
      bm.alpha.push_back(r.final.alpha[m]);
      bm.beta.push_back(r.final.beta[m]);
      bm.particles[m] += std::norm(r.final.beta[m]);
    }
  }
  if (windowed) {
    h.windowed_particles.assign(n, 0.0);
    for (const auto& r : results)
      for (std::size_t m = 0; m < n; ++m) h.windowed_particles[m] += std::norm(r.windowed.a[m]);
  }
  for (auto& r : results)
    if (!r.trajectory.samples.empty()) h.trajectory = std::move(r.trajectory);
  return h;
}

BogoliubovMatrix bogoliubov_matrix(const CavityParams& params,
                                   const Spectrum& spectrum, double dt,
                                   int workers) {
  params.validate();
  const std::size_t n = spectrum.size();
  BogoliubovMatrix bm;
  bm.rows = static_cast<int>(n);
  bm.n = static_cast<int>(n);
  bm.alpha.assign(n * n, 0.0);
  bm.beta.assign(n * n, 0.0);
  parallel_for(n, workers, [&](std::size_t j) {
    SystemState last;
    try {
      integrate(in_mode_state(static_cast<int>(j + 1), spectrum), params, spectrum,
                dt, [&](const SystemState& s) { last = s; });
    } catch (const IntegrationError& e) {
      throw IntegrationError("column " + std::to_string(j + 1) + ": " + e.what());
    }
    const auto c = project_instantaneous(last, spectrum);
    std::copy(c.alpha.begin(), c.alpha.end(), bm.alpha.begin() + static_cast<long>(j * n));
    std::copy(c.beta.begin(), c.beta.end(), bm.beta.begin() + static_cast<long>(j * n));
  });
  bm.particles.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t m = 0; m < n; ++m) bm.particles[m] += std::norm(bm.beta[j * n + m]);
  return bm;
}

}  // namespace dce
