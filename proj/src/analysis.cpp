#include "dce/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dce/errors.hpp"
#include "dce/parallel.hpp"

namespace dce {

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double rms = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit abscissae are all equal");
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (l.intercept + l.slope * x[i]);
    ssr += r * r;
  }
  l.rms = std::sqrt(ssr / n);
  l.stderr_slope = std::sqrt(ssr / (n - 2.0) / sxx);
  return l;
}

GrowthFit fit(GrowthModel model, std::span<const double> t,
              std::span<const double> y, double t_lo, double t_hi) {
  if (t.size() != y.size()) throw FitError("time and value series differ in length");
  if (!(t_hi > t_lo)) throw FitError("fit window is empty");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(y[i] > 0.0)) {
      std::ostringstream os;
      os << "non-positive value " << y[i] << " at t=" << t[i] << " inside the fit window";
      throw FitError(os.str());
    }
    if (model == GrowthModel::power_law && !(t[i] > 0.0))
      throw FitError("power-law fit needs t > 0");
    xs.push_back(model == GrowthModel::power_law ? std::log(t[i]) : t[i]);
    ys.push_back(std::log(y[i]));
  }
  if (xs.size() < kMinFitSamples) {
    std::ostringstream os;
    os << "only " << xs.size() << " samples in the fit window [" << t_lo << ", " << t_hi
       << "], need " << kMinFitSamples;
    throw FitError(os.str());
  }
  const Line l = least_squares(xs, ys);
  GrowthFit f;
  f.model = model;
  f.slope = l.slope;
  f.stderr_slope = l.stderr_slope;
  f.intercept = l.intercept;
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.residual_rms = l.rms;
  f.samples = xs.size();
  return f;
}

}  // namespace

std::string to_string(GrowthModel m) {
  return m == GrowthModel::exponential ? "exponential" : "power-law";
}

GrowthFit fit_exponential(std::span<const double> t, std::span<const double> y,
                          double t_lo, double t_hi) {
  return fit(GrowthModel::exponential, t, y, t_lo, t_hi);
}

GrowthFit fit_power_law(std::span<const double> t, std::span<const double> y,
                        double t_lo, double t_hi) {
  return fit(GrowthModel::power_law, t, y, t_lo, t_hi);
}

FitWindow default_fit_window(const CavityParams& params) {
  return {0.2 * params.t_final, params.t_final};
}

std::vector<std::size_t> find_peaks(const std::vector<SweepPoint>& points) {
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const auto& p = points[i];
    if (!p.ok || !points[i - 1].ok || !points[i + 1].ok) continue;
    if (p.total > points[i - 1].total && p.total >= points[i + 1].total)
      peaks.push_back(i);
  }
  return peaks;
}

SweepResult sweep_drive_frequency(const CavityParams& base, const Spectrum& spectrum,
                                  std::vector<double> omega_grid, double dt,
                                  int workers) {
  if (omega_grid.empty()) throw ConfigError("drive frequency grid is empty");
  std::sort(omega_grid.begin(), omega_grid.end());
  omega_grid.erase(std::unique(omega_grid.begin(), omega_grid.end()), omega_grid.end());
  SweepResult result;
  result.points.resize(omega_grid.size());
  parallel_for(omega_grid.size(), workers, [&](std::size_t i) {
    SweepPoint& pt = result.points[i];
    pt.omega = omega_grid[i];
    try {
      CavityParams p = base;
      p.omega_drive = pt.omega;
      p.t_max = p.t_final;
      const double step = dt > 0.0 ? std::min(dt, max_time_step(p, spectrum))
                                   : max_time_step(p, spectrum, kRunPointsPerPeriod);
      const auto bm = bogoliubov_matrix(p, spectrum, step, 1);
      pt.per_mode = bm.particles;
      pt.total = 0.0;
      for (double v : bm.particles) pt.total += v;
    } catch (const Error& e) {
      pt.ok = false;
      pt.error = e.what();
    }
  });
  result.peaks = find_peaks(result.points);
  return result;
}

double dominant_frequency(std::span<const double> t, std::span<const double> y,
                          double w_lo, double w_hi, int grid) {
  if (t.size() != y.size() || t.size() < kMinFitSamples)
    throw FitError("too few samples for a frequency estimate");
  if (!(w_hi > w_lo) || !(w_lo > 0.0) || grid < 2)
    throw FitError("invalid frequency search range");
  std::vector<double> x(t.begin(), t.end()), r(y.begin(), y.end());
  const Line trend = least_squares(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= trend.intercept + trend.slope * x[i];

  double best_w = w_lo, best_power = -1.0;
  for (int g = 0; g < grid; ++g) {
    const double w = w_lo + (w_hi - w_lo) * g / (grid - 1);
    // Two-column least squares on cos and sin.
    double cc = 0.0, ss = 0.0, cs = 0.0, yc = 0.0, ys = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double c = std::cos(w * x[i]);
      const double s = std::sin(w * x[i]);
      cc += c * c;
      ss += s * s;
      cs += c * s;
      yc += r[i] * c;
      ys += r[i] * s;
    }
    const double det = cc * ss - cs * cs;
    if (!(det > 0.0)) continue;
    const double a = (yc * ss - ys * cs) / det;
    const double b = (ys * cc - yc * cs) / det;
    const double power = a * yc + b * ys;
    if (power > best_power) {
      best_power = power;
      best_w = w;
    }
  }
  return best_w;
}

Comparison compare_with_msa(const CavityParams& params, const Spectrum& spectrum,
                            const CompareOptions& options) {
  const auto history = run_particles(params, spectrum, options.run);
  return compare_with_msa(params, spectrum, history, options);
}

Comparison compare_with_msa(const CavityParams& params, const Spectrum& spectrum,
                            const ParticleHistory& history,
                            const CompareOptions& options) {
  Comparison cmp;
  const double alpha = params.drive_strength(spectrum.k1());
  const auto pred = predict(spectrum, params.omega_drive, alpha, options.regime);
  cmp.regime = pred.report;
  const bool analytic = pred.report.regime == Regime::single_mode ||
                        pred.report.regime == Regime::finite_pair;
  if (!analytic || pred.modes.empty()) {
    cmp.has_oracle = false;
    cmp.note = "no analytic oracle for regime " + to_string(pred.report.regime);
    return cmp;
  }
  cmp.has_oracle = true;
  const FitWindow win = options.window.value_or(default_fit_window(params));
  for (std::size_t i = 0; i < pred.modes.size(); ++i) {
    const int n = pred.modes[i];
    const auto series = history.mode_series(n);
    const auto f = fit_exponential(history.t, series, win.lo, win.hi);
    cmp.fits.push_back(f);
    cmp.fit_modes.push_back(n);
    const double ana = pred.rates[i];
    cmp.rows.push_back({"slope mode " + std::to_string(n), f.slope, ana,
                        ana != 0.0 ? std::abs(f.slope - ana) / std::abs(ana)
                                   : std::abs(f.slope)});
  }
  if (pred.pair && pred.pair->oscillation > 0.0) {
    // The oscillation shows most clearly in the weaker partner.
    const int l = pred.modes.back();
    const auto series = history.mode_series(l);
    std::vector<double> ts, logs;
    for (std::size_t s = 0; s < history.t.size(); ++s) {
      if (history.t[s] < win.lo || history.t[s] > win.hi || !(series[s] > 0.0)) continue;
      ts.push_back(history.t[s]);
      logs.push_back(std::log(series[s]));
    }
    const double w_ana = pred.pair->oscillation;
    // Frequencies with fewer than two cycles in the window are not
    // resolvable; the fundamental of the window itself must stay out of band.
    const double span = ts.empty() ? 0.0 : ts.back() - ts.front();
    const double w_lo = std::max(0.25 * w_ana, span > 0.0 ? 4.0 * std::numbers::pi / span : 0.0);
    const double w_hi = 4.0 * w_ana;
    const double w_num = w_lo < w_hi && ts.size() >= kMinFitSamples
                             ? dominant_frequency(ts, logs, w_lo, w_hi)
                             : std::numeric_limits<double>::quiet_NaN();
    cmp.rows.push_back({"oscillation mode " + std::to_string(l), w_num, w_ana,
                        std::abs(w_num - w_ana) / w_ana});
  }
  return cmp;
}

}  // namespace dce
