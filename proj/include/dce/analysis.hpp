#pragma once

#include <span>
#include <string>
#include <vector>

#include "dce/bogoliubov.hpp"
#include "dce/msa.hpp"

namespace dce {

enum class GrowthModel { exponential, power_law };

std::string to_string(GrowthModel m);

/// Least-squares line through (t, log y) or (log t, log y).
struct GrowthFit {
  GrowthModel model = GrowthModel::exponential;
  double slope = 0.0;  // rate or exponent
  double stderr_slope = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double residual_rms = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinFitSamples = 10;

/// Throws FitError if fewer than kMinFitSamples points fall in [t_lo, t_hi]
/// or any y there is not positive.
GrowthFit fit_exponential(std::span<const double> t, std::span<const double> y,
                          double t_lo, double t_hi);
GrowthFit fit_power_law(std::span<const double> t, std::span<const double> y,
                        double t_lo, double t_hi);

/// Default fit window: the drive window minus its first 20 %.
struct FitWindow {
  double lo;
  double hi;
};
FitWindow default_fit_window(const CavityParams& params);

struct SweepPoint {
  double omega = 0.0;
  double total = 0.0;
  std::vector<double> per_mode;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // sorted by omega
  std::vector<std::size_t> peaks;  // indices of 3-point local maxima
};

/// For each omega runs the column evolutions up to t_F and records N(t_F).
/// Failed points are flagged and the sweep continues.
SweepResult sweep_drive_frequency(const CavityParams& base,
                                  const Spectrum& spectrum,
                                  std::vector<double> omega_grid, double dt,
                                  int workers = 1);

std::vector<std::size_t> find_peaks(const std::vector<SweepPoint>& points);

struct ComparisonRow {
  std::string quantity;
  double numerical = 0.0;
  double analytical = 0.0;
  double relative_deviation = 0.0;
};

struct Comparison {
  RegimeReport regime;
  bool has_oracle = false;
  std::string note;
  std::vector<ComparisonRow> rows;
  std::vector<GrowthFit> fits;
  std::vector<int> fit_modes;
};

struct CompareOptions {
  RunOptions run;
  RegimeOptions regime;
  std::optional<FitWindow> window;
};

/// Fits the particle-number growth of the resonant modes and sets it against
/// the multiple-scale rates. Regimes without an analytic rate produce a
/// comparison with has_oracle == false and no rows.
Comparison compare_with_msa(const CavityParams& params, const Spectrum& spectrum,
                            const CompareOptions& options);

/// Same, from an already computed history.
Comparison compare_with_msa(const CavityParams& params, const Spectrum& spectrum,
                            const ParticleHistory& history,
                            const CompareOptions& options);

/// Dominant angular frequency of a detrended series, by scanning a
/// least-squares sinusoid fit over [w_lo, w_hi].
double dominant_frequency(std::span<const double> t, std::span<const double> y,
                          double w_lo, double w_hi, int grid = 2000);

}  // namespace dce
