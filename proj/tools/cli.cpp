#include "cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dce/analysis.hpp"
#include "dce/csv.hpp"
#include "dce/errors.hpp"

namespace dce::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string out = ".";
  // cavity
  double chi0 = 0.05;
  double b0 = 1.0;
  double alpha = 0.0;
  std::optional<double> v0, f0, epsilon;
  std::optional<double> omega;
  std::string resonance;
  double tf = 100.0;
  std::optional<double> tmax;
  int modes = 10;
  double tol = kDefaultRootTolerance;
  // integration
  double dt = 0.0;
  int points_per_period = kRunPointsPerPeriod;
  int stride = 0;
  std::string init = "columns";
  int workers = 1;
  int trajectory_column = 1;
  bool dump_matrix = false;
  // analysis
  double match_tol = kDefaultMatchTolerance;
  double strong_threshold = 0.5;
  std::optional<double> fit_lo, fit_hi;
  std::string fit_modes;
  // grids
  std::string b0_grid;
  bool b0_grid_set = false;
  std::string chi0_grid;
  std::string omega_grid;
};

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> out;
  auto bad = [&] { return ConfigError(std::string("malformed ") + what + ": '" + text + "'"); };
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':') throw bad();
    if (!(step > 0.0) || hi < lo) throw bad();
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw bad();
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  return out;
}

// Evaluates expressions such as "2k1", "k2-k1", "k1+k3" or "3.13" against
// the spectrum.
double eval_resonance(const std::string& expr, const Spectrum& spectrum) {
  auto bad = [&](const std::string& why) {
    return ConfigError("resonance '" + expr + "': " + why);
  };
  std::size_t i = 0;
  auto skip = [&] {
    while (i < expr.size() && std::isspace(static_cast<unsigned char>(expr[i]))) ++i;
  };
  auto number = [&]() -> std::optional<double> {
    skip();
    std::size_t j = i;
    while (j < expr.size() && (std::isdigit(static_cast<unsigned char>(expr[j])) || expr[j] == '.'))
      ++j;
    if (j == i) return std::nullopt;
    const double v = std::stod(expr.substr(i, j - i));
    i = j;
    return v;
  };
  auto term = [&]() -> double {
    const auto coef = number();
    skip();
    if (i < expr.size() && expr[i] == 'k') {
      ++i;
      std::size_t j = i;
      while (j < expr.size() && std::isdigit(static_cast<unsigned char>(expr[j]))) ++j;
      if (j == i) throw bad("missing mode index after k");
      const int n = std::stoi(expr.substr(i, j - i));
      i = j;
      if (n < 1 || static_cast<std::size_t>(n) > spectrum.size())
        throw bad("mode k" + std::to_string(n) + " outside the spectrum");
      return coef.value_or(1.0) * spectrum.k[static_cast<std::size_t>(n - 1)];
    }
    if (!coef) throw bad("expected a number or k<n>");
    return *coef;
  };
  double value = term();
  for (skip(); i < expr.size(); skip()) {
    const char op = expr[i++];
    if (op == '+')
      value += term();
    else if (op == '-')
      value -= term();
    else
      throw bad(std::string("unexpected '") + op + "'");
  }
  return std::abs(value);
}

struct Resolved {
  CavityParams params;
  Spectrum spectrum;
  RunOptions run;
  FitWindow window{};
};

Resolved resolve(const Options& o) {
  Resolved r;
  CavityParams& p = r.params;
  p.chi0 = o.chi0;
  p.b0 = o.b0;
  p.alpha = o.alpha;
  p.n_modes = o.modes;
  p.t_final = o.tf;
  p.t_max = o.tmax.value_or(o.tf);
  const int circuit_fields = (o.v0 ? 1 : 0) + (o.f0 ? 1 : 0) + (o.epsilon ? 1 : 0);
  if (circuit_fields != 0 && circuit_fields != 3)
    throw ConfigError("--v0, --f0 and --epsilon must be given together");
  if (circuit_fields == 3) p.circuit = CircuitDrive{*o.v0, *o.f0, *o.epsilon};
  if (!(o.tol > 0.0)) throw ConfigError("--tol must be > 0");
  if (!(o.match_tol > 0.0)) throw ConfigError("--match-tol must be > 0");
  if (o.points_per_period < kDefaultPointsPerPeriod)
    throw ConfigError("--ppp must be >= " + std::to_string(kDefaultPointsPerPeriod));
  if (o.workers < 1) throw ConfigError("--workers must be >= 1");
  if (o.dt < 0.0) throw ConfigError("--dt must be > 0");
  p.omega_drive = 0.0;
  p.validate();

  r.spectrum = solve_spectrum(p, o.tol);
  if (!o.resonance.empty() && o.omega)
    throw ConfigError("give either --omega or --resonance, not both");
  if (!o.resonance.empty()) p.omega_drive = eval_resonance(o.resonance, r.spectrum);
  if (o.omega) p.omega_drive = *o.omega;
  p.validate();

  r.run.dt = o.dt > 0.0 ? o.dt : max_time_step(p, r.spectrum, o.points_per_period);
  r.run.sample_stride = o.stride;
  if (o.init == "columns")
    r.run.init = InitMode::columns;
  else if (o.init == "superposition")
    r.run.init = InitMode::superposition;
  else
    throw ConfigError("--init must be columns or superposition");
  r.run.workers = o.workers;
  r.window = default_fit_window(p);
  if (o.fit_lo) r.window.lo = *o.fit_lo;
  if (o.fit_hi) r.window.hi = *o.fit_hi;
  if (!(r.window.hi > r.window.lo)) throw ConfigError("empty fit window");
  return r;
}

RegimeOptions regime_options(const Options& o, const CavityParams& p) {
  RegimeOptions ro;
  ro.match_tol = o.match_tol;
  ro.strong_threshold = o.strong_threshold;
  if (p.circuit) ro.epsilon = p.circuit->epsilon;
  return ro;
}

std::vector<std::string> header(const std::string& command, const Options& o,
                                const Resolved& r) {
  const CavityParams& p = r.params;
  std::vector<std::string> h;
  h.push_back("dce " + command);
  h.push_back(p.describe());
  h.push_back("alpha_resolved=" + format_number(p.drive_strength(r.spectrum.k1())) +
              (o.resonance.empty() ? "" : " resonance=" + o.resonance));
  h.push_back("dt=" + format_number(r.run.dt) + " init=" + o.init +
              " stride=" + std::to_string(o.stride) + " tol=" + format_number(o.tol) +
              " match_tol=" + format_number(o.match_tol) +
              " strong_threshold=" + format_number(o.strong_threshold));
  h.push_back("fit_window=" + format_number(r.window.lo) + ":" + format_number(r.window.hi));
  return h;
}

fs::path prepare_out(const Options& o) {
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("cannot create output directory '" + o.out + "'");
  return dir;
}

std::string column_suffix(double chi0) {
  std::string s = format_number(chi0);
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

int cmd_spectrum(const Options& o) {
  const Resolved r = resolve(o);
  const fs::path dir = prepare_out(o);
  const auto head = header("spectrum", o, r);
  const Spectrum& sp = r.spectrum;
  {
    CsvWriter w(dir / "spectrum.csv", head, {"n", "k_n", "M_n", "gap_n", "residual"});
    for (std::size_t i = 0; i < sp.size(); ++i) {
      w.cell(static_cast<int>(i + 1)).cell(sp.k[i]).cell(sp.masses[i]);
      if (i < sp.gaps.size())
        w.cell(sp.gaps[i]);
      else
        w.empty();
      w.cell(boundary_residual(sp.k[i], sp.chi0, sp.b0));
      w.end_row();
    }
  }

  std::vector<double> b0s{r.params.boundary_potential()};
  if (o.b0_grid_set) {
    b0s = parse_grid(o.b0_grid, "--b0-grid");
    if (b0s.empty()) throw ConfigError("--b0-grid is empty");
  }
  std::vector<double> chis{r.params.chi0};
  if (!o.chi0_grid.empty()) chis = parse_grid(o.chi0_grid, "--chi0-grid");

  for (const double chi : chis) {
    const auto rows = gap_profile(chi, b0s, r.params.n_modes, o.tol);
    const std::string name =
        o.chi0_grid.empty() ? "gaps.csv" : "gaps_chi0_" + column_suffix(chi) + ".csv";
    auto h = head;
    h.push_back("gap profile chi0=" + format_number(chi));
    CsvWriter w(dir / name, h, {"b0", "n", "k_n", "M_n", "gap_n"});
    for (const auto& row : rows) {
      w.cell(row.b0).cell(row.n).cell(row.k).cell(row.mass);
      if (std::isnan(row.gap))
        w.empty();
      else
        w.cell(row.gap);
      w.end_row();
    }
  }

  std::cout << "k_n d:";
  for (double k : sp.k) std::cout << ' ' << format_number(k);
  std::cout << '\n';
  return 0;
}

std::vector<int> requested_fit_modes(const Options& o, const Resolved& r,
                                     bool& explicit_request) {
  explicit_request = !o.fit_modes.empty();
  std::vector<int> modes;
  if (explicit_request) {
    for (double v : parse_grid(o.fit_modes, "--fit-modes")) {
      const int n = static_cast<int>(v);
      if (n != v || n < 1 || n > r.params.n_modes)
        throw ConfigError("--fit-modes entry out of range");
      modes.push_back(n);
    }
    return modes;
  }
  const auto pred = predict(r.spectrum, r.params.omega_drive,
                            r.params.drive_strength(r.spectrum.k1()), regime_options(o, r.params));
  return pred.modes;
}

void write_history(const fs::path& dir, const std::vector<std::string>& head,
                   const ParticleHistory& h, int n_modes) {
  std::vector<std::string> cols{"t"};
  for (int n = 1; n <= n_modes; ++n) cols.push_back("N_" + std::to_string(n));
  cols.push_back("N_total");
  cols.push_back("energy");
  CsvWriter w(dir / "particles.csv", head, cols);
  for (std::size_t s = 0; s < h.t.size(); ++s) {
    w.cell(h.t[s]);
    double total = 0.0;
    for (double v : h.particles[s]) {
      w.cell(v);
      total += v;
    }
    w.cell(total).cell(h.energy[s]);
    w.end_row();
  }
}

void write_bogoliubov(const fs::path& dir, const std::vector<std::string>& head,
                      const ParticleHistory& h, bool dump_matrix) {
  const BogoliubovMatrix& m = h.final;
  {
    CsvWriter w(dir / "bogoliubov.csv", head, {"n", "N_n", "re_beta_diag", "im_beta_diag"});
    for (int n = 0; n < m.n; ++n) {
      const cplx b = m.rows == m.n ? m.b(n, n) : m.b(0, n);
      w.cell(n + 1).cell(m.particles[static_cast<std::size_t>(n)]).cell(b.real()).cell(b.imag());
      w.end_row();
    }
  }
  if (!h.windowed_particles.empty()) {
    CsvWriter w(dir / "windowed.csv", head, {"n", "N_instantaneous", "N_windowed"});
    for (int n = 0; n < m.n; ++n) {
      const auto i = static_cast<std::size_t>(n);
      w.cell(n + 1).cell(m.particles[i]).cell(h.windowed_particles[i]);
      w.end_row();
    }
  }
  if (dump_matrix) {
    CsvWriter w(dir / "matrix.csv", head,
                {"j", "n", "re_alpha", "im_alpha", "re_beta", "im_beta"});
    for (int j = 0; j < m.rows; ++j)
      for (int n = 0; n < m.n; ++n) {
        w.cell(j + 1).cell(n + 1).cell(m.a(j, n).real()).cell(m.a(j, n).imag());
        w.cell(m.b(j, n).real()).cell(m.b(j, n).imag());
        w.end_row();
      }
  }
}

void write_trajectory(const fs::path& dir, const std::vector<std::string>& head,
                      const Trajectory& traj, int n_modes) {
  std::vector<std::string> cols{"t"};
  for (const char* v : {"q", "u"})
    for (int n = 1; n <= n_modes; ++n) {
      cols.push_back(std::string("re_") + v + "_" + std::to_string(n));
      cols.push_back(std::string("im_") + v + "_" + std::to_string(n));
    }
  CsvWriter w(dir / "trajectory.csv", head, cols);
  for (const auto& s : traj.samples) {
    w.cell(s.t);
    for (const auto* vec : {&s.q, &s.u})
      for (const cplx& z : *vec) w.cell(z.real()).cell(z.imag());
    w.end_row();
  }
}

int cmd_evolve(const Options& o) {
  Resolved r = resolve(o);
  const fs::path dir = prepare_out(o);
  const auto head = header("evolve", o, r);
  RunOptions run = r.run;
  if (o.trajectory_column < 0 || o.trajectory_column > r.params.n_modes)
    throw ConfigError("--trajectory-column out of range");
  run.trajectory_column = run.init == InitMode::columns ? o.trajectory_column
                                                         : (o.trajectory_column > 0 ? 1 : 0);
  const ParticleHistory h = run_particles(r.params, r.spectrum, run);

  write_history(dir, head, h, r.params.n_modes);
  write_bogoliubov(dir, head, h, o.dump_matrix);
  if (run.trajectory_column > 0) write_trajectory(dir, head, h.trajectory, r.params.n_modes);

  bool explicit_request = false;
  const auto modes = requested_fit_modes(o, r, explicit_request);
  CsvWriter w(dir / "fits.csv", head,
              {"mode", "model", "slope", "stderr", "window_lo", "window_hi"});
  for (const int n : modes) {
    const auto series = h.mode_series(n);
    for (const auto model : {GrowthModel::exponential, GrowthModel::power_law}) {
      try {
        const GrowthFit f = model == GrowthModel::exponential
                                ? fit_exponential(h.t, series, r.window.lo, r.window.hi)
                                : fit_power_law(h.t, series, r.window.lo, r.window.hi);
        w.cell(n).cell(to_string(model)).cell(f.slope).cell(f.stderr_slope);
        w.cell(f.t_lo).cell(f.t_hi);
        w.end_row();
        if (model == GrowthModel::exponential)
          std::cout << "mode " << n << " exponential slope " << format_number(f.slope)
                    << " +- " << format_number(f.stderr_slope) << '\n';
      } catch (const FitError&) {
        if (explicit_request) throw;
      }
    }
  }
  double total = 0.0;
  for (double v : h.final.particles) total += v;
  std::cout << "N_total(t_max) = " << format_number(total)
            << "  max norm defect = " << format_number(h.final.max_norm_defect()) << '\n';
  return 0;
}

int cmd_sweep(const Options& o) {
  const Resolved r = resolve(o);
  if (o.omega_grid.empty()) throw ConfigError("sweep needs --omega-grid");
  const auto grid = parse_grid(o.omega_grid, "--omega-grid");
  if (grid.empty()) throw ConfigError("--omega-grid is empty");
  const fs::path dir = prepare_out(o);
  auto head = header("sweep", o, r);
  head.push_back("omega_grid=" + o.omega_grid);
  const double dt = o.dt > 0.0 ? o.dt : 0.0;
  CavityParams base = r.params;
  base.t_max = base.t_final;
  SweepResult res;
  if (dt > 0.0 || o.points_per_period == kRunPointsPerPeriod) {
    res = sweep_drive_frequency(base, r.spectrum, grid, dt, o.workers);
  } else {
    // A coarser resolution: the step for the fastest drive on the grid.
    CavityParams fastest = base;
    fastest.omega_drive = *std::max_element(grid.begin(), grid.end());
    res = sweep_drive_frequency(base, r.spectrum, grid,
                                max_time_step(fastest, r.spectrum, o.points_per_period),
                                o.workers);
  }

  std::vector<std::string> cols{"omega", "N_total"};
  for (int n = 1; n <= r.params.n_modes; ++n) cols.push_back("N_" + std::to_string(n));
  {
    CsvWriter w(dir / "sweep.csv", head, cols);
    for (const auto& pt : res.points) {
      w.cell(pt.omega);
      if (!pt.ok) {
        for (int n = 0; n <= r.params.n_modes; ++n) w.empty();
      } else {
        w.cell(pt.total);
        for (double v : pt.per_mode) w.cell(v);
      }
      w.end_row();
    }
  }
  {
    CsvWriter w(dir / "peaks.csv", head, {"omega", "N_total"});
    for (auto i : res.peaks) {
      w.cell(res.points[i].omega).cell(res.points[i].total);
      w.end_row();
    }
  }
  int failed = 0;
  for (const auto& pt : res.points)
    if (!pt.ok) {
      ++failed;
      std::cerr << "omega " << format_number(pt.omega) << ": " << pt.error << '\n';
    }
  std::cout << res.points.size() << " points, " << res.peaks.size() << " peaks, " << failed
            << " failed\n";
  return 0;
}

std::string comparison_text(const Comparison& cmp, const MsaPrediction& pred) {
  std::ostringstream os;
  os << format_prediction(pred);
  if (!cmp.has_oracle) {
    os << cmp.note << '\n';
    return os.str();
  }
  os << std::left << std::setw(22) << "quantity" << std::right << std::setw(16) << "numerical"
     << std::setw(16) << "analytical" << std::setw(12) << "rel.dev" << '\n';
  for (const auto& row : cmp.rows) {
    os << std::left << std::setw(22) << row.quantity << std::right << std::scientific
       << std::setprecision(6) << std::setw(16) << row.numerical << std::setw(16)
       << row.analytical << std::fixed << std::setprecision(4) << std::setw(12)
       << row.relative_deviation << '\n';
    os << std::defaultfloat;
  }
  return os.str();
}

int cmd_compare(const Options& o) {
  const Resolved r = resolve(o);
  const fs::path dir = prepare_out(o);
  const auto head = header("compare", o, r);
  CompareOptions co;
  co.run = r.run;
  co.run.windowed = false;
  co.regime = regime_options(o, r.params);
  co.window = r.window;
  const auto pred = predict(r.spectrum, r.params.omega_drive,
                            r.params.drive_strength(r.spectrum.k1()), co.regime);
  const Comparison cmp = compare_with_msa(r.params, r.spectrum, co);
  {
    CsvWriter w(dir / "compare.csv", head,
                {"quantity", "numerical", "analytical", "relative_deviation"});
    for (const auto& row : cmp.rows) {
      w.cell(row.quantity).cell(row.numerical).cell(row.analytical).cell(row.relative_deviation);
      w.end_row();
    }
  }
  const std::string text = comparison_text(cmp, pred);
  std::ofstream(dir / "compare.txt") << text;
  std::cout << text;
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Particle creation in a SQUID-terminated cavity"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value configuration file");
  Options o;

  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--chi0", o.chi0, "capacitance ratio chi0")->capture_default_str();
  app.add_option("--b0", o.b0, "boundary potential b0")->capture_default_str();
  app.add_option("--alpha", o.alpha, "drive strength alpha")->capture_default_str();
  app.add_option("--v0", o.v0, "circuit potential V0 (with --f0, --epsilon)");
  app.add_option("--f0", o.f0, "static flux phase f0");
  app.add_option("--epsilon", o.epsilon, "flux modulation depth");
  app.add_option("--omega", o.omega, "drive frequency");
  app.add_option("--resonance", o.resonance, "drive frequency as 2k1, k1+k2, k2-k1, ...");
  app.add_option("--tf", o.tf, "end of the drive window t_F")->capture_default_str();
  app.add_option("--tmax", o.tmax, "end of the run (default t_F)");
  app.add_option("--modes", o.modes, "mode cutoff")->capture_default_str();
  app.add_option("--tol", o.tol, "root residual tolerance")->capture_default_str();
  app.add_option("--dt", o.dt, "time step (default from --ppp)");
  app.add_option("--ppp", o.points_per_period, "steps per fastest period")->capture_default_str();
  app.add_option("--stride", o.stride, "sample every n-th step (0 = auto)");
  app.add_option("--init", o.init, "columns | superposition")->capture_default_str();
  app.add_option("--workers", o.workers, "parallel runs")->capture_default_str();
  app.add_option("--trajectory-column", o.trajectory_column,
                 "in-mode whose trajectory is written (0 = none)")
      ->capture_default_str();
  app.add_flag("--dump-matrix", o.dump_matrix, "write the full Bogoliubov matrix");
  app.add_option("--match-tol", o.match_tol, "resonance matching tolerance")->capture_default_str();
  app.add_option("--strong-threshold", o.strong_threshold, "weak/strong amplitude threshold")
      ->capture_default_str();
  app.add_option("--fit-lo", o.fit_lo, "fit window start (default 0.2 t_F)");
  app.add_option("--fit-hi", o.fit_hi, "fit window end (default t_F)");
  app.add_option("--fit-modes", o.fit_modes, "comma-separated modes to fit");
  auto* b0_grid = app.add_option("--b0-grid", o.b0_grid, "b0 values: lo:hi:step or a,b,c");
  app.add_option("--chi0-grid", o.chi0_grid, "chi0 values for the gap profile");
  app.add_option("--omega-grid", o.omega_grid, "drive frequencies: lo:hi:step or a,b,c");

  auto* spectrum = app.add_subcommand("spectrum", "eigenfrequencies and gap profiles");
  auto* evolve = app.add_subcommand("evolve", "single run: particle numbers and fits");
  auto* sweep = app.add_subcommand("sweep", "particle number versus drive frequency");
  auto* compare = app.add_subcommand("compare", "numerical rates against the slow-flow theory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  o.b0_grid_set = b0_grid->count() > 0;

  try {
    if (spectrum->parsed()) return cmd_spectrum(o);
    if (evolve->parsed()) return cmd_evolve(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (compare->parsed()) return cmd_compare(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dce::cli
