#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpcycle/empirical.hpp"
#include "gpcycle/fitting.hpp"
#include "gpcycle/goodwin.hpp"
#include "gpcycle/gpd.hpp"
#include "gpcycle/io.hpp"
#include "gpcycle/lv_sim.hpp"

namespace gpcycle::cli {

namespace fs = std::filesystem;
using io::format_number;
using io::json;

namespace {

constexpr const char* kSummaryUnits =
    "x_t and x_d in units of the year's mean income; b per mean-income unit; eta and alpha dimensionless; "
    "gini coefficients as fractions; shares in percent of individuals";

struct YearOutcome {
  int year = 0;
  ExitCode code = kSuccess;
  std::string error;
  std::optional<FitResult> fit;
  double gini_raw = 0.0;
  double gini = 0.0;
  double x_d = 0.0;
  double minimum_wage = 0.0;
  double mean_income = 0.0;
  std::size_t n = 0;
  PopulationShares shares;
};

YearOutcome fit_one_year(IncomeSample raw, const YearConfig& cfg, FitOptions opt) {
  YearOutcome out;
  out.year = raw.year;
  out.n = raw.n();
  try {
    const auto s = normalize(std::move(raw));
    out.mean_income = s.unit;
    auto fit = fit_full(s, opt);
    out.x_d = cfg.x_d_normalized(s);
    out.minimum_wage = cfg.minimum_wage_normalized(s);
    out.shares = population_shares(s, cfg, fit.params);
    out.gini_raw = gini_raw(s);
    out.gini = gini_analytic(fit.params);
    if (!fit.converged) out.code = kNonConvergence;
    out.fit = std::move(fit);
  } catch (const ConvergenceError& e) {
    out.code = kNonConvergence;
    out.error = e.what();
  } catch (const std::exception& e) {
    out.code = kDataError;
    out.error = e.what();
  }
  return out;
}

json fit_record(const YearOutcome& y, const io::RunManifest& manifest) {
  json j;
  j["manifest"] = manifest.to_json();
  j["year"] = y.year;
  j["n"] = y.n;
  j["status"] = !y.fit ? "failed" : (y.fit->converged ? "converged" : "warning");
  if (!y.error.empty()) j["error"] = y.error;
  if (y.fit) {
    const auto& f = *y.fit;
    j["params"] = io::params_to_json(f.params);
    j["gini_analytic"] = y.gini;
    j["gini_raw"] = y.gini_raw;
    j["mean_check"] = f.mean_check;
    j["x_d"] = y.x_d;
    j["minimum_wage_normalized"] = y.minimum_wage;
    j["mean_income"] = y.mean_income;
    j["shares_percent"] = {{"below_x_d", 100.0 * y.shares.below_x_d},
                           {"below_minimum_wage", 100.0 * y.shares.below_minimum_wage},
                           {"below_x_t", 100.0 * y.shares.below_x_t}};
    j["gompertz_rss"] = f.gompertz_rss;
    j["pareto_rss"] = f.pareto_rss;
    j["iterations"] = f.iterations;
    j["threshold_fixed"] = f.threshold_fixed;
    j["threshold_objective"] = f.threshold_objective;
    j["hill_alpha"] = f.hill_alpha;
    j["warnings"] = f.warnings;
  }
  j["units"] = {{"income", "normalized: 1 = year mean income (mean_income is in input currency)"},
                {"shares_percent", "percent of individuals"},
                {"gini", "fraction"}};
  return j;
}

ExitCode worst(ExitCode a, ExitCode b) {
  if (a == kDataError || b == kDataError) return kDataError;
  return std::max(a, b);
}

}  // namespace

int cmd_fit(const FitArgs& args, const io::RunManifest& manifest) {
  auto samples = io::read_income_csv(args.input);
  const auto config = io::read_config(args.config);
  for (const auto& [year, s] : samples) (void)config.year(year);

  std::vector<YearOutcome> outcomes;
  for (auto& [year, s] : samples) {
    FitOptions opt = args.options;
    if (auto it = args.fixed_x_t.find(year); it != args.fixed_x_t.end()) {
      opt.fixed_x_t = it->second;
    } else if (auto jt = config.fixed_x_t.find(year); jt != config.fixed_x_t.end()) {
      opt.fixed_x_t = jt->second;
    }
    outcomes.push_back(fit_one_year(std::move(s), config.year(year), opt));
  }

  fs::create_directories(args.outdir);
  io::CsvTable summary({"year", "x_t", "eta", "b", "alpha", "gini_raw", "gini", "mean_check", "share_below_x_d",
                        "share_below_minimum_wage", "share_below_x_t", "x_d", "converged"},
                       kSummaryUnits);
  ExitCode code = kSuccess;
  for (const auto& y : outcomes) {
    io::write_json(args.outdir / ("fit_" + std::to_string(y.year) + ".json"), fit_record(y, manifest));
    code = worst(code, y.code);
    if (y.code != kSuccess) {
      std::cerr << "year " << y.year << ": "
                << (y.error.empty() ? (y.fit && !y.fit->warnings.empty() ? y.fit->warnings.front() : "not converged")
                                    : y.error)
                << '\n';
    }
    if (!y.fit) continue;
    const auto& p = y.fit->params;
    summary.add_row({std::to_string(y.year), format_number(p.x_t()), format_number(p.eta()), format_number(p.b()),
                     format_number(p.alpha()), format_number(y.gini_raw), format_number(y.gini),
                     format_number(y.fit->mean_check), format_number(100.0 * y.shares.below_x_d),
                     format_number(100.0 * y.shares.below_minimum_wage), format_number(100.0 * y.shares.below_x_t),
                     format_number(y.x_d), y.fit->converged ? "1" : "0"});
  }
  summary.write(args.outdir / "summary.csv", manifest);
  return code;
}

namespace {

UvSeries series_from_fits(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("fit_") && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  UvSeries series;
  for (const auto& f : files) {
    const auto j = io::read_json(f);
    if (!j.contains("params")) {
      throw DataError(f.string() + ": year has no fitted parameters (status " + j.value("status", "?") + ")");
    }
    const int year = j.at("year").get<int>();
    series.push_back(uv_from_fit(year, io::params_from_json(j.at("params")), j.at("x_d").get<double>()));
  }
  std::sort(series.begin(), series.end(), [](const UvPoint& a, const UvPoint& b) { return a.year < b.year; });
  return series;
}

}  // namespace

int cmd_cycle(const CycleArgs& args, const io::RunManifest& manifest) {
  if (args.fits_dir.has_value() == args.uv_csv.has_value()) {
    std::cerr << "cycle: give exactly one of --fits or --uv\n";
    return kUsageError;
  }
  const UvSeries series = args.fits_dir ? series_from_fits(*args.fits_dir) : io::read_uv_csv(*args.uv_csv);
  const auto rows = growth_rates(series);
  const auto coeffs = estimate_lv(series);

  fs::create_directories(args.outdir);
  io::CsvTable uv({"year", "u", "v"}, "u = wage share, percent; v = employment rate, percent");
  io::CsvTable reg({"year", "u", "v", "du_dt", "dv_dt", "u_growth_rate", "v_growth_rate"},
                   "u, v in percent; du_dt, dv_dt in percent per year; growth rates per year "
                   "(central differences inside, one-sided at the ends)");
  for (const auto& r : rows) {
    uv.add_row({std::to_string(r.year), format_number(r.u), format_number(r.v)});
    reg.add_row({std::to_string(r.year), format_number(r.u), format_number(r.v), format_number(r.du_dt),
                 format_number(r.dv_dt), format_number(r.u_rate), format_number(r.v_rate)});
  }
  uv.write(args.outdir / "uv.csv", manifest);
  reg.write(args.outdir / "regression.csv", manifest);

  json j;
  j["manifest"] = manifest.to_json();
  j["first_year"] = series.front().year;
  j["last_year"] = series.back().year;
  j["coefficients"] = io::lv_to_json(coeffs);
  j["units"] = {{"a1", "per year"},
                {"a2", "per year"},
                {"b1", "per year per percentage point of v"},
                {"b2", "per year per percentage point of u"},
                {"u_c", "percent"},
                {"v_c", "percent"},
                {"T", "years"}};
  io::write_json(args.outdir / "cycle.json", j);
  return kSuccess;
}

int cmd_simulate(const SimulateArgs& args, const io::RunManifest& manifest) {
  SimConfig cfg;
  cfg.coeffs = LvCoefficients::from_rates(args.a1, args.b1, args.a2, args.b2);
  cfg.initial = {args.x0, args.y0};
  cfg.dt = args.dt;
  cfg.t_end = args.t_end;
  if (args.every == 0) throw DomainError("simulate: --every must be at least 1");
  const auto traj = integrate(cfg);

  fs::create_directories(args.outdir);
  io::CsvTable csv({"t", "x", "y", "H"}, "t in years; x = prey (employment rate v), y = predator (wage share u), "
                                          "in the units of the initial state; H = b1 x - a1 ln x + b2 y - a2 ln y");
  double drift = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    drift = std::max(drift, std::abs(traj.conserved[i] - traj.conserved.front()));
    if (i % args.every != 0 && i + 1 != traj.times.size()) continue;
    csv.add_row({format_number(traj.times[i]), format_number(traj.states[i].x), format_number(traj.states[i].y),
                 format_number(traj.conserved[i])});
  }
  csv.write(args.outdir / "trajectory.csv", manifest);

  json j;
  j["manifest"] = manifest.to_json();
  j["coefficients"] = io::lv_to_json(cfg.coeffs);
  j["steps"] = traj.times.size() - 1;
  j["max_invariant_drift"] = drift;
  try {
    j["measured_period"] = measure_period(traj);
  } catch (const DataError&) {
    j["measured_period"] = nullptr;
  }
  io::write_json(args.outdir / "simulation.json", j);
  return kSuccess;
}

int cmd_sample(const SampleArgs& args, const io::RunManifest& manifest) {
  const auto p = GpdParams::make(args.x_t, args.eta, args.b, args.alpha);
  if (!(args.scale > 0.0)) throw DomainError("sample: --scale must be positive");
  const auto s = sample_gpd(p, args.n, args.seed, args.year);
  fs::create_directories(args.outdir);
  io::CsvTable csv({"year", "income"}, "income in currency units (normalized draw times --scale)");
  for (double v : s.values) csv.add_row({std::to_string(args.year), format_number(v * args.scale)});
  csv.write(args.outdir / "sample.csv", manifest);
  return kSuccess;
}

int cmd_report(const ReportArgs& args, const io::RunManifest& manifest) {
  const auto p = GpdParams::make(args.x_t, args.eta, args.b, args.alpha);
  if (args.grid_points < 2 || !(args.grid_max > 0.0)) {
    throw DomainError("report: grid needs >= 2 points and a positive maximum");
  }
  std::vector<double> grid(args.grid_points);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = args.grid_max * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  const auto curve = lorenz(p, grid);
  const double mu = mean(p);

  fs::create_directories(args.outdir);
  io::CsvTable csv({"x", "F", "F1"}, "x in mean-income units; F = population share, F1 = income share, percent");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv.add_row({format_number(grid[i]), format_number(100.0 * curve.points[i].population),
                 format_number(100.0 * curve.points[i].income)});
  }
  csv.write(args.outdir / "lorenz.csv", manifest);

  json j;
  j["manifest"] = manifest.to_json();
  j["params"] = io::params_to_json(p);
  j["mean"] = mu;
  j["gini_analytic"] = gini_analytic(p);
  j["population_below_x_t_percent"] = 100.0 * cdf(p, p.x_t());
  j["income_share_below_x_t_percent"] = 100.0 * income_share(p, p.x_t(), mu);
  io::write_json(args.outdir / "report.json", j);
  return kSuccess;
}

namespace {

void add_params(CLI::App* cmd, double& x_t, double& eta, double& b, double& alpha) {
  cmd->add_option("--xt", x_t, "Threshold x_t (mean-income units)")->required();
  cmd->add_option("--eta", eta, "Gompertz eta")->required();
  cmd->add_option("--b", b, "Gompertz rate b")->required();
  cmd->add_option("--alpha", alpha, "Pareto exponent")->required();
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Gompertz-Pareto income fits and Goodwin growth-cycle estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));

  FitArgs fit;
  std::vector<std::string> fixed;
  auto* fit_cmd = app.add_subcommand("fit", "Fit per-year income distributions");
  fit_cmd->add_option("--input,-i", fit.input, "CSV with header year,income")->required();
  fit_cmd->add_option("--config,-c", fit.config, "JSON minimum-wage config")->required();
  fit_cmd->add_option("--outdir,-o", fit.outdir, "Output directory")->required();
  fit_cmd->add_option("--fixed-xt", fixed, "Pin x_t for a year, YEAR=VALUE (repeatable)");
  fit_cmd->add_option("--max-iterations", fit.options.max_iterations, "Gompertz LM iteration cap")
      ->capture_default_str();
  fit_cmd->add_option("--mean-tolerance", fit.options.mean_tolerance, "Allowed |mean - 1| of a fit")
      ->capture_default_str();
  fit_cmd->add_option("--grid-low", fit.options.grid_low, "Lowest x_t candidate percentile")->capture_default_str();
  fit_cmd->add_option("--grid-high", fit.options.grid_high, "Highest x_t candidate percentile")->capture_default_str();
  fit_cmd->add_option("--grid-step", fit.options.grid_step, "x_t candidate percentile step")->capture_default_str();

  CycleArgs cycle;
  std::string fits_dir, uv_csv;
  auto* cycle_cmd = app.add_subcommand("cycle", "Estimate Goodwin cycle coefficients");
  auto* fits_opt = cycle_cmd->add_option("--fits", fits_dir, "Directory of fit_<year>.json records");
  auto* uv_opt = cycle_cmd->add_option("--uv", uv_csv, "CSV with header year,u,v (percent)");
  fits_opt->excludes(uv_opt);
  cycle_cmd->add_option("--outdir,-o", cycle.outdir, "Output directory")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate the Lotka-Volterra system with RK4");
  sim_cmd->add_option("--a1", sim.a1)->required();
  sim_cmd->add_option("--b1", sim.b1)->required();
  sim_cmd->add_option("--a2", sim.a2)->required();
  sim_cmd->add_option("--b2", sim.b2)->required();
  sim_cmd->add_option("--x0", sim.x0, "Initial prey (v)")->required();
  sim_cmd->add_option("--y0", sim.y0, "Initial predator (u)")->required();
  sim_cmd->add_option("--dt", sim.dt, "Step, years")->capture_default_str();
  sim_cmd->add_option("--t-end", sim.t_end, "Duration, years")->required();
  sim_cmd->add_option("--every", sim.every, "Write every k-th step")->capture_default_str();
  sim_cmd->add_option("--outdir,-o", sim.outdir, "Output directory")->required();

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw incomes from a Gompertz-Pareto distribution");
  add_params(sample_cmd, sample.x_t, sample.eta, sample.b, sample.alpha);
  sample_cmd->add_option("--n", sample.n, "Number of draws")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample.seed, "64-bit seed")->required();
  sample_cmd->add_option("--year", sample.year, "Year label")->capture_default_str();
  sample_cmd->add_option("--scale", sample.scale, "Currency mean-income multiplier")->capture_default_str();
  sample_cmd->add_option("--outdir,-o", sample.outdir, "Output directory")->required();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Mean, Gini and Lorenz curve of a parameter set");
  add_params(report_cmd, report.x_t, report.eta, report.b, report.alpha);
  report_cmd->add_option("--grid-max", report.grid_max, "Largest Lorenz grid income")->capture_default_str();
  report_cmd->add_option("--grid-points", report.grid_points, "Lorenz grid size")->capture_default_str();
  report_cmd->add_option("--outdir,-o", report.outdir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kSuccess : kUsageError;
  }

  io::RunManifest manifest;
  for (int i = 1; i < argc; ++i) manifest.arguments.emplace_back(argv[i]);

  try {
    if (fit_cmd->parsed()) {
      for (const auto& f : fixed) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) {
          std::cerr << "fit: --fixed-xt expects YEAR=VALUE, got '" << f << "'\n";
          return kUsageError;
        }
        fit.fixed_x_t[std::stoi(f.substr(0, eq))] = std::stod(f.substr(eq + 1));
      }
      manifest.subcommand = "fit";
      manifest.inputs = {fit.input.string()};
      manifest.config = fit.config.string();
      manifest.output_dir = fit.outdir.string();
      return cmd_fit(fit, manifest);
    }
    if (cycle_cmd->parsed()) {
      if (!fits_dir.empty()) cycle.fits_dir = fits_dir;
      if (!uv_csv.empty()) cycle.uv_csv = uv_csv;
      manifest.subcommand = "cycle";
      manifest.inputs = {fits_dir.empty() ? uv_csv : fits_dir};
      manifest.output_dir = cycle.outdir.string();
      return cmd_cycle(cycle, manifest);
    }
    if (sim_cmd->parsed()) {
      manifest.subcommand = "simulate";
      manifest.output_dir = sim.outdir.string();
      return cmd_simulate(sim, manifest);
    }
    if (sample_cmd->parsed()) {
      manifest.subcommand = "sample";
      manifest.output_dir = sample.outdir.string();
      manifest.seed = sample.seed;
      return cmd_sample(sample, manifest);
    }
    if (report_cmd->parsed()) {
      manifest.subcommand = "report";
      manifest.output_dir = report.outdir.string();
      return cmd_report(report, manifest);
    }
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace gpcycle::cli
