#pragma once

// Estimation of Gompertz-Pareto parameters from a normalized income sample.
//
// The Gompertz part is fitted to the empirical CDF below x_t by
// Levenberg-Marquardt in (ln eta, ln b); the Pareto exponent comes from a
// least-squares line through ln(1 - F) against ln x above x_t; the Pareto
// scale is then fixed by continuity. x_t is either supplied or chosen from a
// grid of empirical quantiles by the smallest per-point combined misfit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpcycle/empirical.hpp"
#include "gpcycle/errors.hpp"
#include "gpcycle/gpd.hpp"

namespace gpcycle {

struct CdfPoint {
  double x;
  double F;
};

struct FitOptions {
  int max_iterations = 200;
  /// Relative step size in (ln eta, ln b) below which LM stops.
  double step_tolerance = 1e-12;
  /// Gompertz fits use at most this many rank-spaced ECDF points.
  std::size_t max_gompertz_points = 4000;
  std::size_t min_gompertz_points = 50;
  std::size_t min_tail_points = 30;
  /// Threshold grid in percentiles of the sample: [grid_low, grid_high] step grid_step.
  double grid_low = 60.0;
  double grid_high = 99.0;
  double grid_step = 0.5;
  /// Skip the grid search and use this threshold (normalized units).
  std::optional<double> fixed_x_t;
  /// Allowed |mean(params) - 1| for a converged fit.
  double mean_tolerance = 0.01;
};

struct GompertzFit {
  double eta = 0.0;
  double b = 0.0;
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct TailFit {
  double alpha = 0.0;
  double log_scale = 0.0;  ///< regression intercept; not used for the final scale
  double rss = 0.0;        ///< residual sum of squares in log space
  std::size_t n_points = 0;
};

/// Distinct sample values paired with F(x) = #{<= x} / n.
inline std::vector<CdfPoint> cdf_points(const EmpiricalCdf& ecdf) {
  const auto sorted = ecdf.sorted();
  const auto n = static_cast<double>(sorted.size());
  std::vector<CdfPoint> points;
  points.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    points.push_back({sorted[i], static_cast<double>(i + 1) / n});
  }
  return points;
}

namespace detail {

struct GompertzNormalEquations {
  std::array<double, 3> jtj{};  // (0,0), (0,1), (1,1)
  std::array<double, 2> jtr{};
  double rss = 0.0;
};

inline double gompertz_rss(std::span<const CdfPoint> pts, double eta, double b) {
  double rss = 0.0;
  for (const auto& pt : pts) {
    const double r = -std::expm1(-eta * std::expm1(b * pt.x)) - pt.F;
    rss += r * r;
  }
  return rss;
}

// Jacobian columns are with respect to ln eta and ln b.
inline GompertzNormalEquations gompertz_normal_equations(std::span<const CdfPoint> pts, double eta, double b) {
  GompertzNormalEquations ne;
  for (const auto& pt : pts) {
    const double ebx = std::exp(b * pt.x);
    const double survival = std::exp(-eta * (ebx - 1.0));
    const double r = (1.0 - survival) - pt.F;
    const double d_eta = survival * (ebx - 1.0) * eta;
    const double d_b = survival * eta * pt.x * ebx * b;
    ne.jtj[0] += d_eta * d_eta;
    ne.jtj[1] += d_eta * d_b;
    ne.jtj[2] += d_b * d_b;
    ne.jtr[0] += d_eta * r;
    ne.jtr[1] += d_b * r;
    ne.rss += r * r;
  }
  return ne;
}

}  // namespace detail

/// Damped Gauss-Newton fit of G(x; eta, b) to ECDF points. Reports
/// non-convergence through GompertzFit::converged rather than throwing.
inline GompertzFit fit_gompertz(std::span<const CdfPoint> pts, double eta0, double b0, const FitOptions& opt = {}) {
  if (pts.size() < opt.min_gompertz_points) {
    throw DataError("fit_gompertz: need at least " + std::to_string(opt.min_gompertz_points) +
                    " points below x_t, got " + std::to_string(pts.size()));
  }
  if (!(eta0 > 0.0 && b0 > 0.0)) throw ParameterError("fit_gompertz: initial eta and b must be positive");

  double log_eta = std::log(eta0);
  double log_b = std::log(b0);
  double lambda = 1e-3;
  GompertzFit fit;
  auto ne = detail::gompertz_normal_equations(pts, eta0, b0);
  if (!std::isfinite(ne.rss)) return fit;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    fit.iterations = it;
    bool accepted = false;
    double step = 0.0;
    while (lambda < 1e16) {
      const double a00 = ne.jtj[0] * (1.0 + lambda);
      const double a11 = ne.jtj[2] * (1.0 + lambda);
      const double a01 = ne.jtj[1];
      const double det = a00 * a11 - a01 * a01;
      if (!(det > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const double d0 = -(a11 * ne.jtr[0] - a01 * ne.jtr[1]) / det;
      const double d1 = -(a00 * ne.jtr[1] - a01 * ne.jtr[0]) / det;
      const double trial = detail::gompertz_rss(pts, std::exp(log_eta + d0), std::exp(log_b + d1));
      if (std::isfinite(trial) && trial <= ne.rss) {
        log_eta += d0;
        log_b += d1;
        step = std::max(std::abs(d0), std::abs(d1));
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at machine precision: a stationary point.
      fit.converged = true;
      break;
    }
    ne = detail::gompertz_normal_equations(pts, std::exp(log_eta), std::exp(log_b));
    if (step <= opt.step_tolerance * (1.0 + std::max(std::abs(log_eta), std::abs(log_b))) || ne.rss == 0.0) {
      fit.converged = true;
      break;
    }
  }
  fit.eta = std::exp(log_eta);
  fit.b = std::exp(log_b);
  fit.rss = detail::gompertz_rss(pts, fit.eta, fit.b);
  fit.converged = fit.converged && std::isfinite(fit.rss);
  return fit;
}

/// LM from eta0 = 1, b0 = 1 / median(x); on failure retries from a 3x3
/// multiplicative grid around that start and keeps the lowest-RSS converged run.
inline GompertzFit fit_gompertz_multistart(std::span<const CdfPoint> pts, const FitOptions& opt = {}) {
  if (pts.size() < opt.min_gompertz_points) {
    throw DataError("fit_gompertz: need at least " + std::to_string(opt.min_gompertz_points) +
                    " points below x_t, got " + std::to_string(pts.size()));
  }
  const double median = pts[pts.size() / 2].x;
  const double b0 = median > 0.0 ? 1.0 / median : 1.0;
  GompertzFit best = fit_gompertz(pts, 1.0, b0, opt);
  if (best.converged) return best;
  constexpr std::array<double, 3> kScales = {0.3, 1.0, 3.0};
  for (double se : kScales) {
    for (double sb : kScales) {
      const GompertzFit trial = fit_gompertz(pts, se, sb * b0, opt);
      if (trial.converged && (!best.converged || trial.rss < best.rss)) best = trial;
    }
  }
  return best;
}

namespace detail {

inline TailFit log_log_regression(std::span<const double> lx, std::span<const double> ly) {
  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DataError("fit_pareto_tail: tail points have no spread in ln x");
  const double slope = sxy / sxx;
  TailFit fit;
  fit.alpha = -slope;
  fit.log_scale = my - slope * mx;
  fit.rss = std::max(0.0, syy - slope * sxy);
  fit.n_points = lx.size();
  return fit;
}

}  // namespace detail

/// Least-squares line through (ln x, ln(1 - F)); alpha is minus the slope.
/// The caller drops the sample maximum, whose survival is zero.
inline TailFit fit_pareto_tail(std::span<const CdfPoint> tail, const FitOptions& opt = {}) {
  if (tail.size() < opt.min_tail_points) {
    throw DataError("fit_pareto_tail: need at least " + std::to_string(opt.min_tail_points) + " tail points, got " +
                    std::to_string(tail.size()));
  }
  std::vector<double> lx(tail.size()), ly(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double survival = 1.0 - tail[i].F;
    if (!(survival > 0.0)) throw DataError("fit_pareto_tail: survival is zero at x = " + std::to_string(tail[i].x));
    if (!(tail[i].x > 0.0)) throw DataError("fit_pareto_tail: tail incomes must be positive");
    lx[i] = std::log(tail[i].x);
    ly[i] = std::log(survival);
  }
  return detail::log_log_regression(lx, ly);
}

/// Hill estimator k / sum ln(x_i / x_t) over observations >= x_t. Diagnostic only.
inline double hill_alpha(const EmpiricalCdf& ecdf, double x_t) {
  const auto sorted = ecdf.sorted();
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), x_t);
  double sum = 0.0;
  for (auto it = first; it != sorted.end(); ++it) sum += std::log(*it / x_t);
  const auto k = static_cast<double>(sorted.end() - first);
  if (!(sum > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return k / sum;
}

/// ECDF points with cached logs for repeated threshold evaluations.
class PreparedSample {
 public:
  explicit PreparedSample(const EmpiricalCdf& ecdf) : points_(cdf_points(ecdf)) {
    // The last point has survival 0 and never enters the tail regression.
    const std::size_t usable = points_.empty() ? 0 : points_.size() - 1;
    log_x_.resize(usable);
    log_survival_.resize(usable);
    for (std::size_t i = 0; i < usable; ++i) {
      log_x_[i] = points_[i].x > 0.0 ? std::log(points_[i].x) : -std::numeric_limits<double>::infinity();
      log_survival_[i] = std::log1p(-points_[i].F);
    }
  }

  std::span<const CdfPoint> points() const noexcept { return points_; }

  /// Index of the first point with x >= x_t.
  std::size_t split(double x_t) const {
    return static_cast<std::size_t>(
        std::lower_bound(points_.begin(), points_.end(), x_t, [](const CdfPoint& p, double v) { return p.x < v; }) -
        points_.begin());
  }

  /// At most `limit` rank-spaced points below x_t.
  std::vector<CdfPoint> below(double x_t, std::size_t limit) const {
    const std::size_t k = split(x_t);
    std::vector<CdfPoint> out;
    if (k <= limit) return {points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(k)};
    out.reserve(limit);
    for (std::size_t j = 0; j < limit; ++j) {
      const auto idx = static_cast<std::size_t>((static_cast<double>(j) + 0.5) * static_cast<double>(k) /
                                                static_cast<double>(limit));
      out.push_back(points_[idx]);
    }
    return out;
  }

  std::size_t tail_size(double x_t) const {
    const std::size_t k = split(x_t);
    return k < log_x_.size() ? log_x_.size() - k : 0;
  }

  TailFit tail_fit(double x_t, const FitOptions& opt) const {
    const std::size_t k = split(x_t);
    const std::size_t m = tail_size(x_t);
    if (m < opt.min_tail_points) {
      throw DataError("fit_pareto_tail: need at least " + std::to_string(opt.min_tail_points) +
                      " tail points, got " + std::to_string(m));
    }
    if (!(points_[k].x > 0.0)) throw DataError("fit_pareto_tail: tail incomes must be positive");
    return detail::log_log_regression(std::span<const double>(log_x_).subspan(k, m),
                                      std::span<const double>(log_survival_).subspan(k, m));
  }

 private:
  std::vector<CdfPoint> points_;
  std::vector<double> log_x_;
  std::vector<double> log_survival_;
};

struct ThresholdScore {
  double x_t = 0.0;
  double objective = std::numeric_limits<double>::infinity();
  double gompertz_rss = 0.0;
  double pareto_rss = 0.0;
  std::size_t n_below = 0;  ///< Gompertz points used (after thinning)
  std::size_t n_above = 0;  ///< tail regression points
  bool converged = false;
};

struct ThresholdSearch {
  double x_t = 0.0;
  double objective = 0.0;
  std::vector<ThresholdScore> scores;
};

/// Fits both sides at one threshold and returns the per-point combined misfit
/// gompertz_rss / n_below + pareto_rss / n_above.
inline ThresholdScore score_threshold(const PreparedSample& sample, double x_t, const FitOptions& opt) {
  ThresholdScore score;
  score.x_t = x_t;
  const auto below = sample.below(x_t, opt.max_gompertz_points);
  if (below.size() < opt.min_gompertz_points || sample.tail_size(x_t) < opt.min_tail_points) return score;
  const GompertzFit g = fit_gompertz_multistart(below, opt);
  const TailFit t = sample.tail_fit(x_t, opt);
  score.gompertz_rss = g.rss;
  score.pareto_rss = t.rss;
  score.n_below = below.size();
  score.n_above = t.n_points;
  score.converged = g.converged && std::isfinite(t.rss) && t.alpha > 1.0;
  if (score.converged) {
    score.objective = g.rss / static_cast<double>(score.n_below) + t.rss / static_cast<double>(score.n_above);
  }
  return score;
}

/// Empirical quantiles from grid_low to grid_high percent in grid_step steps.
inline std::vector<double> default_threshold_grid(const EmpiricalCdf& ecdf, const FitOptions& opt = {}) {
  std::vector<double> grid;
  const auto steps = static_cast<int>(std::floor((opt.grid_high - opt.grid_low) / opt.grid_step + 1e-9));
  for (int i = 0; i <= steps; ++i) grid.push_back(ecdf.quantile((opt.grid_low + i * opt.grid_step) / 100.0));
  return grid;
}

/// Grid search for x_t. Ties resolve to the smaller candidate.
inline ThresholdSearch find_threshold(const PreparedSample& sample, std::span<const double> candidates,
                                      const FitOptions& opt = {}) {
  if (candidates.empty()) throw DataError("find_threshold: empty candidate grid");
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i] < candidates[i - 1]) throw DomainError("find_threshold: candidates must be ascending");
  }
  ThresholdSearch search;
  search.objective = std::numeric_limits<double>::infinity();
  bool any = false;
  for (double c : candidates) {
    const ThresholdScore s = score_threshold(sample, c, opt);
    search.scores.push_back(s);
    if (s.converged && s.objective < search.objective) {
      search.objective = s.objective;
      search.x_t = c;
      any = true;
    }
  }
  if (!any) throw ConvergenceError("find_threshold: no candidate converged on both the Gompertz and Pareto side");
  return search;
}

inline ThresholdSearch find_threshold(const IncomeSample& s, std::span<const double> candidates,
                                      const FitOptions& opt = {}) {
  return find_threshold(PreparedSample(EmpiricalCdf(s)), candidates, opt);
}

struct FitResult {
  GpdParams params;
  double gompertz_rss = 0.0;
  double pareto_rss = 0.0;
  double mean_check = 0.0;
  bool converged = false;
  int iterations = 0;
  bool threshold_fixed = false;
  double threshold_objective = 0.0;
  double hill_alpha = 0.0;
  std::vector<std::string> warnings;
};

/// Threshold search (or fixed x_t), Gompertz and tail fits, continuity-fixed
/// Pareto scale, and the mean check. Sub-fit failures throw; a mean outside
/// 1 +- mean_tolerance is reported as a warning with converged = false.
inline FitResult fit_full(const IncomeSample& s, const FitOptions& opt = {}) {
  if (!s.normalized) throw DataError("fit_full: sample for year " + std::to_string(s.year) + " must be normalized");
  if (s.n() < kMinFitObservations) {
    throw DataError("fit_full: year " + std::to_string(s.year) + " has " + std::to_string(s.n()) +
                    " observations, need at least " + std::to_string(kMinFitObservations));
  }
  const EmpiricalCdf ecdf(s);
  const PreparedSample sample(ecdf);

  double x_t = 0.0;
  double objective = 0.0;
  if (opt.fixed_x_t) {
    x_t = *opt.fixed_x_t;
    if (!(x_t > 0.0)) throw DomainError("fit_full: fixed x_t must be positive");
  } else {
    const auto grid = default_threshold_grid(ecdf, opt);
    const auto search = find_threshold(sample, grid, opt);
    x_t = search.x_t;
    objective = search.objective;
  }

  const auto below = sample.below(x_t, opt.max_gompertz_points);
  const GompertzFit g = fit_gompertz_multistart(below, opt);
  if (!g.converged) {
    throw ConvergenceError("fit_full: Gompertz fit for year " + std::to_string(s.year) + " did not converge after " +
                           std::to_string(g.iterations) + " iterations");
  }
  const TailFit t = sample.tail_fit(x_t, opt);
  if (!(t.alpha > 1.0)) {
    throw ConvergenceError("fit_full: tail exponent " + std::to_string(t.alpha) + " for year " +
                           std::to_string(s.year) + " does not exceed 1; the mean would diverge");
  }
  if (opt.fixed_x_t) {
    objective = g.rss / static_cast<double>(below.size()) + t.rss / static_cast<double>(t.n_points);
  }

  FitResult result{.params = GpdParams::make(x_t, g.eta, g.b, t.alpha), .warnings = {}};
  result.gompertz_rss = g.rss;
  result.pareto_rss = t.rss;
  result.mean_check = mean(result.params);
  result.iterations = g.iterations;
  result.threshold_fixed = opt.fixed_x_t.has_value();
  result.threshold_objective = objective;
  result.hill_alpha = hill_alpha(ecdf, x_t);
  result.converged = true;
  if (std::abs(result.mean_check - 1.0) > opt.mean_tolerance) {
    result.converged = false;
    result.warnings.push_back("mean of fitted distribution is " + std::to_string(result.mean_check) +
                              ", outside 1 +- " + std::to_string(opt.mean_tolerance));
  }
  return result;
}

}  // namespace gpcycle
