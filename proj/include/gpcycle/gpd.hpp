#pragma once

// Two-class Gompertz-Pareto income distribution on unit-mean normalized income.
//
// Below the threshold x_t incomes follow the Gompertz law
//   G(x) = 1 - exp[-eta (e^{b x} - 1)],
// at and above it a Pareto tail 1 - beta_P x^{-alpha} whose scale beta_P is
// fixed by continuity at x_t. All probabilities are fractions in [0, 1].

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gpcycle/errors.hpp"
#include "gpcycle/quadrature.hpp"

namespace gpcycle {

/// Absolute tolerance used for every Gompertz-side integral.
inline constexpr double kQuadratureTolerance = 1e-9;

class GpdParams {
 public:
  /// Validates x_t, eta, b > 0 and alpha > 1 (finite mean), then derives the
  /// Pareto scale beta_P = x_t^alpha exp[-eta (e^{b x_t} - 1)].
  static GpdParams make(double x_t, double eta, double b, double alpha) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(x_t)) throw ParameterError("GpdParams: x_t must be positive, got " + std::to_string(x_t));
    if (!positive(eta)) throw ParameterError("GpdParams: eta must be positive, got " + std::to_string(eta));
    if (!positive(b)) throw ParameterError("GpdParams: b must be positive, got " + std::to_string(b));
    if (!(std::isfinite(alpha) && alpha > 1.0)) {
      throw ParameterError("GpdParams: alpha must exceed 1 for a finite mean, got " + std::to_string(alpha));
    }
    return GpdParams(x_t, eta, b, alpha);
  }

  double x_t() const noexcept { return x_t_; }
  double eta() const noexcept { return eta_; }
  double b() const noexcept { return b_; }
  double alpha() const noexcept { return alpha_; }
  double pareto_scale() const noexcept { return pareto_scale_; }
  /// Population share above x_t, exp[-eta (e^{b x_t} - 1)].
  double threshold_survival() const noexcept { return threshold_survival_; }

  /// Same distribution expressed in units where incomes are divided by `divisor`.
  GpdParams rescaled(double divisor) const { return make(x_t_ / divisor, eta_, b_ * divisor, alpha_); }

  friend bool operator==(const GpdParams&, const GpdParams&) = default;

 private:
  GpdParams(double x_t, double eta, double b, double alpha)
      : x_t_(x_t),
        eta_(eta),
        b_(b),
        alpha_(alpha),
        threshold_survival_(std::exp(-eta * std::expm1(b * x_t))),
        pareto_scale_(std::pow(x_t, alpha) * threshold_survival_) {}

  double x_t_;
  double eta_;
  double b_;
  double alpha_;
  double threshold_survival_;
  double pareto_scale_;
};

/// Branch formulas evaluated without the piecewise switch. Exposed so the two
/// sides can be compared at the threshold.
namespace branch {

inline double gompertz_cdf(const GpdParams& p, double x) { return -std::expm1(-p.eta() * std::expm1(p.b() * x)); }

inline double pareto_cdf(const GpdParams& p, double x) { return 1.0 - p.pareto_scale() * std::pow(x, -p.alpha()); }

inline double gompertz_pdf(const GpdParams& p, double x) {
  const double ebx = std::exp(p.b() * x);
  return p.eta() * p.b() * ebx * std::exp(-p.eta() * (ebx - 1.0));
}

inline double pareto_pdf(const GpdParams& p, double x) {
  return p.alpha() * p.pareto_scale() * std::pow(x, -p.alpha() - 1.0);
}

/// Lorenz ordinate below x_t: I(x) / mean.
inline double gompertz_income_share(const GpdParams& p, double x, double mean);

/// Lorenz ordinate at and above x_t: 1 + alpha beta_P x^{1-alpha} / ((1-alpha) mean).
inline double pareto_income_share(const GpdParams& p, double x, double mean) {
  const double a = p.alpha();
  if (std::isinf(x)) return 1.0;
  return 1.0 + a * p.pareto_scale() * std::pow(x, 1.0 - a) / ((1.0 - a) * mean);
}

}  // namespace branch

namespace detail {

inline void require_income(double x, const char* op) {
  if (!(x >= 0.0)) throw DomainError(std::string(op) + ": income must be nonnegative, got " + std::to_string(x));
}

}  // namespace detail

/// F(x): population share with income <= x.
inline double cdf(const GpdParams& p, double x) {
  detail::require_income(x, "cdf");
  if (x < p.x_t()) return branch::gompertz_cdf(p, x);
  if (std::isinf(x)) return 1.0;
  return branch::pareto_cdf(p, x);
}

/// f(x); at exactly x_t the Pareto branch is returned (right-continuous convention).
inline double pdf(const GpdParams& p, double x) {
  detail::require_income(x, "pdf");
  if (x < p.x_t()) return branch::gompertz_pdf(p, x);
  if (std::isinf(x)) return 0.0;
  return branch::pareto_pdf(p, x);
}

/// Analytic inverse of cdf on [0, 1).
inline double quantile(const GpdParams& p, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("quantile: probability must lie in [0, 1), got " + std::to_string(q));
  if (q < 1.0 - p.threshold_survival()) {
    return std::log1p(-std::log1p(-q) / p.eta()) / p.b();
  }
  const double x = std::pow(p.pareto_scale() / (1.0 - q), 1.0 / p.alpha());
  // Rounding can push the tail inverse a hair below the threshold.
  return x < p.x_t() ? p.x_t() : x;
}

/// I(x) = integral_0^x y g(y) dy on the Gompertz region, 0 <= x <= x_t.
inline double gompertz_partial_mean(const GpdParams& p, double x) {
  detail::require_income(x, "gompertz_partial_mean");
  if (x > p.x_t()) {
    throw DomainError("gompertz_partial_mean: x must not exceed x_t (" + std::to_string(p.x_t()) + "), got " +
                      std::to_string(x));
  }
  auto integrand = [&p](double y) { return y * branch::gompertz_pdf(p, y); };
  return quadrature::integrate(integrand, 0.0, x, kQuadratureTolerance);
}

/// <x> = I(x_t) + alpha x_t exp[-eta (e^{b x_t} - 1)] / (alpha - 1).
inline double mean(const GpdParams& p) {
  const double tail = p.alpha() * p.x_t() * p.threshold_survival() / (p.alpha() - 1.0);
  return gompertz_partial_mean(p, p.x_t()) + tail;
}

inline double branch::gompertz_income_share(const GpdParams& p, double x, double mean) {
  return gompertz_partial_mean(p, x) / mean;
}

/// F1(x): share of total income held by individuals with income <= x.
inline double income_share(const GpdParams& p, double x, double mean_income) {
  detail::require_income(x, "income_share");
  if (x < p.x_t()) return branch::gompertz_income_share(p, x, mean_income);
  return branch::pareto_income_share(p, x, mean_income);
}

inline double income_share(const GpdParams& p, double x) { return income_share(p, x, mean(p)); }

struct LorenzPoint {
  double population;  ///< F(x)
  double income;      ///< F1(x)
};

struct LorenzCurve {
  std::vector<double> grid;
  std::vector<LorenzPoint> points;
};

/// Evaluates (F, F1) on an ascending, nonnegative income grid.
inline LorenzCurve lorenz(const GpdParams& p, std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw DomainError("lorenz: grid values must be nonnegative");
    if (i > 0 && grid[i] < grid[i - 1]) throw DomainError("lorenz: grid must be sorted ascending");
  }
  const double mu = mean(p);
  LorenzCurve curve{{grid.begin(), grid.end()}, {}};
  curve.points.reserve(grid.size());
  for (double x : grid) curve.points.push_back({cdf(p, x), income_share(p, x, mu)});
  return curve;
}

/// Closed-form Gini coefficient. The Gompertz-side double integral
/// integral_0^{x_t} I(x) e^{bx} exp[-eta(e^{bx}-1)] dx is done by nested
/// adaptive quadrature; the Pareto side is a power law in closed form.
inline double gini_analytic(const GpdParams& p) {
  const double mu = mean(p);
  const double a = p.alpha();
  const double survival = p.threshold_survival();
  auto inner = [&p](double x) {
    const double ebx = std::exp(p.b() * x);
    return gompertz_partial_mean(p, x) * ebx * std::exp(-p.eta() * (ebx - 1.0));
  };
  const double gompertz_term =
      p.eta() * p.b() / mu * quadrature::integrate(inner, 0.0, p.x_t(), kQuadratureTolerance);
  const double pareto_term = a * a * p.x_t() * survival * survival / (mu * (1.0 - a) * (2.0 * a - 1.0));
  return 1.0 - 2.0 * (gompertz_term + survival + pareto_term);
}

}  // namespace gpcycle
