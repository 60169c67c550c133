#pragma once

// Goodwin growth cycle in Lotka-Volterra form.
//
//   dv/dt / v = a2 - b2 u      (employment rate v, the "prey")
//   du/dt / u = -a1 + b1 v     (wage share u, the "predator")
//
// u and v are carried in percent throughout, so b1 and b2 are rates per
// percentage point, a1 and a2 are rates per year, the center
// (v_c, u_c) = (a1 / b1, a2 / b2) is in percent and T = 2 pi / sqrt(a1 a2) in years.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gpcycle/errors.hpp"
#include "gpcycle/gpd.hpp"

namespace gpcycle {

struct UvPoint {
  int year = 0;
  double u = 0.0;  ///< wage share, percent
  double v = 0.0;  ///< employment rate, percent
};

using UvSeries = std::vector<UvPoint>;

struct LvCoefficients {
  double a1 = 0.0;
  double b1 = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
  double u_c = std::numeric_limits<double>::quiet_NaN();
  double v_c = std::numeric_limits<double>::quiet_NaN();
  double T = std::numeric_limits<double>::quiet_NaN();
  double r1_fit_rss = 0.0;  ///< residuals of the u-equation regression
  double r2_fit_rss = 0.0;  ///< residuals of the v-equation regression

  /// Fills center and period from the rates; undefined ones stay NaN.
  static LvCoefficients from_rates(double a1, double b1, double a2, double b2) {
    LvCoefficients c{a1, b1, a2, b2};
    if (b1 != 0.0) c.v_c = a1 / b1;
    if (b2 != 0.0) c.u_c = a2 / b2;
    if (a1 * a2 > 0.0) c.T = 2.0 * std::numbers::pi / std::sqrt(a1 * a2);
    return c;
  }

  /// a2 > 0: employment can grow when labor takes no share.
  bool has_growth_regime() const noexcept { return a2 > 0.0; }
  bool is_cycle() const noexcept { return a1 > 0.0 && b1 > 0.0 && a2 > 0.0 && b2 > 0.0; }
};

struct GoodwinStructuralParams {
  double sigma_inv = 0.0;  ///< capital productivity 1 / sigma
  double alpha_lp = 0.0;   ///< labor productivity growth rate
  double beta_pg = 0.0;    ///< population growth rate
  double rho = 0.0;        ///< Phillips-curve slope
  double gamma = 0.0;      ///< Phillips-curve constant
};

/// (u, v) in percent from a fitted distribution: v = 1 - F(x_d), u = F1(x_t).
inline UvPoint uv_from_fit(int year, const GpdParams& p, double x_d) {
  if (!(x_d > 0.0 && x_d < p.x_t())) {
    throw DomainError("uv_from_fit: x_d must lie in (0, x_t) = (0, " + std::to_string(p.x_t()) + "), got " +
                      std::to_string(x_d));
  }
  const double mu = mean(p);
  return {year, 100.0 * branch::gompertz_income_share(p, p.x_t(), mu), 100.0 * (1.0 - cdf(p, x_d))};
}

/// a1 = alpha + gamma, b1 = rho, a2 = 1/sigma - (alpha + beta), b2 = 1/sigma.
inline LvCoefficients structural_to_lv(const GoodwinStructuralParams& g) {
  return LvCoefficients::from_rates(g.alpha_lp + g.gamma, g.rho, g.sigma_inv - (g.alpha_lp + g.beta_pg), g.sigma_inv);
}

struct StructuralEstimate {
  GoodwinStructuralParams params;
  /// a2 - (1/sigma - (alpha + beta)); zero when the four rates are consistent.
  double a2_residual = 0.0;
};

/// Inverts the rate mapping given externally supplied productivity and
/// population growth rates (the system is otherwise underdetermined).
inline StructuralEstimate lv_to_structural(const LvCoefficients& c, double alpha_lp, double beta_pg) {
  StructuralEstimate e;
  e.params.alpha_lp = alpha_lp;
  e.params.beta_pg = beta_pg;
  e.params.rho = c.b1;
  e.params.sigma_inv = c.b2;
  e.params.gamma = c.a1 - alpha_lp;
  e.a2_residual = c.a2 - (c.b2 - (alpha_lp + beta_pg));
  return e;
}

/// One row of the derivative/regression table.
struct GrowthRow {
  int year = 0;
  double u = 0.0;
  double v = 0.0;
  double du_dt = 0.0;
  double dv_dt = 0.0;
  double u_rate = 0.0;  ///< (du/dt) / u, per year
  double v_rate = 0.0;  ///< (dv/dt) / v, per year
};

/// Minimum number of consecutive years for cycle estimation.
inline constexpr std::size_t kMinCycleYears = 5;

inline void validate_series(std::span<const UvPoint> series) {
  if (series.size() < kMinCycleYears) {
    throw DataError("cycle estimation needs at least " + std::to_string(kMinCycleYears) +
                    " consecutive years, got " + std::to_string(series.size()));
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& pt = series[i];
    if (!(pt.u > 0.0 && pt.u < 100.0 && pt.v > 0.0 && pt.v < 100.0)) {
      throw DataError("year " + std::to_string(pt.year) + ": u and v must lie in (0, 100) percent");
    }
    if (i > 0 && pt.year != series[i - 1].year + 1) {
      throw DataError("years must be consecutive; " + std::to_string(series[i - 1].year) + " is followed by " +
                      std::to_string(pt.year));
    }
  }
}

/// Time derivatives with a one-year step: central differences inside,
/// one-sided at both ends.
inline std::vector<GrowthRow> growth_rates(std::span<const UvPoint> series) {
  validate_series(series);
  const std::size_t n = series.size();
  std::vector<GrowthRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    double du = 0.0, dv = 0.0;
    if (i == 0) {
      du = series[1].u - series[0].u;
      dv = series[1].v - series[0].v;
    } else if (i + 1 == n) {
      du = series[i].u - series[i - 1].u;
      dv = series[i].v - series[i - 1].v;
    } else {
      du = 0.5 * (series[i + 1].u - series[i - 1].u);
      dv = 0.5 * (series[i + 1].v - series[i - 1].v);
    }
    rows[i] = {series[i].year, series[i].u, series[i].v, du, dv, du / series[i].u, dv / series[i].v};
  }
  return rows;
}

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;
};

inline LineFit ordinary_least_squares(std::span<const double> x, std::span<const double> y) {
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
  if (!(sxx > 0.0)) throw DataError("cycle regression: regressor has zero variance");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += r * r;
  }
  return f;
}

}  // namespace detail

/// Regresses (du/dt)/u on v (slope b1, intercept -a1) and (dv/dt)/v on u
/// (slope -b2, intercept a2). Slopes of the wrong sign for a cycle throw a
/// DataError carrying both fitted lines.
inline LvCoefficients estimate_lv(std::span<const UvPoint> series) {
  const auto rows = growth_rates(series);
  std::vector<double> u, v, ur, vr;
  for (const auto& r : rows) {
    u.push_back(r.u);
    v.push_back(r.v);
    ur.push_back(r.u_rate);
    vr.push_back(r.v_rate);
  }
  const auto wage_eq = detail::ordinary_least_squares(v, ur);
  const auto employment_eq = detail::ordinary_least_squares(u, vr);
  const double b1 = wage_eq.slope;
  const double b2 = -employment_eq.slope;
  if (!(b1 > 0.0) || !(b2 > 0.0)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "estimate_lv: regression slopes do not describe a Goodwin cycle: "
        << "(du/dt)/u = " << wage_eq.intercept << " + " << wage_eq.slope << " v (need positive slope), "
        << "(dv/dt)/v = " << employment_eq.intercept << " + " << employment_eq.slope << " u (need negative slope)";
    throw DataError(msg.str());
  }
  auto c = LvCoefficients::from_rates(-wage_eq.intercept, b1, employment_eq.intercept, b2);
  c.r1_fit_rss = wage_eq.rss;
  c.r2_fit_rss = employment_eq.rss;
  return c;
}

}  // namespace gpcycle
