#pragma once

// Independent reference computations for tests. Nothing here calls the
// library's quadrature, mean or Lorenz code; integrals go through Boost.Math.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gpcycle::testing::oracle {

struct RawParams {
  double x_t, eta, b, alpha;
};

/// 1 - F(x) above the threshold, written out in log space.
inline double pareto_survival(const RawParams& p, double x) {
  return std::exp(p.alpha * std::log(p.x_t) - p.eta * (std::exp(p.b * p.x_t) - 1.0) - p.alpha * std::log(x));
}

inline double density(const RawParams& p, double x) {
  if (x < p.x_t) return p.eta * p.b * std::exp(p.b * x - p.eta * (std::exp(p.b * x) - 1.0));
  return p.alpha * std::exp(p.alpha * std::log(p.x_t) - p.eta * (std::exp(p.b * p.x_t) - 1.0)) *
         std::pow(x, -p.alpha - 1.0);
}

inline double gk(auto f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
}

inline double tail(auto f, double a) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double t) { return f(a + t); }, 0.0, std::numeric_limits<double>::infinity());
}

inline double total_mass(const RawParams& p) {
  return gk([&](double x) { return density(p, x); }, 0.0, p.x_t) +
         tail([&](double x) { return density(p, x); }, p.x_t);
}

inline double mean(const RawParams& p) {
  return gk([&](double x) { return x * density(p, x); }, 0.0, p.x_t) +
         tail([&](double x) { return x * density(p, x); }, p.x_t);
}

/// Gini = 1 - 2 integral_0^inf F1(x) f(x) dx with F1 from nested quadrature.
inline double gini_eq20(const RawParams& p) {
  const double mu = mean(p);
  auto share = [&](double x) {
    if (x < p.x_t) return gk([&](double y) { return y * density(p, y); }, 0.0, x) / mu;
    return 1.0 - tail([&](double y) { return y * density(p, y); }, x) / mu;
  };
  const double lower = gk([&](double x) { return share(x) * density(p, x); }, 0.0, p.x_t);
  const double upper = tail([&](double x) { return share(x) * density(p, x); }, p.x_t);
  return 1.0 - 2.0 * (lower + upper);
}

/// O(n^2) counting ECDF.
inline double naive_ecdf(std::span<const double> values, double x) {
  std::size_t count = 0;
  for (double v : values) count += v <= x ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(values.size());
}

struct MeanEstimate {
  double mean;
  double standard_error;
};

inline MeanEstimate sample_mean(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double var = ss / static_cast<double>(values.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(values.size()))};
}

/// Kolmogorov-Smirnov sup distance between the sample ECDF and cdf.
inline double ks_statistic(std::vector<double> values, auto cdf) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace gpcycle::testing::oracle
