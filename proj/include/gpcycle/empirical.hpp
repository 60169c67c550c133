#pragma once

// Per-year income microdata: unit-mean normalization, empirical CDF,
// raw-data Gini coefficient and population shares below income thresholds.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gpcycle/errors.hpp"
#include "gpcycle/gpd.hpp"

namespace gpcycle {

/// Minimum observation count for a sample to be fitted.
inline constexpr std::size_t kMinFitObservations = 100;

struct IncomeSample {
  int year = 0;
  std::vector<double> values;
  bool normalized = false;
  /// Currency amount that maps to 1.0 after normalization (the raw sample mean);
  /// 1.0 for samples that were never normalized.
  double unit = 1.0;

  std::size_t n() const noexcept { return values.size(); }

  double mean() const {
    if (values.empty()) throw DataError("IncomeSample: empty sample for year " + std::to_string(year));
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
};

struct YearConfig {
  int year = 0;
  double annual_minimum_wage = 0.0;  ///< currency units
  double x_d_fraction = 0.5;

  void validate() const {
    if (!(annual_minimum_wage > 0.0)) {
      throw DataError("YearConfig " + std::to_string(year) + ": annual minimum wage must be positive");
    }
    if (!(x_d_fraction > 0.0 && x_d_fraction < 1.0)) {
      throw DataError("YearConfig " + std::to_string(year) + ": x_d fraction must lie in (0, 1)");
    }
  }

  double minimum_wage_normalized(const IncomeSample& s) const { return annual_minimum_wage / s.unit; }
  /// Effective-unemployment cutoff x_d in the sample's normalized units.
  double x_d_normalized(const IncomeSample& s) const { return x_d_fraction * minimum_wage_normalized(s); }
};

/// Divides every value by the sample mean. Order is preserved.
inline IncomeSample normalize(IncomeSample s) {
  if (s.values.empty()) throw DataError("normalize: empty sample for year " + std::to_string(s.year));
  if (s.normalized) throw DataError("normalize: sample for year " + std::to_string(s.year) + " is already normalized");
  const double m = s.mean();
  if (!(m > 0.0)) throw DataError("normalize: sample mean must be positive for year " + std::to_string(s.year));
  for (double& v : s.values) v /= m;
  s.normalized = true;
  s.unit *= m;
  return s;
}

/// Right-continuous step function F(x) = #{values <= x} / n.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const double> values) : sorted_(values.begin(), values.end()) {
    if (sorted_.empty()) throw DataError("EmpiricalCdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
  }
  explicit EmpiricalCdf(const IncomeSample& s) : EmpiricalCdf(std::span<const double>(s.values)) {}

  double operator()(double x) const {
    const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
    return static_cast<double>(count) / static_cast<double>(sorted_.size());
  }

  std::span<const double> sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return sorted_.size(); }

  /// Type-7 (linear interpolation) sample quantile, p in [0, 1].
  double quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("EmpiricalCdf::quantile: p must lie in [0, 1]");
    const double h = p * static_cast<double>(sorted_.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted_.size()) return sorted_.back();
    return sorted_[lo] + (h - static_cast<double>(lo)) * (sorted_[lo + 1] - sorted_[lo]);
  }

 private:
  std::vector<double> sorted_;
};

/// Gini from sorted data: 2 sum_i i x_(i) / (n sum x) - (n + 1) / n.
inline double gini_raw(std::span<const double> values) {
  if (values.size() < 2) throw DataError("gini_raw: need at least two observations");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0) throw DataError("gini_raw: incomes must be nonnegative");
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    weighted += static_cast<double>(i + 1) * sorted[i];
  }
  if (!(total > 0.0)) throw DataError("gini_raw: all incomes are zero");
  const auto n = static_cast<double>(sorted.size());
  return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

inline double gini_raw(const IncomeSample& s) { return gini_raw(std::span<const double>(s.values)); }

struct PopulationShares {
  double below_x_d = 0.0;
  double below_minimum_wage = 0.0;
  double below_x_t = 0.0;
};

/// Empirical population fractions at or below x_d, the minimum wage and x_t
/// (all in normalized units). Ties count as below.
inline PopulationShares population_shares(const EmpiricalCdf& ecdf, double x_d, double minimum_wage, double x_t) {
  if (!(x_d <= minimum_wage && minimum_wage <= x_t)) {
    throw DataError("population_shares: thresholds must be ascending (x_d=" + std::to_string(x_d) +
                    ", minimum wage=" + std::to_string(minimum_wage) + ", x_t=" + std::to_string(x_t) + ")");
  }
  return {ecdf(x_d), ecdf(minimum_wage), ecdf(x_t)};
}

inline PopulationShares population_shares(const IncomeSample& s, const YearConfig& cfg, const GpdParams& p) {
  if (!s.normalized) throw DataError("population_shares: sample must be normalized");
  cfg.validate();
  return population_shares(EmpiricalCdf(s), cfg.x_d_normalized(s), cfg.minimum_wage_normalized(s), p.x_t());
}

}  // namespace gpcycle
