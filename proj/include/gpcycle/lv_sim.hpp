#pragma once

// Verification oracles: fixed-step RK4 integration of the Lotka-Volterra
// system, orbital period measurement, and inverse-CDF sampling of a
// Gompertz-Pareto distribution.
//
//   dx/dt = x (a2 - b2 y),   dy/dt = y (-a1 + b1 x)
//
// with first integral H(x, y) = b1 x - a1 ln x + b2 y - a2 ln y.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gpcycle/empirical.hpp"
#include "gpcycle/errors.hpp"
#include "gpcycle/goodwin.hpp"
#include "gpcycle/gpd.hpp"

namespace gpcycle {

struct LvState {
  double x = 0.0;  ///< prey (employment rate v)
  double y = 0.0;  ///< predator (wage share u)
};

struct SimConfig {
  LvCoefficients coeffs;
  LvState initial;
  double dt = 1e-3;    ///< years
  double t_end = 1.0;  ///< years
  double t_start = 0.0;

  void validate() const {
    if (!(dt > 0.0)) throw ParameterError("SimConfig: dt must be positive");
    if (!(t_end - t_start >= dt)) throw ParameterError("SimConfig: duration must be at least one step");
    if (!(initial.x > 0.0 && initial.y > 0.0)) throw ParameterError("SimConfig: initial state must be positive");
  }
};

struct Trajectory {
  LvCoefficients coeffs;
  std::vector<double> times;
  std::vector<LvState> states;
  std::vector<double> conserved;
};

inline double lv_invariant(const LvCoefficients& c, const LvState& s) {
  return c.b1 * s.x - c.a1 * std::log(s.x) + c.b2 * s.y - c.a2 * std::log(s.y);
}

inline LvState lv_field(const LvCoefficients& c, const LvState& s) {
  return {s.x * (c.a2 - c.b2 * s.y), s.y * (-c.a1 + c.b1 * s.x)};
}

inline LvState rk4_step(const LvCoefficients& c, const LvState& s, double h) {
  auto shifted = [&s](const LvState& k, double f) { return LvState{s.x + f * k.x, s.y + f * k.y}; };
  const LvState k1 = lv_field(c, s);
  const LvState k2 = lv_field(c, shifted(k1, 0.5 * h));
  const LvState k3 = lv_field(c, shifted(k2, 0.5 * h));
  const LvState k4 = lv_field(c, shifted(k3, h));
  return {s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)};
}

/// Classical RK4 with a fixed step. The final step is shortened to land on t_end.
inline Trajectory integrate(const SimConfig& cfg) {
  cfg.validate();
  Trajectory traj{cfg.coeffs, {}, {}, {}};
  const double span = cfg.t_end - cfg.t_start;
  const auto steps = static_cast<std::size_t>(std::ceil(span / cfg.dt - 1e-9));
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.conserved.reserve(steps + 1);

  LvState s = cfg.initial;
  traj.times.push_back(cfg.t_start);
  traj.states.push_back(s);
  traj.conserved.push_back(lv_invariant(cfg.coeffs, s));
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t_prev = traj.times.back();
    const double t_next = i == steps ? cfg.t_end : cfg.t_start + static_cast<double>(i) * cfg.dt;
    s = rk4_step(cfg.coeffs, s, t_next - t_prev);
    if (!(s.x > 0.0 && s.y > 0.0)) {
      throw ConvergenceError("integrate: state became nonpositive at t = " + std::to_string(t_next) +
                             "; use a smaller dt than " + std::to_string(cfg.dt));
    }
    traj.times.push_back(t_next);
    traj.states.push_back(s);
    traj.conserved.push_back(lv_invariant(cfg.coeffs, s));
  }
  return traj;
}

/// Mean period between successive upward crossings of x = a1 / b1, located
/// by linear interpolation between the bracketing steps.
inline double measure_period(const Trajectory& t) {
  if (!(t.coeffs.b1 != 0.0)) throw ParameterError("measure_period: b1 must be nonzero");
  const double section = t.coeffs.a1 / t.coeffs.b1;
  std::vector<double> crossings;
  for (std::size_t i = 1; i < t.states.size(); ++i) {
    const double x0 = t.states[i - 1].x - section;
    const double x1 = t.states[i].x - section;
    if (x0 < 0.0 && x1 >= 0.0) {
      const double frac = -x0 / (x1 - x0);
      crossings.push_back(t.times[i - 1] + frac * (t.times[i] - t.times[i - 1]));
    }
  }
  if (crossings.size() < 2) {
    throw DataError("measure_period: found " + std::to_string(crossings.size()) +
                    " upward section crossings, need at least 2");
  }
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

/// Uniform double on [0, 1) from the top 53 bits of a 64-bit Mersenne Twister
/// (std::mt19937_64) draw.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// n inverse-CDF draws; identical (params, n, seed) give identical samples.
inline IncomeSample sample_gpd(const GpdParams& p, std::size_t n, std::uint64_t seed, int year = 0) {
  if (n == 0) throw DomainError("sample_gpd: n must be at least 1");
  std::mt19937_64 gen(seed);
  IncomeSample s;
  s.year = year;
  s.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(quantile(p, uniform01(gen)));
  return s;
}

}  // namespace gpcycle
