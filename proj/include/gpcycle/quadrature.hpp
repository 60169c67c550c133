#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature with an absolute error target.

#include <array>
#include <cmath>
#include <cstddef>

namespace gpcycle::quadrature {

namespace detail {

// Kronrod abscissae on [0,1] half-interval; odd indices are the Gauss nodes.
inline constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double value;
  double error;
};

template <class F>
Panel gauss_kronrod_15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWk[7];
  double gauss = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
double adaptive(F& f, double a, double b, double tol, Panel whole, int depth) {
  if (whole.error <= tol || depth <= 0 || !(b - a > 0.0)) return whole.value;
  const double mid = 0.5 * (a + b);
  const Panel left = gauss_kronrod_15(f, a, mid);
  const Panel right = gauss_kronrod_15(f, mid, b);
  if (left.error + right.error <= tol) return left.value + right.value;
  return adaptive(f, a, mid, 0.5 * tol, left, depth - 1) +
         adaptive(f, mid, b, 0.5 * tol, right, depth - 1);
}

}  // namespace detail

/// Integrates f over [a, b] by recursive bisection until the summed
/// Kronrod-minus-Gauss error estimate is below abs_tol. Deterministic.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-9, int max_depth = 40) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, abs_tol, max_depth);
  const auto whole = detail::gauss_kronrod_15(f, a, b);
  return detail::adaptive(f, a, b, abs_tol, whole, max_depth);
}

}  // namespace gpcycle::quadrature
