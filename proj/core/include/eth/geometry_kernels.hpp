// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scalar building blocks of the Poincare-ball operations, written over the
// Gram quantities <x,y>, |x|^2, |y|^2 and the curvature c. They are templated
// so the same code runs on double and on Dual<N> (for fused-op gradients).

#include <cmath>

#include "eth/dual.hpp"

namespace eth::geo {

// Keeps exp_0 invertible up to sqrt(c)*|v| = atanh(1 - kBallEps) ~ 7.25.
inline constexpr double kBallEps = 1e-6;
inline constexpr double kAtanhEps = 1e-10;
inline constexpr double kSmallNormEps = 1e-12;

namespace kernel {

using std::atanh;
using std::sqrt;
using std::tanh;

// Below this value of c|v|^2 the ratio functions switch to their Taylor series.
inline constexpr double kSeriesThreshold = 1e-12;

// tanh(z)/z with z = sqrt(c * n2).
template <class T>
T tanh_ratio(const T& n2, const T& c) {
  const T z2 = c * n2;
  if (value_of(z2) < kSeriesThreshold) return 1.0 - z2 / 3.0 + 2.0 * z2 * z2 / 15.0;
  const T z = sqrt(z2);
  return tanh(z) / z;
}

// atanh(z)/z for z = sqrt(z2); z2 must already be clamped below 1.
template <class T>
T atanh_ratio(const T& z2) {
  if (value_of(z2) < kSeriesThreshold) return 1.0 + z2 / 3.0 + z2 * z2 / 5.0;
  const T z = sqrt(z2);
  return atanh(z) / z;
}

// Factor s such that s*v lies within radius (1 - kBallEps)/sqrt(c).
template <class T>
T project_scale(const T& n2, const T& c) {
  constexpr double limit = 1.0 - kBallEps;
  const T z2 = c * n2;
  if (value_of(z2) >= limit * limit) return limit / sqrt(z2);
  return T(1.0);
}

// exp_0^c(v) = exp_scale(|v|^2, c) * v, including the ball projection.
template <class T>
T exp_scale(const T& n2, const T& c) {
  const T g = tanh_ratio(n2, c);
  return g * project_scale(g * g * n2, c);
}

// log_0^c(u) = log_scale(|u|^2, c) * u, with the atanh argument clamped.
template <class T>
T log_scale(const T& n2, const T& c) {
  constexpr double zmax = 1.0 - kAtanhEps;
  T z2 = c * n2;
  if (value_of(z2) > zmax * zmax) {
    // atanh(zmax)/z with z unclamped
    return std::atanh(zmax) / sqrt(z2);
  }
  return atanh_ratio(z2);
}

template <class T>
struct MobiusCoeffs {
  T x;  // weight on the left operand
  T y;  // weight on the right operand
};

// x (+)_c y = coeffs.x * x + coeffs.y * y
template <class T>
MobiusCoeffs<T> mobius_coeffs(const T& xy, const T& xx, const T& yy, const T& c) {
  const T den = 1.0 + 2.0 * c * xy + c * c * xx * yy;
  return {(1.0 + 2.0 * c * xy + c * yy) / den, (1.0 - c * xx) / den};
}

// |(-x) (+)_c y|^2 from Gram quantities of x and y.
template <class T>
T mobius_neg_sqnorm(const T& xy, const T& xx, const T& yy, const T& c) {
  const auto k = mobius_coeffs(-xy, xx, yy, c);
  T n2 = k.x * k.x * xx - 2.0 * k.x * k.y * xy + k.y * k.y * yy;
  if (value_of(n2) < 0.0) n2 = T(0.0);
  return n2;
}

// Squared geodesic distance (2/sqrt(c) atanh(sqrt(c)|(-x)(+)y|))^2, written
// without the square root so it stays smooth at x == y.
template <class T>
T sqdist_from_gram(const T& xy, const T& xx, const T& yy, const T& c) {
  constexpr double zmax = 1.0 - kAtanhEps;
  const T m2 = mobius_neg_sqnorm(xy, xx, yy, c);
  T z2 = c * m2;
  if (value_of(z2) > zmax * zmax) z2 = T(zmax * zmax);
  const T q = atanh_ratio(z2);
  return 4.0 * z2 * q * q / c;
}

// Squared distance between a ball point x and exp_0^c(h) for a tangent h,
// from <x,h>, |x|^2, |h|^2.
template <class T>
T sqdist_to_exp(const T& xh, const T& xx, const T& hh, const T& c) {
  const T g = exp_scale(hh, c);
  return sqdist_from_gram(g * xh, xx, g * g * hh, c);
}

}  // namespace kernel
}  // namespace eth::geo
