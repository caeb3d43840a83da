// SPDX-License-Identifier: Apache-2.0
#include "eth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eth/error.hpp"
#include "eth/tensor.hpp"

namespace eth::geo {
namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + ": non-finite coordinate");
  }
}

void require_compatible(const PoincarePoint& x, const PoincarePoint& y) {
  if (x.dim() != y.dim()) throw InvalidArgument("poincare: dimension mismatch");
  if (!(x.curvature() == y.curvature())) throw InvalidArgument("poincare: curvature mismatch");
}

std::vector<double> scaled(std::span<const double> v, double s) {
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x *= s;
  return out;
}

}  // namespace

Curvature::Curvature(double c) : c_(c) {
  if (!std::isfinite(c) || !(c > 0.0)) {
    throw InvalidArgument("curvature must be finite and > 0, got " + std::to_string(c));
  }
}

double Curvature::sqrt() const { return std::sqrt(c_); }

TangentVector::TangentVector(std::vector<double> coords) : coords_(std::move(coords)) {
  require_finite(coords_, "tangent vector");
}

double TangentVector::norm() const { return std::sqrt(squared_norm(coords_)); }

PoincarePoint::PoincarePoint(std::vector<double> coords, Curvature curvature)
    : coords_(std::move(coords)), curvature_(curvature) {
  require_finite(coords_, "poincare point");
  if (curvature_.value() * squared_norm(coords_) >= 1.0) {
    throw InvalidArgument("poincare point lies outside the ball of curvature " +
                          std::to_string(curvature_.value()));
  }
}

PoincarePoint PoincarePoint::origin(std::size_t dim, Curvature curvature) {
  return PoincarePoint(std::vector<double>(dim, 0.0), curvature);
}

double PoincarePoint::norm() const { return std::sqrt(squared_norm(coords_)); }

double max_radius(Curvature c) { return (1.0 - kBallEps) / c.sqrt(); }

PoincarePoint project_to_ball(std::span<const double> coords, Curvature c) {
  require_finite(coords, "project_to_ball");
  const double s = kernel::project_scale(squared_norm(coords), c.value());
  return PoincarePoint(scaled(coords, s), c);
}

PoincarePoint exp_map_zero(const TangentVector& v, Curvature c) {
  const double n2 = squared_norm(v.coords());
  if (std::sqrt(n2) < kSmallNormEps) {
    return PoincarePoint(std::vector<double>(v.coords().begin(), v.coords().end()), c);
  }
  return PoincarePoint(scaled(v.coords(), kernel::exp_scale(n2, c.value())), c);
}

TangentVector log_map_zero(const PoincarePoint& u) {
  const double n2 = squared_norm(u.coords());
  if (n2 == 0.0) return TangentVector(std::vector<double>(u.dim(), 0.0));
  return TangentVector(scaled(u.coords(), kernel::log_scale(n2, u.curvature().value())));
}

PoincarePoint mobius_add(const PoincarePoint& x, const PoincarePoint& y) {
  require_compatible(x, y);
  const double c = x.curvature().value();
  const auto k = kernel::mobius_coeffs(dot(x.coords(), y.coords()), squared_norm(x.coords()),
                                       squared_norm(y.coords()), c);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = k.x * x.coords()[i] + k.y * y.coords()[i];
  return project_to_ball(out, x.curvature());
}

double poincare_distance(const PoincarePoint& x, const PoincarePoint& y) {
  require_compatible(x, y);
  const double c = x.curvature().value();
  // (-x) (+) y evaluated coordinate-wise: the Gram-form shortcut loses
  // precision for nearly coincident points.
  std::vector<double> neg_x = scaled(x.coords(), -1.0);
  const auto k = kernel::mobius_coeffs(dot(neg_x, y.coords()), squared_norm(neg_x),
                                       squared_norm(y.coords()), c);
  double m2 = 0.0;
  for (std::size_t i = 0; i < neg_x.size(); ++i) {
    const double z = k.x * neg_x[i] + k.y * y.coords()[i];
    m2 += z * z;
  }
  const double z = std::min(std::sqrt(c * m2), 1.0 - kAtanhEps);
  return 2.0 / std::sqrt(c) * std::atanh(z);
}

}  // namespace eth::geo
