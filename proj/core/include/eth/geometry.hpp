// SPDX-License-Identifier: Apache-2.0
#pragma once

// Poincare-ball operations at the origin's tangent space. Curvature is carried
// by every point so relation-specific balls can coexist.

#include <cstddef>
#include <span>
#include <vector>

#include "eth/geometry_kernels.hpp"

namespace eth::geo {

// Magnitude c of the negative curvature -c. Always finite and > 0.
class Curvature {
 public:
  explicit Curvature(double c);
  double value() const { return c_; }
  double sqrt() const;
  friend bool operator==(Curvature, Curvature) = default;

 private:
  double c_;
};

class TangentVector {
 public:
  explicit TangentVector(std::vector<double> coords);
  std::span<const double> coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  double norm() const;

 private:
  std::vector<double> coords_;
};

// Point of the open ball {x : c|x|^2 < 1}.
class PoincarePoint {
 public:
  PoincarePoint(std::vector<double> coords, Curvature curvature);
  static PoincarePoint origin(std::size_t dim, Curvature curvature);

  std::span<const double> coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  Curvature curvature() const { return curvature_; }
  double norm() const;

 private:
  std::vector<double> coords_;
  Curvature curvature_;
};

// Largest norm a library-produced point may have: (1 - kBallEps)/sqrt(c).
double max_radius(Curvature c);

PoincarePoint project_to_ball(std::span<const double> coords, Curvature c);
PoincarePoint exp_map_zero(const TangentVector& v, Curvature c);
TangentVector log_map_zero(const PoincarePoint& u);
PoincarePoint mobius_add(const PoincarePoint& x, const PoincarePoint& y);
double poincare_distance(const PoincarePoint& x, const PoincarePoint& y);

}  // namespace eth::geo
