// SPDX-License-Identifier: Apache-2.0
#include "eth/hyperbolic_ops.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "eth/dual.hpp"
#include "eth/error.hpp"
#include "eth/geometry_kernels.hpp"

namespace eth::ad {
namespace {

namespace k = geo::kernel;

Tape& common_tape(std::initializer_list<Var> vars, const char* op) {
  Tape* t = vars.begin()->tape;
  for (const Var& v : vars) {
    if (v.tape == nullptr || v.tape != t) {
      throw InvalidArgument(std::string(op) + ": operands must share a tape");
    }
  }
  return *t;
}

void require_curvature(const Tensor& c, std::size_t rows, const char* op) {
  if (c.cols() != 1 || c.rows() != rows) {
    throw InvalidArgument(std::string(op) + ": curvature must be " + std::to_string(rows) + "x1");
  }
  for (double ci : c.values()) {
    if (!(ci > 0.0)) throw InvalidArgument(std::string(op) + ": curvature must be > 0");
  }
}

using D2 = Dual<2>;
using D4 = Dual<4>;

// out_i = phi(|v_i|^2, c_i) * v_i
template <class Phi>
Var radial(const char* op, Var v, Var c, Phi phi) {
  Tape& t = common_tape({v, c}, op);
  const Tensor& x = v.value();
  require_curvature(c.value(), x.rows(), op);
  Tensor out = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double s = phi(squared_norm(x.row(i)), c.value()[i]);
    for (double& e : out.row(i)) e *= s;
  }
  return t.record(op, std::move(out), {v, c}, [iv = v.id, ic = c.id, phi](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    const Tensor& xv = tp.value(iv);
    const Tensor& cv = tp.value(ic);
    Tensor* gv = tp.grad_buffer(iv);
    Tensor* gc = tp.grad_buffer(ic);
    for (std::size_t i = 0; i < xv.rows(); ++i) {
      const D2 s = phi(D2::variable(squared_norm(xv.row(i)), 0), D2::variable(cv[i], 1));
      const double proj = dot(g.row(i), xv.row(i));
      if (gv != nullptr) {
        for (std::size_t j = 0; j < xv.cols(); ++j) {
          (*gv)(i, j) += s.v * g(i, j) + 2.0 * s.d[0] * proj * xv(i, j);
        }
      }
      if (gc != nullptr) (*gc)[i] += s.d[1] * proj;
    }
  });
}

struct ExpScale {
  template <class T>
  T operator()(const T& n2, const T& c) const { return k::exp_scale(n2, c); }
};

struct ProjectScale {
  template <class T>
  T operator()(const T& n2, const T& c) const { return k::project_scale(n2, c); }
};

Var mobius_add_raw(Var x, Var y, Var c) {
  constexpr const char* op = "mobius_add_rows";
  Tape& t = common_tape({x, y, c}, op);
  const Tensor& xv = x.value();
  const Tensor& yv = y.value();
  if (!xv.same_shape(yv)) throw InvalidArgument("mobius_add_rows: shape mismatch");
  require_curvature(c.value(), xv.rows(), op);
  Tensor out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    const auto m = k::mobius_coeffs(dot(xv.row(i), yv.row(i)), squared_norm(xv.row(i)),
                                    squared_norm(yv.row(i)), c.value()[i]);
    for (std::size_t j = 0; j < xv.cols(); ++j) out(i, j) = m.x * xv(i, j) + m.y * yv(i, j);
  }
  return t.record(op, std::move(out), {x, y, c},
                  [ix = x.id, iy = y.id, ic = c.id](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    const Tensor& xv2 = tp.value(ix);
                    const Tensor& yv2 = tp.value(iy);
                    const Tensor& cv = tp.value(ic);
                    Tensor* gx = tp.grad_buffer(ix);
                    Tensor* gy = tp.grad_buffer(iy);
                    Tensor* gc = tp.grad_buffer(ic);
                    for (std::size_t i = 0; i < xv2.rows(); ++i) {
                      const auto m = k::mobius_coeffs(
                          D4::variable(dot(xv2.row(i), yv2.row(i)), 0),
                          D4::variable(squared_norm(xv2.row(i)), 1),
                          D4::variable(squared_norm(yv2.row(i)), 2), D4::variable(cv[i], 3));
                      const double p = dot(g.row(i), xv2.row(i));
                      const double q = dot(g.row(i), yv2.row(i));
                      // scalar adjoints of (xy, xx, yy, c)
                      double s[4];
                      for (int a = 0; a < 4; ++a) s[a] = p * m.x.d[a] + q * m.y.d[a];
                      if (gx != nullptr) {
                        for (std::size_t j = 0; j < xv2.cols(); ++j) {
                          (*gx)(i, j) += m.x.v * g(i, j) + s[0] * yv2(i, j) + 2.0 * s[1] * xv2(i, j);
                        }
                      }
                      if (gy != nullptr) {
                        for (std::size_t j = 0; j < xv2.cols(); ++j) {
                          (*gy)(i, j) += m.y.v * g(i, j) + s[0] * xv2(i, j) + 2.0 * s[2] * yv2(i, j);
                        }
                      }
                      if (gc != nullptr) (*gc)[i] += s[3];
                    }
                  });
}

}  // namespace

Var exp_map_rows(Var v, Var c) { return radial("exp_map_rows", v, c, ExpScale{}); }

Var project_rows(Var x, Var c) { return radial("project_rows", x, c, ProjectScale{}); }

Var mobius_add_rows(Var x, Var y, Var c) { return project_rows(mobius_add_raw(x, y, c), c); }

Var poincare_distance_rows(Var x, Var y, Var c) {
  constexpr const char* op = "poincare_distance_rows";
  Tape& t = common_tape({x, y, c}, op);
  const Tensor& xv = x.value();
  const Tensor& yv = y.value();
  if (!xv.same_shape(yv)) throw InvalidArgument("poincare_distance_rows: shape mismatch");
  require_curvature(c.value(), xv.rows(), op);
  Tensor out(xv.rows(), 1);
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    out[i] = std::sqrt(k::sqdist_from_gram(dot(xv.row(i), yv.row(i)), squared_norm(xv.row(i)),
                                           squared_norm(yv.row(i)), c.value()[i]));
  }
  return t.record(op, std::move(out), {x, y, c},
                  [ix = x.id, iy = y.id, ic = c.id](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    const Tensor& dist = tp.value(self);
                    const Tensor& xv2 = tp.value(ix);
                    const Tensor& yv2 = tp.value(iy);
                    const Tensor& cv = tp.value(ic);
                    Tensor* gx = tp.grad_buffer(ix);
                    Tensor* gy = tp.grad_buffer(iy);
                    Tensor* gc = tp.grad_buffer(ic);
                    for (std::size_t i = 0; i < xv2.rows(); ++i) {
                      // d = sqrt(d^2) is not differentiable at coincident points
                      if (dist[i] == 0.0) continue;
                      const D4 sq = k::sqdist_from_gram(
                          D4::variable(dot(xv2.row(i), yv2.row(i)), 0),
                          D4::variable(squared_norm(xv2.row(i)), 1),
                          D4::variable(squared_norm(yv2.row(i)), 2), D4::variable(cv[i], 3));
                      const double w = g[i] * 0.5 / dist[i];
                      if (gx != nullptr) {
                        for (std::size_t j = 0; j < xv2.cols(); ++j) {
                          (*gx)(i, j) += w * (sq.d[0] * yv2(i, j) + 2.0 * sq.d[1] * xv2(i, j));
                        }
                      }
                      if (gy != nullptr) {
                        for (std::size_t j = 0; j < xv2.cols(); ++j) {
                          (*gy)(i, j) += w * (sq.d[0] * xv2(i, j) + 2.0 * sq.d[2] * yv2(i, j));
                        }
                      }
                      if (gc != nullptr) (*gc)[i] += w * sq.d[3];
                    }
                  });
}

Var poincare_pair_sqdist(Var x, Var h, Var c) {
  constexpr const char* op = "poincare_pair_sqdist";
  Tape& t = common_tape({x, h, c}, op);
  const Tensor& xv = x.value();
  const Tensor& hv = h.value();
  if (xv.cols() != hv.cols()) throw InvalidArgument("poincare_pair_sqdist: dimension mismatch");
  require_curvature(c.value(), xv.rows(), op);
  Tensor xh = eth::matmul_nt(xv, hv);
  std::vector<double> xx(xv.rows());
  std::vector<double> hh(hv.rows());
  for (std::size_t i = 0; i < xv.rows(); ++i) xx[i] = squared_norm(xv.row(i));
  for (std::size_t a = 0; a < hv.rows(); ++a) hh[a] = squared_norm(hv.row(a));

  Tensor out(xv.rows(), hv.rows());
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    const double ci = c.value()[i];
    for (std::size_t a = 0; a < hv.rows(); ++a) out(i, a) = k::sqdist_to_exp(xh(i, a), xx[i], hh[a], ci);
  }
  return t.record(
      op, std::move(out), {x, h, c},
      [ix = x.id, ih = h.id, ic = c.id, xh = std::move(xh), xx = std::move(xx),
       hh = std::move(hh)](Tape& tp, std::size_t self) {
        const Tensor& g = tp.grad(self);
        const Tensor& cv = tp.value(ic);
        const std::size_t n = g.rows();
        const std::size_t m = g.cols();
        Tensor f_xh(n, m);
        std::vector<double> f_xx(n, 0.0);
        std::vector<double> f_hh(m, 0.0);
        std::vector<double> f_c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          const D4 xx_i = D4::variable(xx[i], 1);
          const D4 c_i = D4::variable(cv[i], 3);
          for (std::size_t a = 0; a < m; ++a) {
            const double gi = g(i, a);
            if (gi == 0.0) continue;
            const D4 s = k::sqdist_to_exp(D4::variable(xh(i, a), 0), xx_i, D4::variable(hh[a], 2), c_i);
            f_xh(i, a) = gi * s.d[0];
            f_xx[i] += gi * s.d[1];
            f_hh[a] += gi * s.d[2];
            f_c[i] += gi * s.d[3];
          }
        }
        const Tensor& xv2 = tp.value(ix);
        const Tensor& hv2 = tp.value(ih);
        if (Tensor* gx = tp.grad_buffer(ix)) {
          Tensor dx = eth::matmul(f_xh, hv2);
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < xv2.cols(); ++j) dx(i, j) += 2.0 * f_xx[i] * xv2(i, j);
          }
          *gx += dx;
        }
        if (Tensor* gh = tp.grad_buffer(ih)) {
          Tensor dh = eth::matmul_tn(f_xh, xv2);
          for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t j = 0; j < hv2.cols(); ++j) dh(a, j) += 2.0 * f_hh[a] * hv2(a, j);
          }
          *gh += dh;
        }
        if (Tensor* gc = tp.grad_buffer(ic)) {
          for (std::size_t i = 0; i < n; ++i) (*gc)[i] += f_c[i];
        }
      });
}

}  // namespace eth::ad
