// SPDX-License-Identifier: Apache-2.0
#include "eth/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eth/error.hpp"

namespace eth::ad {
namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

Tape& tape_of(Var a, Var b, const char* op) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw InvalidArgument(std::string(op) + ": operands must share a tape");
  }
  return *a.tape;
}

Tape& tape_of(Var a, const char* op) {
  if (a.tape == nullptr) throw InvalidArgument(std::string(op) + ": detached operand");
  return *a.tape;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw InvalidArgument(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                          shape_str(b));
  }
}

void require_index(Index i, std::size_t bound, const char* op) {
  if (i >= bound) {
    throw InvalidArgument(std::string(op) + ": index " + std::to_string(i) + " out of range " +
                          std::to_string(bound));
  }
}

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus_scalar(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// Elementwise op whose derivative is expressed through input x and output y.
template <class F, class DF>
Var unary(Var a, const char* op, F f, DF df) {
  Tape& t = tape_of(a, op);
  Tensor out(a.rows(), a.cols());
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return t.record(op, std::move(out), {a}, [ia = a.id, df](Tape& tp, std::size_t self) {
    Tensor* ga = tp.grad_buffer(ia);
    if (ga == nullptr) return;
    const Tensor& g = tp.grad(self);
    const Tensor& xv = tp.value(ia);
    const Tensor& yv = tp.value(self);
    for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * df(xv[i], yv[i]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b, "matmul");
  return t.record("matmul", eth::matmul(a.value(), b.value()), {a, b},
                  [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    if (Tensor* ga = tp.grad_buffer(ia)) *ga += eth::matmul_nt(g, tp.value(ib));
                    if (Tensor* gb = tp.grad_buffer(ib)) *gb += eth::matmul_tn(tp.value(ia), g);
                  });
}

Var matmul_nt(Var a, Var b) {
  Tape& t = tape_of(a, b, "matmul_nt");
  return t.record("matmul_nt", eth::matmul_nt(a.value(), b.value()), {a, b},
                  [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    if (Tensor* ga = tp.grad_buffer(ia)) *ga += eth::matmul(g, tp.value(ib));
                    if (Tensor* gb = tp.grad_buffer(ib)) *gb += eth::matmul_tn(g, tp.value(ia));
                  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  out += b.value();
  return t.record("add", std::move(out), {a, b}, [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    if (Tensor* ga = tp.grad_buffer(ia)) *ga += g;
    if (Tensor* gb = tp.grad_buffer(ib)) *gb += g;
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b, "sub");
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return t.record("sub", std::move(out), {a, b}, [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    if (Tensor* ga = tp.grad_buffer(ia)) *ga += g;
    if (Tensor* gb = tp.grad_buffer(ib)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
    }
  });
}

Var hadamard(Var a, Var b) {
  Tape& t = tape_of(a, b, "hadamard");
  require_same_shape(a.value(), b.value(), "hadamard");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return t.record("hadamard", std::move(out), {a, b},
                  [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    if (Tensor* ga = tp.grad_buffer(ia)) {
                      const Tensor& bv2 = tp.value(ib);
                      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * bv2[i];
                    }
                    if (Tensor* gb = tp.grad_buffer(ib)) {
                      const Tensor& av = tp.value(ia);
                      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * av[i];
                    }
                  });
}

Var add_row_bias(Var a, Var bias) {
  Tape& t = tape_of(a, bias, "add_row_bias");
  const Tensor& b = bias.value();
  if (b.rows() != 1 || b.cols() != a.cols()) {
    throw InvalidArgument("add_row_bias: bias " + shape_str(b) + " for " + shape_str(a.value()));
  }
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += b[j];
  }
  return t.record("add_row_bias", std::move(out), {a, bias},
                  [ia = a.id, ib = bias.id](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    if (Tensor* ga = tp.grad_buffer(ia)) *ga += g;
                    if (Tensor* gb = tp.grad_buffer(ib)) {
                      for (std::size_t i = 0; i < g.rows(); ++i) {
                        for (std::size_t j = 0; j < g.cols(); ++j) (*gb)[j] += g(i, j);
                      }
                    }
                  });
}

Var add_col_bias(Var a, Var bias) {
  Tape& t = tape_of(a, bias, "add_col_bias");
  const Tensor& b = bias.value();
  if (b.cols() != 1 || b.rows() != a.rows()) {
    throw InvalidArgument("add_col_bias: bias " + shape_str(b) + " for " + shape_str(a.value()));
  }
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += b[i];
  }
  return t.record("add_col_bias", std::move(out), {a, bias},
                  [ia = a.id, ib = bias.id](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    if (Tensor* ga = tp.grad_buffer(ia)) *ga += g;
                    if (Tensor* gb = tp.grad_buffer(ib)) {
                      for (std::size_t i = 0; i < g.rows(); ++i) {
                        for (std::size_t j = 0; j < g.cols(); ++j) (*gb)[i] += g(i, j);
                      }
                    }
                  });
}

Var scale_rows(Var a, Var s) {
  Tape& t = tape_of(a, s, "scale_rows");
  const Tensor& sv = s.value();
  if (sv.cols() != 1 || sv.rows() != a.rows()) {
    throw InvalidArgument("scale_rows: scale " + shape_str(sv) + " for " + shape_str(a.value()));
  }
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (double& x : out.row(i)) x *= sv[i];
  }
  return t.record("scale_rows", std::move(out), {a, s},
                  [ia = a.id, is = s.id](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    if (Tensor* ga = tp.grad_buffer(ia)) {
                      const Tensor& sv2 = tp.value(is);
                      for (std::size_t i = 0; i < g.rows(); ++i) {
                        for (std::size_t j = 0; j < g.cols(); ++j) (*ga)(i, j) += g(i, j) * sv2[i];
                      }
                    }
                    if (Tensor* gs = tp.grad_buffer(is)) {
                      const Tensor& av = tp.value(ia);
                      for (std::size_t i = 0; i < g.rows(); ++i) (*gs)[i] += dot(g.row(i), av.row(i));
                    }
                  });
}

Var scale(Var a, double k) { return affine(a, k, 0.0); }

Var affine(Var a, double k, double shift) {
  return unary(
      a, "affine", [k, shift](double x) { return k * x + shift; },
      [k](double, double) { return k; });
}

Var concat_cols(Var a, Var b) {
  Tape& t = tape_of(a, b, "concat_cols");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw InvalidArgument("concat_cols: row mismatch " + shape_str(av) + " vs " + shape_str(bv));
  }
  const std::size_t ca = av.cols();
  Tensor out(av.rows(), ca + bv.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    std::copy(av.row(i).begin(), av.row(i).end(), out.row(i).begin());
    std::copy(bv.row(i).begin(), bv.row(i).end(), out.row(i).begin() + ca);
  }
  return t.record("concat_cols", std::move(out), {a, b},
                  [ia = a.id, ib = b.id, ca](Tape& tp, std::size_t self) {
                    const Tensor& g = tp.grad(self);
                    if (Tensor* ga = tp.grad_buffer(ia)) {
                      for (std::size_t i = 0; i < g.rows(); ++i) {
                        for (std::size_t j = 0; j < ca; ++j) (*ga)(i, j) += g(i, j);
                      }
                    }
                    if (Tensor* gb = tp.grad_buffer(ib)) {
                      for (std::size_t i = 0; i < g.rows(); ++i) {
                        for (std::size_t j = ca; j < g.cols(); ++j) (*gb)(i, j - ca) += g(i, j);
                      }
                    }
                  });
}

Var mean_rows(Var a) {
  Tape& t = tape_of(a, "mean_rows");
  const Tensor& av = a.value();
  if (av.rows() == 0) throw InvalidArgument("mean_rows: no rows");
  Tensor out(1, av.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    for (std::size_t j = 0; j < av.cols(); ++j) out[j] += av(i, j);
  }
  const double inv = 1.0 / static_cast<double>(av.rows());
  out *= inv;
  return t.record("mean_rows", std::move(out), {a}, [ia = a.id, inv](Tape& tp, std::size_t self) {
    Tensor* ga = tp.grad_buffer(ia);
    if (ga == nullptr) return;
    const Tensor& g = tp.grad(self);
    for (std::size_t i = 0; i < ga->rows(); ++i) {
      for (std::size_t j = 0; j < ga->cols(); ++j) (*ga)(i, j) += g[j] * inv;
    }
  });
}

Var row_sum(Var a) {
  Tape& t = tape_of(a, "row_sum");
  const Tensor& av = a.value();
  Tensor out(av.rows(), 1);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    for (double x : av.row(i)) out[i] += x;
  }
  return t.record("row_sum", std::move(out), {a}, [ia = a.id](Tape& tp, std::size_t self) {
    Tensor* ga = tp.grad_buffer(ia);
    if (ga == nullptr) return;
    const Tensor& g = tp.grad(self);
    for (std::size_t i = 0; i < ga->rows(); ++i) {
      for (double& x : ga->row(i)) x += g[i];
    }
  });
}

Var sum_all(Var a) {
  Tape& t = tape_of(a, "sum_all");
  double s = 0.0;
  for (double x : a.value().values()) s += x;
  return t.record("sum_all", Tensor::scalar(s), {a}, [ia = a.id](Tape& tp, std::size_t self) {
    Tensor* ga = tp.grad_buffer(ia);
    if (ga == nullptr) return;
    const double g = tp.grad(self)[0];
    for (double& x : ga->values()) x += g;
  });
}

Var mean_all(Var a) {
  if (a.value().empty()) throw InvalidArgument("mean_all: empty tensor");
  return scale(sum_all(a), 1.0 / static_cast<double>(a.value().size()));
}

Var tanh(Var a) {
  return unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(
      a, "sigmoid", [](double x) { return sigmoid_scalar(x); },
      [](double, double y) { return y * (1.0 - y); });
}

Var relu(Var a) {
  return unary(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var softplus(Var a) {
  return unary(
      a, "softplus", [](double x) { return softplus_scalar(x); },
      [](double x, double) { return sigmoid_scalar(x); });
}

Var arctanh_clamped(Var a, double eps) {
  const double lim = 1.0 - eps;
  return unary(
      a, "arctanh_clamped", [lim](double x) { return std::atanh(std::clamp(x, -lim, lim)); },
      [lim](double x, double) { return std::abs(x) < lim ? 1.0 / (1.0 - x * x) : 0.0; });
}

Var rrelu(Var a, const RReluOptions& options) {
  Tape& t = tape_of(a, "rrelu");
  if (!(options.lower <= options.upper)) throw InvalidArgument("rrelu: lower > upper");
  const Tensor& x = a.value();
  Tensor slope(x.rows(), x.cols(), 1.0);
  if (options.training) {
    if (options.rng == nullptr) throw InvalidArgument("rrelu: training mode needs an rng");
    std::uniform_real_distribution<double> dist(options.lower, options.upper);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < 0.0) slope[i] = dist(*options.rng);
    }
  } else {
    const double mid = 0.5 * (options.lower + options.upper);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < 0.0) slope[i] = mid;
    }
  }
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= slope[i];
  return t.record("rrelu", std::move(out), {a},
                  [ia = a.id, slope = std::move(slope)](Tape& tp, std::size_t self) {
                    Tensor* ga = tp.grad_buffer(ia);
                    if (ga == nullptr) return;
                    const Tensor& g = tp.grad(self);
                    for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * slope[i];
                  });
}

Var layer_norm(Var a, double eps) {
  Tape& t = tape_of(a, "layer_norm");
  const Tensor& x = a.value();
  const std::size_t n = x.cols();
  if (n == 0) throw InvalidArgument("layer_norm: zero-width rows");
  Tensor out(x.rows(), n);
  Tensor sigma(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    double mu = 0.0;
    for (double v : row) mu += v;
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (double v : row) var += (v - mu) * (v - mu);
    var /= static_cast<double>(n);
    sigma[i] = std::sqrt(var);
    const double inv = 1.0 / (sigma[i] + eps);
    for (std::size_t j = 0; j < n; ++j) out(i, j) = (row[j] - mu) * inv;
  }
  return t.record(
      "layer_norm", std::move(out), {a},
      [ia = a.id, eps, sigma = std::move(sigma)](Tape& tp, std::size_t self) {
        Tensor* ga = tp.grad_buffer(ia);
        if (ga == nullptr) return;
        const Tensor& g = tp.grad(self);
        const Tensor& y = tp.value(self);
        const std::size_t n = g.cols();
        const double nd = static_cast<double>(n);
        for (std::size_t i = 0; i < g.rows(); ++i) {
          const double s = sigma[i] + eps;
          // centred input is y * s
          double gmean = 0.0;
          double gx = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            gmean += g(i, j);
            gx += g(i, j) * y(i, j) * s;
          }
          gmean /= nd;
          const double k = sigma[i] > 0.0 ? gx / (nd * sigma[i] * s * s) : 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            (*ga)(i, j) += (g(i, j) - gmean) / s - k * y(i, j) * s;
          }
        }
      });
}

Var row_norm(Var a) {
  Tape& t = tape_of(a, "row_norm");
  const Tensor& x = a.value();
  Tensor out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = std::sqrt(squared_norm(x.row(i)));
  return t.record("row_norm", std::move(out), {a}, [ia = a.id](Tape& tp, std::size_t self) {
    Tensor* ga = tp.grad_buffer(ia);
    if (ga == nullptr) return;
    const Tensor& g = tp.grad(self);
    const Tensor& y = tp.value(self);
    const Tensor& xv = tp.value(ia);
    for (std::size_t i = 0; i < xv.rows(); ++i) {
      if (y[i] == 0.0) continue;
      const double k = g[i] / y[i];
      for (std::size_t j = 0; j < xv.cols(); ++j) (*ga)(i, j) += k * xv(i, j);
    }
  });
}

Var gather_rows(Var a, std::span<const Index> rows) {
  Tape& t = tape_of(a, "gather_rows");
  const Tensor& x = a.value();
  Tensor out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require_index(rows[i], x.rows(), "gather_rows");
    std::copy(x.row(rows[i]).begin(), x.row(rows[i]).end(), out.row(i).begin());
  }
  return t.record("gather_rows", std::move(out), {a},
                  [ia = a.id, idx = std::vector<Index>(rows.begin(), rows.end())](
                      Tape& tp, std::size_t self) {
                    Tensor* ga = tp.grad_buffer(ia);
                    if (ga == nullptr) return;
                    const Tensor& g = tp.grad(self);
                    for (std::size_t i = 0; i < idx.size(); ++i) {
                      auto dst = ga->row(idx[i]);
                      auto src = g.row(i);
                      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
                    }
                  });
}

Var scatter_mean_rows(Var a, std::span<const Index> index, std::size_t n_out) {
  Tape& t = tape_of(a, "scatter_mean_rows");
  const Tensor& x = a.value();
  if (index.size() != x.rows()) {
    throw InvalidArgument("scatter_mean_rows: " + std::to_string(index.size()) + " indices for " +
                          std::to_string(x.rows()) + " rows");
  }
  std::vector<double> count(n_out, 0.0);
  for (Index o : index) {
    require_index(o, n_out, "scatter_mean_rows");
    count[o] += 1.0;
  }
  Tensor out(n_out, x.cols());
  for (std::size_t e = 0; e < index.size(); ++e) {
    auto dst = out.row(index[e]);
    const double w = 1.0 / count[index[e]];
    auto src = x.row(e);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
  }
  return t.record("scatter_mean_rows", std::move(out), {a},
                  [ia = a.id, idx = std::vector<Index>(index.begin(), index.end()),
                   count = std::move(count)](Tape& tp, std::size_t self) {
                    Tensor* ga = tp.grad_buffer(ia);
                    if (ga == nullptr) return;
                    const Tensor& g = tp.grad(self);
                    for (std::size_t e = 0; e < idx.size(); ++e) {
                      auto dst = ga->row(e);
                      auto src = g.row(idx[e]);
                      const double w = 1.0 / count[idx[e]];
                      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
                    }
                  });
}

Var softmax_cross_entropy(Var logits, std::span<const Index> targets) {
  Tape& t = tape_of(logits, "softmax_cross_entropy");
  const Tensor& z = logits.value();
  if (targets.size() != z.rows() || z.rows() == 0) {
    throw InvalidArgument("softmax_cross_entropy: " + std::to_string(targets.size()) +
                          " targets for " + shape_str(z) + " logits");
  }
  Tensor prob(z.rows(), z.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    require_index(targets[i], z.cols(), "softmax_cross_entropy");
    const auto row = z.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      prob(i, j) = std::exp(row[j] - mx);
      s += prob(i, j);
    }
    for (double& p : prob.row(i)) p /= s;
    total += mx + std::log(s) - row[targets[i]];
  }
  const double inv_q = 1.0 / static_cast<double>(z.rows());
  return t.record("softmax_cross_entropy", Tensor::scalar(total * inv_q), {logits},
                  [iz = logits.id, prob = std::move(prob),
                   tg = std::vector<Index>(targets.begin(), targets.end()),
                   inv_q](Tape& tp, std::size_t self) {
                    Tensor* gz = tp.grad_buffer(iz);
                    if (gz == nullptr) return;
                    const double g = tp.grad(self)[0] * inv_q;
                    for (std::size_t i = 0; i < prob.rows(); ++i) {
                      for (std::size_t j = 0; j < prob.cols(); ++j) {
                        (*gz)(i, j) += g * (prob(i, j) - (j == tg[i] ? 1.0 : 0.0));
                      }
                    }
                  });
}

Var binary_cross_entropy(Var logits, const Tensor& labels) {
  Tape& t = tape_of(logits, "binary_cross_entropy");
  const Tensor& z = logits.value();
  require_same_shape(z, labels, "binary_cross_entropy");
  if (z.empty()) throw InvalidArgument("binary_cross_entropy: empty logits");
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) total += softplus_scalar(z[i]) - labels[i] * z[i];
  const double inv_n = 1.0 / static_cast<double>(z.size());
  return t.record("binary_cross_entropy", Tensor::scalar(total * inv_n), {logits},
                  [iz = logits.id, labels, inv_n](Tape& tp, std::size_t self) {
                    Tensor* gz = tp.grad_buffer(iz);
                    if (gz == nullptr) return;
                    const double g = tp.grad(self)[0] * inv_n;
                    const Tensor& zv = tp.value(iz);
                    for (std::size_t i = 0; i < zv.size(); ++i) {
                      (*gz)[i] += g * (sigmoid_scalar(zv[i]) - labels[i]);
                    }
                  });
}

}  // namespace eth::ad
