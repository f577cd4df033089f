// Copyright 2026 The sparsetraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "sparsetraj/diffcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "sparsetraj/kernels/kernels.hpp"

namespace sparsetraj::diff
{
namespace
{

const kernels::KernelTable & kt()
{
  return kernels::active();
}

[[noreturn]] void shape_error(const char * op, const Array & a, const Array & b)
{
  throw ShapeError(
    std::string(op) + ": incompatible shapes " + a.shape_string() + " and " + b.shape_string());
}

[[noreturn]] void shape_error(const char * op, const std::string & detail)
{
  throw ShapeError(std::string(op) + ": " + detail);
}

double sigmoid(double x)
{
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

Var matmul(Graph & g, Var x, Var w)
{
  const Array & xv = g.value(x);
  const Array & wv = g.value(w);
  if (xv.cols() != wv.rows()) {
    shape_error("matmul", xv, wv);
  }
  const std::size_t m = xv.rows();
  const std::size_t k = xv.cols();
  const std::size_t n = wv.cols();
  Array out(m, n);
  kt().gemm_nn(m, n, k, xv.data(), wv.data(), out.data());
  return g.record(std::move(out), {x, w}, [x, w, m, k, n](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      if (g.requires_grad(x)) {
        kt().gemm_nt(m, k, n, gy.data(), g.value(w).data(), g.grad(x).data());
      }
      if (g.requires_grad(w)) {
        kt().gemm_tn(k, n, m, g.value(x).data(), gy.data(), g.grad(w).data());
      }
    });
}

Var affine(Graph & g, Var x, Var w, Var b)
{
  const Array & xv = g.value(x);
  const Array & wv = g.value(w);
  const Array & bv = g.value(b);
  if (xv.cols() != wv.rows()) {
    shape_error("affine", xv, wv);
  }
  if (bv.rows() != 1 || bv.cols() != wv.cols()) {
    shape_error("affine (bias)", wv, bv);
  }
  const std::size_t m = xv.rows();
  const std::size_t k = xv.cols();
  const std::size_t n = wv.cols();
  Array out(m, n);
  kt().add_row_broadcast(m, n, bv.data(), out.data());
  kt().gemm_nn(m, n, k, xv.data(), wv.data(), out.data());
  return g.record(std::move(out), {x, w, b}, [x, w, b, m, k, n](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      if (g.requires_grad(x)) {
        kt().gemm_nt(m, k, n, gy.data(), g.value(w).data(), g.grad(x).data());
      }
      if (g.requires_grad(w)) {
        kt().gemm_tn(k, n, m, g.value(x).data(), gy.data(), g.grad(w).data());
      }
      if (g.requires_grad(b)) {
        kt().column_sums(m, n, gy.data(), g.grad(b).data());
      }
    });
}

Var add(Graph & g, Var a, Var b)
{
  const Array & av = g.value(a);
  const Array & bv = g.value(b);
  if (!av.same_shape(bv)) {
    shape_error("add", av, bv);
  }
  Array out = av;
  kt().axpy(out.size(), 1.0, bv.data(), out.data());
  return g.record(std::move(out), {a, b}, [a, b](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      for (Var p : {a, b}) {
        if (g.requires_grad(p)) {
          kt().axpy(gy.size(), 1.0, gy.data(), g.grad(p).data());
        }
      }
    });
}

Var sub(Graph & g, Var a, Var b)
{
  const Array & av = g.value(a);
  const Array & bv = g.value(b);
  if (!av.same_shape(bv)) {
    shape_error("sub", av, bv);
  }
  Array out = av;
  kt().axpy(out.size(), -1.0, bv.data(), out.data());
  return g.record(std::move(out), {a, b}, [a, b](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      if (g.requires_grad(a)) {
        kt().axpy(gy.size(), 1.0, gy.data(), g.grad(a).data());
      }
      if (g.requires_grad(b)) {
        kt().axpy(gy.size(), -1.0, gy.data(), g.grad(b).data());
      }
    });
}

Var scale(Graph & g, Var a, double factor)
{
  Array out = g.value(a);
  for (double & v : out.values()) {
    v *= factor;
  }
  return g.record(std::move(out), {a}, [a, factor](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      kt().axpy(gy.size(), factor, gy.data(), g.grad(a).data());
    });
}

Var relu(Graph & g, Var x)
{
  const Array & xv = g.value(x);
  Array out(xv.rows(), xv.cols());
  kt().relu(xv.size(), xv.data(), out.data());
  return g.record(std::move(out), {x}, [x](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      kt().relu_backward(gy.size(), g.value(x).data(), gy.data(), g.grad(x).data());
    });
}

Var batch_norm(
  Graph & g, Var x, Parameter & gamma, Parameter & beta,
  Parameter & running_mean, Parameter & running_var, BatchNormConfig config)
{
  const Array & xv = g.value(x);
  const std::size_t n = xv.rows();
  const std::size_t f = xv.cols();
  for (const Parameter * p : {&gamma, &beta, &running_mean, &running_var}) {
    if (p->value.rows() != 1 || p->value.cols() != f) {
      shape_error("batch_norm", xv, p->value);
    }
  }
  const Var gv = g.param(gamma);
  const Var bv = g.param(beta);

  if (!g.training()) {
    // Fixed affine map: y = gamma * (x - mean) / sqrt(var + eps) + beta.
    Array mul(1, f);
    Array shift(1, f);
    for (std::size_t j = 0; j < f; ++j) {
      const double inv = 1.0 / std::sqrt(running_var.value[j] + config.eps);
      mul[j] = gamma.value[j] * inv;
      shift[j] = beta.value[j] - running_mean.value[j] * mul[j];
    }
    Array out(n, f);
    for (std::size_t i = 0; i < n; ++i) {
      const double * xr = xv.row(i);
      double * yr = out.row(i);
      for (std::size_t j = 0; j < f; ++j) {
        yr[j] = xr[j] * mul[j] + shift[j];
      }
    }
    Array inv_std(1, f);
    for (std::size_t j = 0; j < f; ++j) {
      inv_std[j] = 1.0 / std::sqrt(running_var.value[j] + config.eps);
    }
    Array mean = running_mean.value;
    return g.record(std::move(out), {x, gv, bv},
      [x, gv, bv, mul = std::move(mul), inv_std = std::move(inv_std), mean = std::move(mean),
      n, f](Graph & g, Var self) {
        const Array & gy = g.grad(self);
        const Array & xv = g.value(x);
        if (g.requires_grad(x)) {
          Array & gx = g.grad(x);
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < f; ++j) {
              gx.at(i, j) += gy.at(i, j) * mul[j];
            }
          }
        }
        if (g.requires_grad(gv)) {
          Array & gg = g.grad(gv);
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < f; ++j) {
              gg[j] += gy.at(i, j) * (xv.at(i, j) - mean[j]) * inv_std[j];
            }
          }
        }
        if (g.requires_grad(bv)) {
          kt().column_sums(n, f, gy.data(), g.grad(bv).data());
        }
      });
  }

  if (n < 2) {
    shape_error("batch_norm", "training mode needs at least 2 rows, got " + xv.shape_string());
  }
  Array mean(1, f);
  Array var(1, f);
  kt().column_sums(n, f, xv.data(), mean.data());
  for (std::size_t j = 0; j < f; ++j) {
    mean[j] /= static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double * xr = xv.row(i);
    for (std::size_t j = 0; j < f; ++j) {
      const double d = xr[j] - mean[j];
      var[j] += d * d;
    }
  }
  Array inv_std(1, f);
  for (std::size_t j = 0; j < f; ++j) {
    var[j] /= static_cast<double>(n);
    inv_std[j] = 1.0 / std::sqrt(var[j] + config.eps);
  }
  Array xhat(n, f);
  Array out(n, f);
  for (std::size_t i = 0; i < n; ++i) {
    const double * xr = xv.row(i);
    double * hr = xhat.row(i);
    double * yr = out.row(i);
    for (std::size_t j = 0; j < f; ++j) {
      hr[j] = (xr[j] - mean[j]) * inv_std[j];
      yr[j] = gamma.value[j] * hr[j] + beta.value[j];
    }
  }
  const double m = config.momentum;
  for (std::size_t j = 0; j < f; ++j) {
    running_mean.value[j] = (1.0 - m) * running_mean.value[j] + m * mean[j];
    running_var.value[j] = (1.0 - m) * running_var.value[j] + m * var[j];
  }
  Array gamma_now = gamma.value;
  return g.record(std::move(out), {x, gv, bv},
    [x, gv, bv, xhat = std::move(xhat), inv_std = std::move(inv_std),
    gamma_now = std::move(gamma_now), n, f](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      Array sum_gy(1, f);
      Array sum_gy_xhat(1, f);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
          sum_gy[j] += gy.at(i, j);
          sum_gy_xhat[j] += gy.at(i, j) * xhat.at(i, j);
        }
      }
      if (g.requires_grad(gv)) {
        kt().axpy(f, 1.0, sum_gy_xhat.data(), g.grad(gv).data());
      }
      if (g.requires_grad(bv)) {
        kt().axpy(f, 1.0, sum_gy.data(), g.grad(bv).data());
      }
      if (g.requires_grad(x)) {
        Array & gx = g.grad(x);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < f; ++j) {
            gx.at(i, j) += gamma_now[j] * inv_std[j] *
              (gy.at(i, j) - inv_n * sum_gy[j] - xhat.at(i, j) * inv_n * sum_gy_xhat[j]);
          }
        }
      }
    });
}

Var softmax_rows(Graph & g, Var x)
{
  const Array & xv = g.value(x);
  const std::size_t n = xv.rows();
  const std::size_t f = xv.cols();
  Array out(n, f);
  for (std::size_t i = 0; i < n; ++i) {
    const double * xr = xv.row(i);
    double * yr = out.row(i);
    const double top = *std::max_element(xr, xr + f);
    double total = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
      yr[j] = std::exp(xr[j] - top);
      total += yr[j];
    }
    for (std::size_t j = 0; j < f; ++j) {
      yr[j] /= total;
    }
  }
  return g.record(std::move(out), {x}, [x, n, f](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      const Array & y = g.value(self);
      Array & gx = g.grad(x);
      for (std::size_t i = 0; i < n; ++i) {
        const double dotv = kt().dot(f, gy.row(i), y.row(i));
        for (std::size_t j = 0; j < f; ++j) {
          gx.at(i, j) += y.at(i, j) * (gy.at(i, j) - dotv);
        }
      }
    });
}

Var scaled_dot_attention(
  Graph & g, Var q, Var k, Var v, std::size_t heads, std::size_t set_size)
{
  const Array & qv = g.value(q);
  const Array & kv = g.value(k);
  const Array & vv = g.value(v);
  if (!qv.same_shape(kv) || !qv.same_shape(vv)) {
    shape_error("scaled_dot_attention", qv, !qv.same_shape(kv) ? kv : vv);
  }
  const std::size_t rows = qv.rows();
  const std::size_t width = qv.cols();
  if (heads == 0 || width % heads != 0) {
    shape_error("scaled_dot_attention",
      "width " + std::to_string(width) + " not divisible by " + std::to_string(heads) + " heads");
  }
  if (set_size == 0 || rows % set_size != 0) {
    shape_error("scaled_dot_attention",
      std::to_string(rows) + " rows do not split into sets of " + std::to_string(set_size));
  }
  const std::size_t sets = rows / set_size;
  const std::size_t dh = width / heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  // probs[(s * heads + h)] is a [set_size x set_size] block.
  auto probs = std::make_shared<std::vector<double>>(sets * heads * set_size * set_size);
  Array out(rows, width);
  std::vector<double> scores(set_size);
  for (std::size_t s = 0; s < sets; ++s) {
    for (std::size_t h = 0; h < heads; ++h) {
      double * p = probs->data() + (s * heads + h) * set_size * set_size;
      const std::size_t col = h * dh;
      for (std::size_t i = 0; i < set_size; ++i) {
        const double * qi = qv.row(s * set_size + i) + col;
        double top = -INFINITY;
        for (std::size_t j = 0; j < set_size; ++j) {
          scores[j] = kt().dot(dh, qi, kv.row(s * set_size + j) + col) * inv_scale;
          top = std::max(top, scores[j]);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < set_size; ++j) {
          scores[j] = std::exp(scores[j] - top);
          total += scores[j];
        }
        double * oi = out.row(s * set_size + i) + col;
        for (std::size_t j = 0; j < set_size; ++j) {
          const double pij = scores[j] / total;
          p[i * set_size + j] = pij;
          kt().axpy(dh, pij, vv.row(s * set_size + j) + col, oi);
        }
      }
    }
  }

  return g.record(std::move(out), {q, k, v},
    [q, k, v, probs, sets, heads, set_size, dh, inv_scale](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      const Array & qv = g.value(q);
      const Array & kv = g.value(k);
      const Array & vv = g.value(v);
      Array * gq = g.requires_grad(q) ? &g.grad(q) : nullptr;
      Array * gk = g.requires_grad(k) ? &g.grad(k) : nullptr;
      Array * gv = g.requires_grad(v) ? &g.grad(v) : nullptr;
      std::vector<double> dp(set_size);
      for (std::size_t s = 0; s < sets; ++s) {
        for (std::size_t h = 0; h < heads; ++h) {
          const double * p = probs->data() + (s * heads + h) * set_size * set_size;
          const std::size_t col = h * dh;
          for (std::size_t i = 0; i < set_size; ++i) {
            const std::size_t ri = s * set_size + i;
            const double * gyi = gy.row(ri) + col;
            double weighted = 0.0;
            for (std::size_t j = 0; j < set_size; ++j) {
              const std::size_t rj = s * set_size + j;
              const double pij = p[i * set_size + j];
              if (gv != nullptr) {
                kt().axpy(dh, pij, gyi, gv->row(rj) + col);
              }
              dp[j] = kt().dot(dh, gyi, vv.row(rj) + col);
              weighted += pij * dp[j];
            }
            for (std::size_t j = 0; j < set_size; ++j) {
              const std::size_t rj = s * set_size + j;
              const double ds = p[i * set_size + j] * (dp[j] - weighted) * inv_scale;
              if (ds == 0.0) {
                continue;
              }
              if (gq != nullptr) {
                kt().axpy(dh, ds, kv.row(rj) + col, gq->row(ri) + col);
              }
              if (gk != nullptr) {
                kt().axpy(dh, ds, qv.row(ri) + col, gk->row(rj) + col);
              }
            }
          }
        }
      }
    });
}

Var gru_gates(Graph & g, Var gi, Var gh, Var h)
{
  const Array & giv = g.value(gi);
  const Array & ghv = g.value(gh);
  const Array & hv = g.value(h);
  const std::size_t batch = hv.rows();
  const std::size_t hidden = hv.cols();
  if (giv.rows() != batch || giv.cols() != 3 * hidden) {
    shape_error("gru_gates (input pre-activation)", giv, hv);
  }
  if (!giv.same_shape(ghv)) {
    shape_error("gru_gates (hidden pre-activation)", giv, ghv);
  }
  // cache holds r, z, n per row: [batch x 3H]
  auto cache = std::make_shared<Array>(batch, 3 * hidden);
  Array out(batch, hidden);
  for (std::size_t b = 0; b < batch; ++b) {
    const double * a = giv.row(b);
    const double * c = ghv.row(b);
    double * rzn = cache->row(b);
    for (std::size_t j = 0; j < hidden; ++j) {
      const double r = sigmoid(a[j] + c[j]);
      const double z = sigmoid(a[hidden + j] + c[hidden + j]);
      const double nn = std::tanh(a[2 * hidden + j] + r * c[2 * hidden + j]);
      rzn[j] = r;
      rzn[hidden + j] = z;
      rzn[2 * hidden + j] = nn;
      out.at(b, j) = (1.0 - z) * nn + z * hv.at(b, j);
    }
  }
  return g.record(std::move(out), {gi, gh, h},
    [gi, gh, h, cache, batch, hidden](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      const Array & ghv = g.value(gh);
      const Array & hv = g.value(h);
      Array * dgi = g.requires_grad(gi) ? &g.grad(gi) : nullptr;
      Array * dgh = g.requires_grad(gh) ? &g.grad(gh) : nullptr;
      Array * dh = g.requires_grad(h) ? &g.grad(h) : nullptr;
      for (std::size_t b = 0; b < batch; ++b) {
        const double * rzn = cache->row(b);
        for (std::size_t j = 0; j < hidden; ++j) {
          const double r = rzn[j];
          const double z = rzn[hidden + j];
          const double nn = rzn[2 * hidden + j];
          const double gyj = gy.at(b, j);
          const double dn_pre = gyj * (1.0 - z) * (1.0 - nn * nn);
          const double dz_pre = gyj * (hv.at(b, j) - nn) * z * (1.0 - z);
          const double dr_pre = dn_pre * ghv.at(b, 2 * hidden + j) * r * (1.0 - r);
          if (dgi != nullptr) {
            double * d = dgi->row(b);
            d[j] += dr_pre;
            d[hidden + j] += dz_pre;
            d[2 * hidden + j] += dn_pre;
          }
          if (dgh != nullptr) {
            double * d = dgh->row(b);
            d[j] += dr_pre;
            d[hidden + j] += dz_pre;
            d[2 * hidden + j] += dn_pre * r;
          }
          if (dh != nullptr) {
            dh->at(b, j) += gyj * z;
          }
        }
      }
    });
}

Var gru_cell(Graph & g, Var x, Var h, Var w_ih, Var w_hh, Var b_ih, Var b_hh)
{
  const Var gi = affine(g, x, w_ih, b_ih);
  const Var gh = affine(g, h, w_hh, b_hh);
  return gru_gates(g, gi, gh, h);
}

Var causal_conv1d(Graph & g, Var x, Var w, Var b, const ConvShape & shape)
{
  const Array & xv = g.value(x);
  const Array & wv = g.value(w);
  const Array & bv = g.value(b);
  const std::size_t steps = shape.steps;
  const std::size_t cin = shape.in_channels;
  const std::size_t cout = shape.out_channels;
  const std::size_t taps = shape.kernel;
  if (steps == 0 || xv.cols() != steps * cin) {
    shape_error("causal_conv1d (input)",
      xv.shape_string() + " vs steps*in_channels = " + std::to_string(steps * cin));
  }
  if (wv.rows() != taps * cin || wv.cols() != cout) {
    shape_error("causal_conv1d (weight)",
      wv.shape_string() + " vs [" + std::to_string(taps * cin) + " x " + std::to_string(cout) +
      "]");
  }
  if (bv.rows() != 1 || bv.cols() != cout) {
    shape_error("causal_conv1d (bias)", wv, bv);
  }
  const std::size_t batch = xv.rows();
  const std::size_t patch = taps * cin;
  // patches: [(batch * steps) x patch], zero where the tap falls before t = 0.
  auto patches = std::make_shared<Array>(batch * steps, patch);
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t t = 0; t < steps; ++t) {
      double * dst = patches->row(r * steps + t);
      for (std::size_t i = 0; i < taps; ++i) {
        const std::size_t back = (taps - 1 - i) * shape.dilation;
        if (back > t) {
          continue;
        }
        std::copy_n(xv.row(r) + (t - back) * cin, cin, dst + i * cin);
      }
    }
  }
  Array out(batch * steps, cout);
  kt().add_row_broadcast(batch * steps, cout, bv.data(), out.data());
  kt().gemm_nn(batch * steps, cout, patch, patches->data(), wv.data(), out.data());
  out.reshape(batch, steps * cout);
  return g.record(std::move(out), {x, w, b},
    [x, w, b, patches, shape, batch, patch](Graph & g, Var self) {
      const Array & gy = g.grad(self);  // [batch x steps*out] == [(batch*steps) x out]
      const std::size_t rows = batch * shape.steps;
      const std::size_t cout = shape.out_channels;
      const std::size_t cin = shape.in_channels;
      if (g.requires_grad(w)) {
        kt().gemm_tn(patch, cout, rows, patches->data(), gy.data(), g.grad(w).data());
      }
      if (g.requires_grad(b)) {
        kt().column_sums(rows, cout, gy.data(), g.grad(b).data());
      }
      if (g.requires_grad(x)) {
        Array dpatch(rows, patch);
        kt().gemm_nt(rows, patch, cout, gy.data(), g.value(w).data(), dpatch.data());
        Array & gx = g.grad(x);
        for (std::size_t r = 0; r < batch; ++r) {
          for (std::size_t t = 0; t < shape.steps; ++t) {
            const double * src = dpatch.row(r * shape.steps + t);
            for (std::size_t i = 0; i < shape.kernel; ++i) {
              const std::size_t back = (shape.kernel - 1 - i) * shape.dilation;
              if (back > t) {
                continue;
              }
              kt().axpy(cin, 1.0, src + i * cin, gx.row(r) + (t - back) * cin);
            }
          }
        }
      }
    });
}

Var concat_cols(Graph & g, const std::vector<Var> & parts)
{
  if (parts.empty()) {
    shape_error("concat_cols", "no inputs");
  }
  const std::size_t rows = g.value(parts.front()).rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (Var p : parts) {
    const Array & pv = g.value(p);
    if (pv.rows() != rows) {
      shape_error("concat_cols", g.value(parts.front()), pv);
    }
    widths.push_back(pv.cols());
    total += pv.cols();
  }
  Array out(rows, total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Array & pv = g.value(parts[k]);
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(pv.row(r), widths[k], out.row(r) + offset);
    }
    offset += widths[k];
  }
  return g.record(std::move(out), parts, [parts, widths, rows](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      std::size_t offset = 0;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (g.requires_grad(parts[k])) {
          Array & gp = g.grad(parts[k]);
          for (std::size_t r = 0; r < rows; ++r) {
            kt().axpy(widths[k], 1.0, gy.row(r) + offset, gp.row(r));
          }
        }
        offset += widths[k];
      }
    });
}

Var concat_rows(Graph & g, const std::vector<Var> & parts)
{
  if (parts.empty()) {
    shape_error("concat_rows", "no inputs");
  }
  const std::size_t cols = g.value(parts.front()).cols();
  std::size_t total = 0;
  for (Var p : parts) {
    const Array & pv = g.value(p);
    if (pv.cols() != cols) {
      shape_error("concat_rows", g.value(parts.front()), pv);
    }
    total += pv.rows();
  }
  Array out(total, cols);
  std::size_t offset = 0;
  for (Var p : parts) {
    const Array & pv = g.value(p);
    std::copy_n(pv.data(), pv.size(), out.data() + offset);
    offset += pv.size();
  }
  return g.record(std::move(out), parts, [parts](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      std::size_t offset = 0;
      for (Var p : parts) {
        const std::size_t n = g.value(p).size();
        if (g.requires_grad(p)) {
          kt().axpy(n, 1.0, gy.data() + offset, g.grad(p).data());
        }
        offset += n;
      }
    });
}

Var slice_cols(Graph & g, Var x, std::size_t begin, std::size_t count)
{
  const Array & xv = g.value(x);
  if (begin + count > xv.cols()) {
    shape_error("slice_cols",
      "columns [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
      ") out of range for " + xv.shape_string());
  }
  Array out(xv.rows(), count);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    std::copy_n(xv.row(r) + begin, count, out.row(r));
  }
  return g.record(std::move(out), {x}, [x, begin, count](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      Array & gx = g.grad(x);
      for (std::size_t r = 0; r < gy.rows(); ++r) {
        kt().axpy(count, 1.0, gy.row(r), gx.row(r) + begin);
      }
    });
}

Var slice_rows(Graph & g, Var x, std::size_t begin, std::size_t count)
{
  const Array & xv = g.value(x);
  if (begin + count > xv.rows()) {
    shape_error("slice_rows",
      "rows [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
      ") out of range for " + xv.shape_string());
  }
  Array out(count, xv.cols());
  std::copy_n(xv.row(begin), count * xv.cols(), out.data());
  return g.record(std::move(out), {x}, [x, begin](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      Array & gx = g.grad(x);
      kt().axpy(gy.size(), 1.0, gy.data(), gx.row(begin));
    });
}

Var gather_rows(Graph & g, Var x, std::vector<std::uint32_t> index)
{
  const Array & xv = g.value(x);
  const std::size_t cols = xv.cols();
  for (std::uint32_t i : index) {
    if (i >= xv.rows()) {
      shape_error("gather_rows",
        "row " + std::to_string(i) + " out of range for " + xv.shape_string());
    }
  }
  Array out(index.size(), cols);
  for (std::size_t r = 0; r < index.size(); ++r) {
    std::copy_n(xv.row(index[r]), cols, out.row(r));
  }
  auto shared = std::make_shared<std::vector<std::uint32_t>>(std::move(index));
  return g.record(std::move(out), {x}, [x, shared, cols](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      Array & gx = g.grad(x);
      for (std::size_t r = 0; r < shared->size(); ++r) {
        kt().axpy(cols, 1.0, gy.row(r), gx.row((*shared)[r]));
      }
    });
}

Var sum_over_set(Graph & g, Var x, std::size_t set_size)
{
  const Array & xv = g.value(x);
  if (set_size == 0 || xv.rows() % set_size != 0) {
    shape_error("sum_over_set",
      xv.shape_string() + " does not split into sets of " + std::to_string(set_size));
  }
  const std::size_t groups = xv.rows() / set_size;
  const std::size_t cols = xv.cols();
  Array out(groups, cols);
  for (std::size_t s = 0; s < groups; ++s) {
    kt().column_sums(set_size, cols, xv.row(s * set_size), out.row(s));
  }
  return g.record(std::move(out), {x}, [x, set_size, groups, cols](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      Array & gx = g.grad(x);
      for (std::size_t s = 0; s < groups; ++s) {
        for (std::size_t i = 0; i < set_size; ++i) {
          kt().axpy(cols, 1.0, gy.row(s), gx.row(s * set_size + i));
        }
      }
    });
}

Var reshape(Graph & g, Var x, std::size_t rows, std::size_t cols)
{
  Array out = g.value(x);
  out.reshape(rows, cols);
  return g.record(std::move(out), {x}, [x](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      kt().axpy(gy.size(), 1.0, gy.data(), g.grad(x).data());
    });
}

Var huber_elementwise(Graph & g, Var pred, Var target)
{
  const Array & pv = g.value(pred);
  const Array & tv = g.value(target);
  if (!pv.same_shape(tv)) {
    shape_error("huber_elementwise", pv, tv);
  }
  Array out(pv.rows(), pv.cols());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - tv[i];
    const double ad = std::abs(d);
    out[i] = ad < 1.0 ? 0.5 * d * d : ad - 0.5;
  }
  return g.record(std::move(out), {pred, target}, [pred, target](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      const Array & pv = g.value(pred);
      const Array & tv = g.value(target);
      Array * gp = g.requires_grad(pred) ? &g.grad(pred) : nullptr;
      Array * gt = g.requires_grad(target) ? &g.grad(target) : nullptr;
      for (std::size_t i = 0; i < gy.size(); ++i) {
        const double d = pv[i] - tv[i];
        const double slope = std::abs(d) < 1.0 ? d : (d > 0.0 ? 1.0 : -1.0);
        if (gp != nullptr) {
          (*gp)[i] += gy[i] * slope;
        }
        if (gt != nullptr) {
          (*gt)[i] -= gy[i] * slope;
        }
      }
    });
}

Var mean_reduce(Graph & g, Var x)
{
  const Array & xv = g.value(x);
  if (xv.empty()) {
    shape_error("mean_reduce", "empty input");
  }
  double total = 0.0;
  for (double v : xv.values()) {
    total += v;
  }
  const double inv = 1.0 / static_cast<double>(xv.size());
  return g.record(Array::scalar(total * inv), {x}, [x, inv](Graph & g, Var self) {
      const double gy = g.grad(self)[0] * inv;
      Array & gx = g.grad(x);
      for (double & v : gx.values()) {
        v += gy;
      }
    });
}

Var interpolate(
  Graph & g, Var controls, const Array & anchors, const motion::LinearInterpolant & interp)
{
  const Array & cv = g.value(controls);
  const auto horizon = static_cast<std::size_t>(interp.horizon());
  const auto k = static_cast<std::size_t>(interp.controls());
  const std::size_t rows = cv.rows();
  if (cv.cols() != 2 * k) {
    shape_error("interpolate (controls)",
      cv.shape_string() + " vs 2 * " + std::to_string(k) + " control coordinates");
  }
  if (anchors.rows() != rows || anchors.cols() != 8) {
    shape_error("interpolate (anchors)", cv, anchors);
  }
  // Column-stack every (row, coord) series so one GEMM densifies the batch:
  // dense_all [H x 2R] = W [H x K] * ctrl_all [K x 2R] + A [H x 4] * anch_all [4 x 2R].
  const std::size_t width = 2 * rows;
  Array ctrl_all(k, width);
  Array anch_all(4, width);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t j = 0; j < k; ++j) {
        ctrl_all.at(j, 2 * r + c) = cv.at(r, 2 * j + c);
      }
      for (std::size_t m = 0; m < 4; ++m) {
        anch_all.at(m, 2 * r + c) = anchors.at(r, 2 * m + c);
      }
    }
  }
  Array dense_all(horizon, width);
  kt().gemm_nn(horizon, width, k, interp.control_weights().data(), ctrl_all.data(),
    dense_all.data());
  kt().gemm_nn(horizon, width, 4, interp.anchor_weights().data(), anch_all.data(),
    dense_all.data());
  Array out(rows, 2 * horizon);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < horizon; ++t) {
      out.at(r, 2 * t) = dense_all.at(t, 2 * r);
      out.at(r, 2 * t + 1) = dense_all.at(t, 2 * r + 1);
    }
  }
  const std::vector<double> * weights = &interp.control_weights();
  return g.record(std::move(out), {controls},
    [controls, weights, rows, horizon, k, width](Graph & g, Var self) {
      const Array & gy = g.grad(self);
      Array gy_all(horizon, width);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t t = 0; t < horizon; ++t) {
          gy_all.at(t, 2 * r) = gy.at(r, 2 * t);
          gy_all.at(t, 2 * r + 1) = gy.at(r, 2 * t + 1);
        }
      }
      Array gc_all(k, width);
      kt().gemm_tn(k, width, horizon, weights->data(), gy_all.data(), gc_all.data());
      Array & gc = g.grad(controls);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
          for (std::size_t j = 0; j < k; ++j) {
            gc.at(r, 2 * j + c) += gc_all.at(j, 2 * r + c);
          }
        }
      }
    });
}

}  // namespace sparsetraj::diff
