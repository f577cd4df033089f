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

#ifndef SPARSETRAJ__DIFFCORE__OPS_HPP_
#define SPARSETRAJ__DIFFCORE__OPS_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsetraj/diffcore/graph.hpp"
#include "sparsetraj/motion_model.hpp"

/// Differentiable primitives. Each records one node (or a short chain) on the
/// graph and knows its own backward pass. Shapes are checked eagerly and a
/// ShapeError names the primitive and the offending shapes.
namespace sparsetraj::diff
{

class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// x[m x k] * w[k x n]
Var matmul(Graph & g, Var x, Var w);
/// x * w + b, with b a [1 x n] row broadcast over rows.
Var affine(Graph & g, Var x, Var w, Var b);
Var add(Graph & g, Var a, Var b);
Var sub(Graph & g, Var a, Var b);
Var scale(Graph & g, Var a, double factor);
Var relu(Graph & g, Var x);

struct BatchNormConfig
{
  double momentum = 0.1;
  double eps = 1e-5;
};

/// Normalizes each column over the rows. Training graphs use the batch
/// statistics (biased variance) and fold them into the running statistics;
/// eval graphs apply the running statistics as a fixed affine map.
Var batch_norm(
  Graph & g, Var x, Parameter & gamma, Parameter & beta,
  Parameter & running_mean, Parameter & running_var, BatchNormConfig config = {});

/// Row-wise softmax.
Var softmax_rows(Graph & g, Var x);

/// Multi-head scaled dot-product attention over sets. q, k and v are
/// [sets * set_size x width]; rows of one set attend to each other only.
/// The width is split evenly across `heads` and head outputs are
/// concatenated back in column order.
Var scaled_dot_attention(
  Graph & g, Var q, Var k, Var v, std::size_t heads, std::size_t set_size);

/// Gate arithmetic of a GRU cell given the two pre-activations
/// gi = x W_ih + b_ih and gh = h W_hh + b_hh, each [batch x 3H] in (r, z, n)
/// column blocks:
///   r = sigmoid(gi_r + gh_r), z = sigmoid(gi_z + gh_z),
///   n = tanh(gi_n + r * gh_n), h' = (1 - z) * n + z * h.
Var gru_gates(Graph & g, Var gi, Var gh, Var h);

/// Full GRU cell: w_ih [in x 3H], w_hh [H x 3H], biases [1 x 3H].
Var gru_cell(Graph & g, Var x, Var h, Var w_ih, Var w_hh, Var b_ih, Var b_hh);

struct ConvShape
{
  std::size_t steps = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 2;
  std::size_t dilation = 1;
};

/// Causal 1-D convolution over time-major rows: x is [batch x steps*in],
/// w is [kernel*in x out], b is [1 x out], output [batch x steps*out].
/// Output step t sees inputs t - (kernel-1-i)*dilation for tap i; taps before
/// the first step read zeros.
Var causal_conv1d(Graph & g, Var x, Var w, Var b, const ConvShape & shape);

Var concat_cols(Graph & g, const std::vector<Var> & parts);
Var concat_rows(Graph & g, const std::vector<Var> & parts);
Var slice_cols(Graph & g, Var x, std::size_t begin, std::size_t count);
Var slice_rows(Graph & g, Var x, std::size_t begin, std::size_t count);
/// out.row(i) = x.row(index[i]); backward scatter-adds.
Var gather_rows(Graph & g, Var x, std::vector<std::uint32_t> index);
/// Sums consecutive groups of `set_size` rows: [n * set_size x f] -> [n x f].
Var sum_over_set(Graph & g, Var x, std::size_t set_size);
Var reshape(Graph & g, Var x, std::size_t rows, std::size_t cols);

/// Elementwise Huber penalty with unit threshold:
/// 0.5 d^2 if |d| < 1, |d| - 0.5 otherwise, d = pred - target.
Var huber_elementwise(Graph & g, Var pred, Var target);
/// Mean of all entries as a 1x1 node.
Var mean_reduce(Graph & g, Var x);

/// Differentiable densification. controls is [rows x 2K] laid out
/// (k, coord); anchors is [rows x 8] laid out (p, v, a, j) x (x, y).
/// Returns [rows x 2H] laid out (t, coord). `interp` must outlive the graph.
Var interpolate(
  Graph & g, Var controls, const Array & anchors, const motion::LinearInterpolant & interp);

}  // namespace sparsetraj::diff

#endif  // SPARSETRAJ__DIFFCORE__OPS_HPP_
