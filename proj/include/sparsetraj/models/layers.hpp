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

#ifndef SPARSETRAJ__MODELS__LAYERS_HPP_
#define SPARSETRAJ__MODELS__LAYERS_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sparsetraj/diffcore/graph.hpp"
#include "sparsetraj/diffcore/ops.hpp"
#include "sparsetraj/diffcore/parameters.hpp"

namespace sparsetraj::models
{

using diff::Graph;
using diff::Var;

class Linear
{
public:
  Linear(diff::ParameterSet & params, const std::string & name, std::size_t in, std::size_t out,
    std::mt19937_64 & rng, bool bias = true);

  Var operator()(Graph & g, Var x) const;

  diff::Parameter & weight() const {return *weight_;}
  /// Null for bias-free layers.
  diff::Parameter * bias() const {return bias_;}

private:
  diff::Parameter * weight_;
  diff::Parameter * bias_;
};

class BatchNorm
{
public:
  BatchNorm(diff::ParameterSet & params, const std::string & name, std::size_t width);

  Var operator()(Graph & g, Var x) const;

private:
  diff::Parameter * gamma_;
  diff::Parameter * beta_;
  diff::Parameter * running_mean_;
  diff::Parameter * running_var_;
};

/// MLP with `depth` hidden layers of `width` units and a linear output
/// layer. Between layers the activation is affine -> ReLU -> batch norm, and
/// hidden layers (2,3), (4,5), ... are bridged by pre-activation skip
/// connections:
///
///   h1 = L1(x)
///   h3 = L3(act(L2(act(h1)))) + h1
///   h5 = L5(act(L4(act(h3)))) + h3
///   y  = Lout(act(h_depth))
///
/// depth must be odd.
class ResidualMlp
{
public:
  ResidualMlp(diff::ParameterSet & params, const std::string & name, std::size_t in,
    std::size_t width, std::size_t out, std::size_t depth, std::mt19937_64 & rng);

  Var operator()(Graph & g, Var x) const;

  std::size_t depth() const {return hidden_.size();}
  std::size_t width() const {return width_;}

private:
  Var activate(Graph & g, Var h, std::size_t layer) const;

  std::size_t width_;
  std::vector<Linear> hidden_;
  std::vector<BatchNorm> norms_;
  std::optional<Linear> output_;
};

/// Stacked GRU; layer l feeds layer l + 1 within a step.
class GruStack
{
public:
  GruStack(diff::ParameterSet & params, const std::string & name, std::size_t in,
    std::size_t hidden, std::size_t layers, std::mt19937_64 & rng);

  /// Zero state for a batch.
  std::vector<Var> initial_state(Graph & g, std::size_t batch) const;
  /// Advances every layer one step; returns the new per-layer states.
  std::vector<Var> step(Graph & g, Var x, const std::vector<Var> & state) const;

  std::size_t hidden() const {return hidden_;}
  std::size_t layers() const {return w_ih_.size();}

private:
  std::size_t hidden_;
  std::vector<diff::Parameter *> w_ih_;
  std::vector<diff::Parameter *> w_hh_;
  std::vector<diff::Parameter *> b_ih_;
  std::vector<diff::Parameter *> b_hh_;
};

using RowFn = std::function<Var (Graph &, Var)>;

/// Fully connected graph layer over sets of `set_size` consecutive node
/// rows:
///
///   e_ij = edge_fn([v_i, v_j])   for every ordered pair, i == j included
///   o_i  = node_fn(sum_j e_ij)
///
/// Equivariant to the order of nodes within a set.
Var team_graph_layer(Graph & g, Var nodes, std::size_t set_size, const RowFn & edge_fn,
  const RowFn & node_fn);

}  // namespace sparsetraj::models

#endif  // SPARSETRAJ__MODELS__LAYERS_HPP_
