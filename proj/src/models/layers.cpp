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
#include "sparsetraj/models/layers.hpp"

#include <stdexcept>

namespace sparsetraj::models
{

Linear::Linear(diff::ParameterSet & params, const std::string & name, std::size_t in,
  std::size_t out, std::mt19937_64 & rng, bool bias)
: weight_(&params.add_uniform(name + ".w", in, out, in, rng)),
  bias_(bias ? &params.add_uniform(name + ".b", 1, out, in, rng) : nullptr)
{
}

Var Linear::operator()(Graph & g, Var x) const
{
  if (bias_ == nullptr) {
    return diff::matmul(g, x, g.param(*weight_));
  }
  return diff::affine(g, x, g.param(*weight_), g.param(*bias_));
}

BatchNorm::BatchNorm(diff::ParameterSet & params, const std::string & name, std::size_t width)
: gamma_(&params.add(name + ".gamma", diff::Array(1, width, 1.0))),
  beta_(&params.add(name + ".beta", diff::Array(1, width, 0.0))),
  running_mean_(&params.add(name + ".running_mean", diff::Array(1, width, 0.0), false)),
  running_var_(&params.add(name + ".running_var", diff::Array(1, width, 1.0), false))
{
}

Var BatchNorm::operator()(Graph & g, Var x) const
{
  return diff::batch_norm(g, x, *gamma_, *beta_, *running_mean_, *running_var_);
}

ResidualMlp::ResidualMlp(diff::ParameterSet & params, const std::string & name, std::size_t in,
  std::size_t width, std::size_t out, std::size_t depth, std::mt19937_64 & rng)
: width_(width)
{
  if (depth == 0 || depth % 2 == 0) {
    throw std::invalid_argument("ResidualMlp '" + name + "': depth must be odd");
  }
  for (std::size_t l = 0; l < depth; ++l) {
    const std::string layer = name + ".l" + std::to_string(l + 1);
    hidden_.emplace_back(params, layer, l == 0 ? in : width, width, rng);
    norms_.emplace_back(params, layer + ".bn", width);
  }
  output_.emplace(params, name + ".out", width, out, rng);
}

Var ResidualMlp::activate(Graph & g, Var h, std::size_t layer) const
{
  return norms_[layer](g, diff::relu(g, h));
}

Var ResidualMlp::operator()(Graph & g, Var x) const
{
  Var h = hidden_[0](g, x);
  for (std::size_t l = 1; l + 1 < hidden_.size(); l += 2) {
    const Var inner = hidden_[l](g, activate(g, h, l - 1));
    const Var outer = hidden_[l + 1](g, activate(g, inner, l));
    h = diff::add(g, outer, h);
  }
  return (*output_)(g, activate(g, h, hidden_.size() - 1));
}

GruStack::GruStack(diff::ParameterSet & params, const std::string & name, std::size_t in,
  std::size_t hidden, std::size_t layers, std::mt19937_64 & rng)
: hidden_(hidden)
{
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string layer = name + ".gru" + std::to_string(l);
    const std::size_t input = l == 0 ? in : hidden;
    w_ih_.push_back(&params.add_uniform(layer + ".w_ih", input, 3 * hidden, hidden, rng));
    w_hh_.push_back(&params.add_uniform(layer + ".w_hh", hidden, 3 * hidden, hidden, rng));
    b_ih_.push_back(&params.add_uniform(layer + ".b_ih", 1, 3 * hidden, hidden, rng));
    b_hh_.push_back(&params.add_uniform(layer + ".b_hh", 1, 3 * hidden, hidden, rng));
  }
}

std::vector<Var> GruStack::initial_state(Graph & g, std::size_t batch) const
{
  std::vector<Var> state;
  for (std::size_t l = 0; l < layers(); ++l) {
    state.push_back(g.input(diff::Array(batch, hidden_, 0.0)));
  }
  return state;
}

std::vector<Var> GruStack::step(Graph & g, Var x, const std::vector<Var> & state) const
{
  std::vector<Var> next;
  Var input = x;
  for (std::size_t l = 0; l < layers(); ++l) {
    const Var h = diff::gru_cell(g, input, state[l], g.param(*w_ih_[l]), g.param(*w_hh_[l]),
        g.param(*b_ih_[l]), g.param(*b_hh_[l]));
    next.push_back(h);
    input = h;
  }
  return next;
}

Var team_graph_layer(Graph & g, Var nodes, std::size_t set_size, const RowFn & edge_fn,
  const RowFn & node_fn)
{
  const std::size_t rows = g.value(nodes).rows();
  if (set_size == 0 || rows % set_size != 0) {
    throw diff::ShapeError("team_graph_layer: " + std::to_string(rows) +
      " node rows do not split into sets of " + std::to_string(set_size));
  }
  const std::size_t sets = rows / set_size;
  std::vector<std::uint32_t> left;
  std::vector<std::uint32_t> right;
  left.reserve(sets * set_size * set_size);
  right.reserve(sets * set_size * set_size);
  for (std::size_t s = 0; s < sets; ++s) {
    for (std::size_t i = 0; i < set_size; ++i) {
      for (std::size_t j = 0; j < set_size; ++j) {
        left.push_back(static_cast<std::uint32_t>(s * set_size + i));
        right.push_back(static_cast<std::uint32_t>(s * set_size + j));
      }
    }
  }
  const Var pairs = diff::concat_cols(g,
      {diff::gather_rows(g, nodes, std::move(left)), diff::gather_rows(g, nodes, std::move(right))});
  const Var edges = edge_fn(g, pairs);
  return node_fn(g, diff::sum_over_set(g, edges, set_size));
}

}  // namespace sparsetraj::models
