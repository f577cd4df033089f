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
#include "sparsetraj/diffcore/graph.hpp"

#include <stdexcept>

#include "sparsetraj/kernels/kernels.hpp"

namespace sparsetraj::diff
{

Var Graph::input(Array value)
{
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::param(Parameter & param)
{
  if (auto it = bound_.find(&param); it != bound_.end()) {
    return Var{it->second};
  }
  Node node;
  node.param = &param;
  node.requires_grad = param.trainable;
  nodes_.push_back(std::move(node));
  const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  bound_.emplace(&param, id);
  return Var{id};
}

Var Graph::record(Array value, std::initializer_list<Var> parents, BackwardFn backward)
{
  return record(std::move(value), std::vector<Var>(parents), std::move(backward));
}

Var Graph::record(Array value, const std::vector<Var> & parents, BackwardFn backward)
{
  Node node;
  node.value = std::move(value);
  for (Var p : parents) {
    if (nodes_[p.id].requires_grad) {
      node.requires_grad = true;
      break;
    }
  }
  if (node.requires_grad) {
    node.backward = std::move(backward);
  }
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Array & Graph::grad(Var v)
{
  Node & node = nodes_[v.id];
  if (node.grad.empty()) {
    const Array & val = value(v);
    node.grad = Array(val.rows(), val.cols(), 0.0);
  }
  return node.grad;
}

void Graph::backward(Var loss)
{
  if (value(loss).size() != 1) {
    throw std::invalid_argument(
      "Graph::backward: loss must be 1x1, got " + value(loss).shape_string());
  }
  if (!requires_grad(loss)) {
    return;
  }
  grad(loss)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0; ) {
    Node & node = nodes_[i];
    if (!node.requires_grad || node.grad.empty()) {
      continue;
    }
    if (node.backward) {
      node.backward(*this, Var{static_cast<std::uint32_t>(i)});
    } else if (node.param != nullptr) {
      Array & target = node.param->grad;
      kernels::active().axpy(target.size(), 1.0, node.grad.data(), target.data());
    }
  }
}

}  // namespace sparsetraj::diff
