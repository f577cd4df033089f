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

#ifndef SPARSETRAJ__DIFFCORE__GRAPH_HPP_
#define SPARSETRAJ__DIFFCORE__GRAPH_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <unordered_map>
#include <vector>

#include "sparsetraj/diffcore/array.hpp"
#include "sparsetraj/diffcore/parameters.hpp"

namespace sparsetraj::diff
{

/// Handle to a node recorded on a Graph.
struct Var
{
  std::uint32_t id = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so walking the
/// tape backwards visits every node after all of its consumers.
///
/// One Graph per forward/backward pass; it is not thread-safe, but any number
/// of graphs may read the same ParameterSet concurrently as long as none of
/// them calls backward() or runs batch norm in training mode.
class Graph
{
public:
  /// Receives the graph and the node whose gradient is ready; propagates it
  /// into the parents' gradients.
  using BackwardFn = std::function<void (Graph &, Var)>;

  explicit Graph(bool training = false)
  : training_(training) {}

  bool training() const {return training_;}

  /// Constant leaf; no gradient flows into it.
  Var input(Array value);
  /// Leaf bound to a parameter; backward() accumulates into param.grad.
  /// Binding the same parameter twice returns the same node.
  Var param(Parameter & param);

  /// Appends an interior node. `backward` is kept only when some parent needs
  /// a gradient.
  Var record(Array value, std::initializer_list<Var> parents, BackwardFn backward);
  Var record(Array value, const std::vector<Var> & parents, BackwardFn backward);

  const Array & value(Var v) const
  {
    const Node & node = nodes_[v.id];
    return node.param != nullptr ? node.param->value : node.value;
  }
  bool requires_grad(Var v) const {return nodes_[v.id].requires_grad;}
  /// Gradient buffer of a node, zero-allocated on first use.
  Array & grad(Var v);
  bool has_grad(Var v) const {return !nodes_[v.id].grad.empty();}

  /// Seeds d(loss)/d(loss) = 1 and runs the tape backwards. `loss` must be
  /// 1x1.
  void backward(Var loss);

  std::size_t node_count() const {return nodes_.size();}

private:
  struct Node
  {
    Array value;  // unused for parameter leaves, which read param->value
    Array grad;
    BackwardFn backward;
    Parameter * param = nullptr;
    bool requires_grad = false;
  };

  bool training_;
  std::deque<Node> nodes_;  // stable references while recording
  std::unordered_map<const Parameter *, std::uint32_t> bound_;
};

}  // namespace sparsetraj::diff

#endif  // SPARSETRAJ__DIFFCORE__GRAPH_HPP_
