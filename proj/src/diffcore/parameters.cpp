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
#include "sparsetraj/diffcore/parameters.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsetraj::diff
{

Parameter & ParameterSet::add(std::string name, Array init, bool trainable)
{
  if (find(name) != nullptr) {
    throw std::invalid_argument("ParameterSet: duplicate parameter name '" + name + "'");
  }
  auto param = std::make_unique<Parameter>();
  param->name = std::move(name);
  param->grad = Array(init.rows(), init.cols(), 0.0);
  param->value = std::move(init);
  param->trainable = trainable;
  params_.push_back(std::move(param));
  return *params_.back();
}

Parameter & ParameterSet::add_uniform(
  std::string name, std::size_t rows, std::size_t cols, std::size_t fan_in,
  std::mt19937_64 & rng)
{
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Array init(rows, cols);
  for (double & v : init.values()) {
    v = dist(rng);
  }
  return add(std::move(name), std::move(init));
}

Parameter * ParameterSet::find(const std::string & name)
{
  for (auto & p : params_) {
    if (p->name == name) {
      return p.get();
    }
  }
  return nullptr;
}

const Parameter * ParameterSet::find(const std::string & name) const
{
  for (const auto & p : params_) {
    if (p->name == name) {
      return p.get();
    }
  }
  return nullptr;
}

std::vector<Parameter *> ParameterSet::all()
{
  std::vector<Parameter *> out;
  out.reserve(params_.size());
  for (auto & p : params_) {
    out.push_back(p.get());
  }
  return out;
}

std::vector<const Parameter *> ParameterSet::all() const
{
  std::vector<const Parameter *> out;
  out.reserve(params_.size());
  for (const auto & p : params_) {
    out.push_back(p.get());
  }
  return out;
}

std::vector<Parameter *> ParameterSet::trainable()
{
  std::vector<Parameter *> out;
  for (auto & p : params_) {
    if (p->trainable) {
      out.push_back(p.get());
    }
  }
  return out;
}

std::size_t ParameterSet::scalar_count() const
{
  std::size_t n = 0;
  for (const auto & p : params_) {
    if (p->trainable) {
      n += p->value.size();
    }
  }
  return n;
}

void ParameterSet::zero_grad()
{
  for (auto & p : params_) {
    p->zero_grad();
  }
}

}  // namespace sparsetraj::diff
