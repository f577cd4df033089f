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
#include "sparsetraj/diffcore/adam.hpp"

#include <cmath>
#include <string>

namespace sparsetraj::diff
{

Adam::Adam(ParameterSet & params, AdamConfig config)
: params_(params.trainable()), config_(config)
{
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("Adam: learning rate must be > 0");
  }
  state_.learning_rate = config.learning_rate;
  state_.decay = config.epoch_decay;
  for (const Parameter * p : params_) {
    state_.first_moment.emplace_back(p->value.rows(), p->value.cols(), 0.0);
    state_.second_moment.emplace_back(p->value.rows(), p->value.cols(), 0.0);
  }
}

void Adam::step()
{
  double sq_norm = 0.0;
  for (const Parameter * p : params_) {
    for (std::size_t i = 0; i < p->grad.size(); ++i) {
      const double gi = p->grad[i];
      if (!std::isfinite(gi)) {
        throw NonFiniteGradient(
          "Adam: non-finite gradient in '" + p->name + "' at index " + std::to_string(i) +
          " (step " + std::to_string(state_.steps + 1) + ")");
      }
      sq_norm += gi * gi;
    }
  }
  double clip = 1.0;
  if (config_.max_grad_norm && std::sqrt(sq_norm) > *config_.max_grad_norm) {
    clip = *config_.max_grad_norm / std::sqrt(sq_norm);
  }

  ++state_.steps;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state_.steps));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state_.steps));
  const double lr = state_.learning_rate;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter & p = *params_[k];
    Array & m = state_.first_moment[k];
    Array & v = state_.second_moment[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double gi = p.grad[i] * clip;
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p.value[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

void Adam::end_epoch()
{
  state_.learning_rate *= state_.decay;
}

}  // namespace sparsetraj::diff
