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
#include "sparsetraj/motion_model.hpp"

#include <cmath>
#include <string>

namespace sparsetraj::motion
{
namespace
{

constexpr std::array<double, 5> kFactorial{1.0, 1.0, 2.0, 6.0, 24.0};

double int_pow(double base, int exponent)
{
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) {
    out *= base;
  }
  return out;
}

void validate(const InterpSegment & seg)
{
  if (seg.duration < 1) {
    throw InvalidSegment(
      "interp segment: duration must be >= 1 step, got " + std::to_string(seg.duration));
  }
  if (!std::isfinite(seg.start) || !std::isfinite(seg.target)) {
    throw InvalidSegment("interp segment: non-finite endpoint");
  }
  for (int k = 0; k < seg.order.initial_derivatives(); ++k) {
    if (!std::isfinite(seg.initial[k])) {
      throw InvalidSegment("interp segment: non-finite initial derivative");
    }
  }
}

}  // namespace

MotionOrder::MotionOrder(int n)
: n_(n)
{
  if (n < kMin || n > kMax) {
    throw std::invalid_argument(
      "motion order must lie in [1, 4], got " + std::to_string(n));
  }
}

SegmentPolynomial::SegmentPolynomial(const InterpSegment & seg)
: start_(seg.start), order_(seg.order.value())
{
  validate(seg);
  const double duration = seg.duration;
  double residual = seg.target - seg.start;
  for (int k = 1; k < order_; ++k) {
    initial_[k - 1] = seg.initial[k - 1];
    residual -= initial_[k - 1] * int_pow(duration, k) / kFactorial[k];
  }
  constant_ = kFactorial[order_] * residual / int_pow(duration, order_);
}

double SegmentPolynomial::position(double t) const
{
  double s = start_;
  for (int k = 1; k < order_; ++k) {
    s += initial_[k - 1] * int_pow(t, k) / kFactorial[k];
  }
  return s + constant_ * int_pow(t, order_) / kFactorial[order_];
}

double SegmentPolynomial::derivative(int m, double t) const
{
  if (m < 1 || m > 3) {
    throw std::invalid_argument("derivative order must lie in [1, 3]");
  }
  if (m > order_) {
    return 0.0;
  }
  double d = 0.0;
  for (int k = m; k < order_; ++k) {
    d += initial_[k - 1] * int_pow(t, k - m) / kFactorial[k - m];
  }
  return d + constant_ * int_pow(t, order_ - m) / kFactorial[order_ - m];
}

double solve_constant_term(const InterpSegment & seg)
{
  return SegmentPolynomial(seg).constant_term();
}

std::vector<double> interpolate_segment(const InterpSegment & seg)
{
  const SegmentPolynomial poly(seg);
  std::vector<double> out(static_cast<std::size_t>(seg.duration));
  for (int t = 1; t < seg.duration; ++t) {
    out[static_cast<std::size_t>(t - 1)] = poly.position(t);
  }
  out.back() = seg.target;
  return out;
}

std::vector<int> control_offsets(int horizon, int stride)
{
  if (horizon < 1 || stride < 1) {
    throw std::invalid_argument("control offsets: horizon and stride must be >= 1");
  }
  std::vector<int> offsets;
  for (int o = stride; o < horizon; o += stride) {
    offsets.push_back(o);
  }
  offsets.push_back(horizon);
  return offsets;
}

int control_count(int horizon, int stride)
{
  if (horizon < 1 || stride < 1) {
    throw std::invalid_argument("control count: horizon and stride must be >= 1");
  }
  return (horizon + stride - 1) / stride;
}

std::vector<double> densify(const SparseTrack & track, MotionOrder order)
{
  if (track.controls.empty()) {
    throw InvalidSegment("densify: sparse track has no control points");
  }
  std::vector<double> dense;
  dense.reserve(static_cast<std::size_t>(track.horizon()));

  InterpSegment seg;
  seg.order = order;
  seg.start = track.anchor.position;
  seg.initial = track.anchor.derivatives;
  int previous = 0;
  for (const ControlPoint & control : track.controls) {
    if (control.offset <= previous) {
      throw InvalidSegment("densify: control offsets must be strictly increasing and positive");
    }
    seg.duration = control.offset - previous;
    seg.target = control.position;
    const SegmentPolynomial poly(seg);
    for (int t = 1; t < seg.duration; ++t) {
      dense.push_back(poly.position(t));
    }
    dense.push_back(control.position);

    for (int m = 1; m <= 3; ++m) {
      seg.initial[m - 1] = poly.derivative(m, seg.duration);
    }
    seg.start = control.position;
    previous = control.offset;
  }
  return dense;
}

KinematicState estimate_anchor_derivatives(std::span<const double> history, MotionOrder order)
{
  const auto needed = static_cast<std::size_t>(order.value());
  if (history.size() < needed || history.empty()) {
    throw std::invalid_argument(
      "estimate_anchor_derivatives: order " + std::to_string(order.value()) + " needs " +
      std::to_string(needed) + " samples, got " + std::to_string(history.size()));
  }
  const std::size_t last = history.size() - 1;
  auto back = [&](std::size_t k) {return history[last - k];};

  KinematicState state;
  state.position = back(0);
  if (order.value() >= 2) {
    state.derivatives[0] = back(0) - back(1);
  }
  if (order.value() >= 3) {
    state.derivatives[1] = back(0) - 2.0 * back(1) + back(2);
  }
  if (order.value() >= 4) {
    state.derivatives[2] = back(0) - 3.0 * back(1) + 3.0 * back(2) - back(3);
  }
  return state;
}

SparseTrack sparsify_dense(std::span<const double> dense, int stride, const KinematicState & anchor)
{
  if (stride < 1) {
    throw std::invalid_argument("sparsify_dense: stride must be >= 1");
  }
  SparseTrack track;
  track.anchor = anchor;
  track.stride = stride;
  if (dense.empty()) {
    return track;
  }
  for (int offset : control_offsets(static_cast<int>(dense.size()), stride)) {
    track.controls.push_back({offset, dense[static_cast<std::size_t>(offset - 1)]});
  }
  return track;
}

LinearInterpolant::LinearInterpolant(int horizon, int stride, MotionOrder order)
: horizon_(horizon), stride_(stride), order_(order), offsets_(control_offsets(horizon, stride))
{
  const auto h = static_cast<std::size_t>(horizon);
  const std::size_t k = offsets_.size();
  control_weights_.assign(h * k, 0.0);
  anchor_weights_.assign(h * 4, 0.0);

  // densify is linear in (anchor, controls); probe it with unit inputs.
  SparseTrack probe;
  probe.stride = stride;
  for (int offset : offsets_) {
    probe.controls.push_back({offset, 0.0});
  }
  for (std::size_t c = 0; c < k; ++c) {
    probe.controls[c].position = 1.0;
    const std::vector<double> column = densify(probe, order);
    for (std::size_t t = 0; t < h; ++t) {
      control_weights_[t * k + c] = column[t];
    }
    probe.controls[c].position = 0.0;
  }
  for (std::size_t a = 0; a < 4; ++a) {
    probe.anchor = {};
    if (a == 0) {
      probe.anchor.position = 1.0;
    } else {
      probe.anchor.derivatives[a - 1] = 1.0;
    }
    const std::vector<double> column = densify(probe, order);
    for (std::size_t t = 0; t < h; ++t) {
      anchor_weights_[t * 4 + a] = column[t];
    }
  }
}

std::vector<double> LinearInterpolant::apply(
  std::span<const double> controls, const KinematicState & anchor) const
{
  const auto h = static_cast<std::size_t>(horizon_);
  const std::size_t k = offsets_.size();
  if (controls.size() != k) {
    throw std::invalid_argument(
      "LinearInterpolant::apply: expected " + std::to_string(k) + " controls, got " +
      std::to_string(controls.size()));
  }
  const std::array<double, 4> state{
    anchor.position, anchor.derivatives[0], anchor.derivatives[1], anchor.derivatives[2]};
  std::vector<double> dense(h, 0.0);
  for (std::size_t t = 0; t < h; ++t) {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      s += control_weights_[t * k + c] * controls[c];
    }
    for (std::size_t a = 0; a < 4; ++a) {
      s += anchor_weights_[t * 4 + a] * state[a];
    }
    dense[t] = s;
  }
  return dense;
}

}  // namespace sparsetraj::motion
