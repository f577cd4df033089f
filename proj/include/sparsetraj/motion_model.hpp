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

#ifndef SPARSETRAJ__MOTION_MODEL_HPP_
#define SPARSETRAJ__MOTION_MODEL_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

/// Constant-Nth-derivative interpolation between sparse control points.
///
/// Everything here works on a single coordinate; x and y are interpolated
/// independently. Time is measured in steps (0.1 s at 10 Hz) so velocities
/// are m/step, accelerations m/step^2 and so on.
namespace sparsetraj::motion
{

class InvalidSegment : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Order of the derivative held constant: 1 velocity, 2 acceleration,
/// 3 jerk, 4 snap.
class MotionOrder
{
public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 4;

  explicit MotionOrder(int n);

  int value() const {return n_;}
  /// Number of initial derivatives the order consumes (v0 for order 2, v0/a0
  /// for order 3, ...).
  int initial_derivatives() const {return n_ - 1;}

  friend bool operator==(MotionOrder, MotionOrder) = default;

private:
  int n_;
};

/// Position and the first three derivatives (v, a, j) at the start of a span.
struct KinematicState
{
  double position = 0.0;
  std::array<double, 3> derivatives{};  // v, a, j per step^k
};

/// One span between a known state and a target position `duration` steps
/// later.
struct InterpSegment
{
  double start = 0.0;
  double target = 0.0;
  std::array<double, 3> initial{};  // v0, a0, j0; only the first order-1 used
  int duration = 1;
  MotionOrder order{2};
};

/// The integrated polynomial of one segment, positions relative to `start`.
class SegmentPolynomial
{
public:
  explicit SegmentPolynomial(const InterpSegment & seg);

  double constant_term() const {return constant_;}
  double position(double t) const;
  /// m-th derivative at t, 1 <= m <= 3.
  double derivative(int m, double t) const;

private:
  double start_;
  std::array<double, 3> initial_{};
  double constant_;
  int order_;
};

/// The held-constant derivative: v, a, j or snap depending on the order.
double solve_constant_term(const InterpSegment & seg);

/// Positions at t = 1..duration. The last entry equals the target.
std::vector<double> interpolate_segment(const InterpSegment & seg);

struct ControlPoint
{
  int offset = 0;  // steps after the anchor
  double position = 0.0;
};

/// Anchor state plus ordered sparse control points.
struct SparseTrack
{
  KinematicState anchor;
  std::vector<ControlPoint> controls;
  int stride = 1;

  int horizon() const {return controls.empty() ? 0 : controls.back().offset;}
};

/// Offsets stride, 2*stride, ... with the final offset clamped onto the
/// horizon; ceil(horizon / stride) entries.
std::vector<int> control_offsets(int horizon, int stride);
int control_count(int horizon, int stride);

/// Chains interpolate_segment over the controls. Segment k > 1 starts from the
/// terminal derivatives of segment k - 1. Returns one position per step,
/// offsets 1..horizon.
std::vector<double> densify(const SparseTrack & track, MotionOrder order);

/// Backward finite differences over the trailing samples of `history`
/// (oldest first). Fills the derivatives the order needs; the rest stay 0.
KinematicState estimate_anchor_derivatives(std::span<const double> history, MotionOrder order);

/// Keeps every stride-th dense output (offsets counted from the first future
/// step) plus the final one.
SparseTrack sparsify_dense(
  std::span<const double> dense, int stride, const KinematicState & anchor = {});

/// densify() written as a fixed linear map: dense = C * controls + A * anchor,
/// where anchor = (position, v0, a0, j0). Used for batched, differentiable
/// densification.
class LinearInterpolant
{
public:
  LinearInterpolant(int horizon, int stride, MotionOrder order);

  int horizon() const {return horizon_;}
  int stride() const {return stride_;}
  int controls() const {return static_cast<int>(offsets_.size());}
  MotionOrder order() const {return order_;}
  const std::vector<int> & offsets() const {return offsets_;}

  /// Row-major [horizon x controls].
  const std::vector<double> & control_weights() const {return control_weights_;}
  /// Row-major [horizon x 4].
  const std::vector<double> & anchor_weights() const {return anchor_weights_;}

  std::vector<double> apply(std::span<const double> controls, const KinematicState & anchor) const;

private:
  int horizon_;
  int stride_;
  MotionOrder order_;
  std::vector<int> offsets_;
  std::vector<double> control_weights_;
  std::vector<double> anchor_weights_;
};

}  // namespace sparsetraj::motion

#endif  // SPARSETRAJ__MOTION_MODEL_HPP_
