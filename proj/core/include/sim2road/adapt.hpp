// Copyright 2026 The sim2road Authors.
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
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sim2road/ema.hpp"
#include "sim2road/losses.hpp"
#include "sim2road/matching.hpp"
#include "sim2road/synth.hpp"

namespace sim2road {

/// Toy detector: a per-class additive bias (dx, dy, dz, dyaw, dconf) applied
/// to raw 3D detections. Parameters are stored flat, class-major.
class ToyModel {
 public:
  static constexpr std::size_t kParamsPerClass = 5;
  enum Slot : std::size_t { kDx = 0, kDy = 1, kDz = 2, kDyaw = 3, kDconf = 4 };

  ToyModel();
  explicit ToyModel(ParamVector params);

  const ParamVector& params() const noexcept { return params_; }
  ParamVector& params() noexcept { return params_; }

  double get(Category c, Slot s) const;
  void set(Category c, Slot s, double value);

  /// Re-wraps every yaw bias into [-pi, pi).
  void normalize();

  Box3D apply(const Box3D& raw) const;
  std::vector<Box3D> apply(const std::vector<Box3D>& raw) const;

 private:
  ParamVector params_;
};

struct LoopConfig {
  int steps = 2000;
  double learning_rate = 1e-4;
  double fd_epsilon = 1e-4;
  EmaConfig ema;
  MatchWeights match;
  LossWeights loss;

  void validate() const;
};

/// Frame-aligned inputs of one adaptation run.
struct AdaptationData {
  const Scene* scene = nullptr;        // cameras and ground planes
  FrameBoxes3D raw_detections;         // the detector's unbiased 3D outputs
  FrameBoxes2D dets_2d;                // 2D detector outputs
};

struct StepRecord {
  int step = 0;
  LossReport loss;
  std::size_t matched = 0;
  std::size_t pc_skipped = 0;
};

struct Snapshot {
  int step = 0;
  ParamVector student;
  ParamVector teacher;
};

struct AdaptationResult {
  std::vector<StepRecord> history;
  std::vector<Snapshot> snapshots;  // at every EMA update step
  ToyModel student;
  ToyModel teacher;

  /// step, loss terms, total, mask_count, matched, then the student and
  /// teacher parameters on EMA update rows (blank elsewhere).
  std::string history_csv() const;
};

/// Student loss for fixed pseudo-labels: lambda_pc * projective consistency
/// on matched pairs + lambda_moc * coplanarity of the student's boxes +
/// lambda_3d * masked pose L1 to the matched teacher poses.
struct StudentObjective {
  const AdaptationData* data = nullptr;
  const std::vector<PseudoLabelSet>* pseudo = nullptr;
  LossWeights weights;

  LossReport evaluate(const ToyModel& student, std::size_t* pc_skipped = nullptr) const;
};

/// Teacher pseudo-labels -> CABM -> student loss -> finite-difference
/// descent on the student -> EMA teacher update, for cfg.steps steps.
AdaptationResult run_adaptation(const AdaptationData& data, const ToyModel& teacher_init,
                                const LoopConfig& cfg);

}  // namespace sim2road
