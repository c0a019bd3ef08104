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

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sim2road/types.hpp"

namespace sim2road {

/// Weights of the 2D/3D matching cost and the acceptance threshold.
struct MatchWeights {
  double lambda_class = 1.0;
  double lambda_giou = 1.0;
  double lambda_conf = 1.0;
  double threshold = 2.2;

  void validate() const;
};

/// Cost of pairing a projected teacher box with a 2D detection. Each term is
/// confined to [0, 1]:
///   class: 0 if labels agree else 1
///   giou:  (1 - GIoU) / 2
///   conf:  1 - conf_3d * conf_2d
double match_cost(const Box2D& projected, const Box2D& det2d, const MatchWeights& w);

using CostMatrix = Eigen::MatrixXd;
using Assignment = std::vector<std::pair<std::size_t, std::size_t>>;

/// Minimum-cost assignment (Hungarian / shortest augmenting path, O(n^3)).
/// Rectangular inputs are padded to square with a constant sentinel and the
/// padded pairs dropped, so min(rows, cols) pairs come back, sorted by row.
Assignment hungarian(const CostMatrix& cost);

double assignment_cost(const CostMatrix& cost, const Assignment& assignment);

struct MatchedPair {
  /// Teacher pose and size, relabeled with the 2D detector's class.
  Box3D box3d;
  Box2D box2d;
  double cost = 0.0;
  std::size_t teacher_index = 0;
  std::size_t det_index = 0;
};

/// Mixed pseudo-label set of one frame: matched 3D boxes plus 2D-only boxes.
struct PseudoLabelSet {
  std::vector<MatchedPair> matched_3d;
  std::vector<Box2D> kept_2d;
  std::vector<std::size_t> kept_2d_indices;
  std::vector<Box3D> discarded_3d;
  std::vector<std::size_t> discarded_3d_indices;
  /// Teacher boxes discarded because a corner sat behind the camera.
  std::size_t behind_camera = 0;
};

/// Full (ungated) assignment of one frame. Gating at different thresholds
/// reuses it, so accepted pairs grow monotonically with the threshold.
struct MatchCandidates {
  std::vector<Box3D> teacher;
  std::vector<Box2D> dets;
  std::vector<std::size_t> projectable;  // teacher indices in front of the camera
  CostMatrix cost;                       // rows follow `projectable`
  Assignment assignment;                 // (row into cost, det index)
};

MatchCandidates prepare_matches(std::span<const Box3D> teacher_3d, std::span<const Box2D> dets_2d,
                                const GroundPlane& plane, const CameraModel& cam,
                                const MatchWeights& w);

/// Accepts assigned pairs with cost <= threshold.
PseudoLabelSet gate_matches(const MatchCandidates& candidates, double threshold);

/// Confidence-aware bipartite matching of teacher 3D boxes against 2D
/// detections: project, cost, assign globally, then gate by w.threshold.
PseudoLabelSet cabm(std::span<const Box3D> teacher_3d, std::span<const Box2D> dets_2d,
                    const GroundPlane& plane, const CameraModel& cam, const MatchWeights& w);

}  // namespace sim2road
