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
#include <vector>

#include "sim2road/types.hpp"

namespace sim2road {

struct LossWeights {
  double lambda_2d = 1.0;
  double lambda_3d = 1.0;
  double lambda_dmap = 1.0;
  double lambda_pc = 1.0;
  double lambda_moc = 1.0;
  // Internals of the projective consistency term.
  double lambda_giou_pc = 1.0;
  double lambda_center_pc = 1.0;

  void validate() const;
};

struct ProjectiveConsistency {
  double value = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;  // prediction had a corner behind the camera
};

/// Mean over index-aligned (prediction, target) pairs of
///   lambda_giou_pc * (1 - GIoU(proj(pred), target)) / 2
///   + lambda_center_pc * center_l1(proj(pred), target, image)
/// Pairs whose prediction is not fully in front of the camera are skipped.
ProjectiveConsistency projective_consistency_loss(std::span<const Box3D> preds_3d,
                                                  std::span<const Box2D> targets_2d,
                                                  const GroundPlane& plane, const CameraModel& cam,
                                                  const LossWeights& w, const ImageSize& image);

/// Smallest normalized variance sigma_3^2 / sum(sigma^2) of the centered
/// bottom centers. Returns 0 for fewer than 4 boxes or coincident centers.
double frame_coplanarity(std::span<const Box3D> boxes);

struct CoplanarReport {
  double value = 0.0;
  std::size_t frames = 0;
  std::size_t active_frames = 0;      // frames with >= 4 objects
  std::size_t degenerate_frames = 0;  // >= 4 objects at one point
};

/// Mean of frame_coplanarity over all frames (frames with < 4 objects
/// contribute 0 but still count in the mean).
CoplanarReport coplanar_loss_report(std::span<const std::vector<Box3D>> frames);
double coplanar_loss(std::span<const std::vector<Box3D>> frames);

struct LossReport {
  double l_2d = 0.0;
  double l_3d = 0.0;  // mean of per-object 3D loss over masked objects
  double l_dmap = 0.0;
  double l_pc = 0.0;
  double l_moc = 0.0;
  double total = 0.0;
  std::size_t mask_count = 0;
};

/// Per-object 3D pose error: sum |dx| + |dy| + |dz| + |wrapped dyaw|.
double pose_l1(const Box3D& a, const Box3D& b);

/// Weighted composition of the five loss terms. The 3D term averages
/// l_3d_per_object over entries whose mask is set (0 if none are).
LossReport overall_loss(double l_2d, std::span<const double> l_3d_per_object,
                        const std::vector<bool>& mask_3d, double l_dmap, double l_pc, double l_moc,
                        const LossWeights& w);

}  // namespace sim2road
