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
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sim2road/types.hpp"

namespace sim2road {

using Polygon2 = std::vector<Eigen::Vector2d>;

/// Counter-clockwise footprint of an upright box in the x-y plane.
Polygon2 bev_footprint(const Box3D& box);

double polygon_area(const Polygon2& poly);

/// Sutherland-Hodgman clip of `subject` against the convex CCW polygon
/// `clip`.
Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip);

/// Volume IoU of two upright boxes: rotated BEV overlap times vertical
/// overlap over the union volume. Pitch and roll are ignored.
double iou_3d(const Box3D& a, const Box3D& b);

enum class ApMode { Interpolated, Continuous };

struct EvalConfig {
  double iou_threshold = 0.1;
  int recall_points = 40;
  double max_range = 120.0;
  /// Distance bin edges in meters; bins are (e[k], e[k+1]] and the first bin
  /// also takes distance 0. Three bins give easy / moderate / hard.
  std::vector<double> bin_edges = {0.0, 40.0, 80.0, 120.0};
  ApMode ap_mode = ApMode::Interpolated;

  void validate() const;
};

struct ClassReport {
  std::size_t num_gt = 0;  // in range
  std::size_t num_det = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  double precision = 0.0;
  double recall = 0.0;
  std::vector<double> ap_bins;  // percent, NaN-free; 0 for bins without GT
  std::vector<bool> bin_has_gt;
  double ap_overall = 0.0;  // percent
};

struct EvalReport {
  double precision = 0.0;  // ratio
  double recall = 0.0;     // ratio
  double map_easy = 0.0;   // percent
  double map_mod = 0.0;
  double map_hard = 0.0;
  double map_overall = 0.0;
  std::vector<double> map_bins;
  bool no_detections = false;
  std::size_t num_gt = 0;
  std::size_t num_det = 0;
  std::map<Category, ClassReport> per_class;  // classes present in GT or detections

  std::string to_json(const EvalConfig& cfg) const;
  std::string to_table(const std::string& row_name = "sim2road") const;
};

using FrameBoxes = std::vector<std::vector<Box3D>>;

/// Greedy per-class matching by descending confidence (ties by input order)
/// to the unclaimed GT of highest 3D IoU at or above the threshold, then
/// N-point interpolated AP per distance bin. Distances are BEV ranges from
/// `origins[frame]` (world origin when `origins` is empty).
EvalReport evaluate(const FrameBoxes& detections, const FrameBoxes& ground_truth,
                    const EvalConfig& cfg, std::span<const Vec3> origins = {});

/// Interpolated or continuous AP (as a ratio) of a ranked TP/FP sequence.
double average_precision(const std::vector<bool>& is_tp, std::size_t num_gt, int recall_points,
                         ApMode mode);

}  // namespace sim2road
