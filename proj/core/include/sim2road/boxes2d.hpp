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

#include "sim2road/types.hpp"

namespace sim2road {

double intersection_area(const Box2D& a, const Box2D& b);

/// Intersection over union; 0 for disjoint boxes.
double iou_2d(const Box2D& a, const Box2D& b);

/// Generalized IoU: IoU minus the share of the enclosing rectangle not
/// covered by the union. Range (-1, 1].
double giou_2d(const Box2D& a, const Box2D& b);

/// |dcx| / norm.width + |dcy| / norm.height between box centers.
double center_l1(const Box2D& a, const Box2D& b, const ImageSize& norm);

}  // namespace sim2road
