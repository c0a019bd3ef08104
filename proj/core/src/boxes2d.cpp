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
#include "sim2road/boxes2d.hpp"

#include <algorithm>
#include <cmath>

namespace sim2road {

double intersection_area(const Box2D& a, const Box2D& b) {
  const double w = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double h = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou_2d(const Box2D& a, const Box2D& b) {
  const double inter = intersection_area(a, b);
  return inter / (a.area() + b.area() - inter);
}

double giou_2d(const Box2D& a, const Box2D& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  const double hull = (std::max(a.x_max(), b.x_max()) - std::min(a.x_min(), b.x_min())) *
                      (std::max(a.y_max(), b.y_max()) - std::min(a.y_min(), b.y_min()));
  // hull >= uni mathematically; rounding can flip the sign when the union
  // covers the hull exactly.
  return inter / uni - std::max(hull - uni, 0.0) / hull;
}

double center_l1(const Box2D& a, const Box2D& b, const ImageSize& norm) {
  if (!(norm.width > 0.0 && norm.height > 0.0)) {
    throw InvalidArgument("center_l1: normalization dimensions must be positive");
  }
  return std::abs(a.center_x() - b.center_x()) / norm.width +
         std::abs(a.center_y() - b.center_y()) / norm.height;
}

}  // namespace sim2road
