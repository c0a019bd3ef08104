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
#include <span>
#include <vector>

#include "sim2road/types.hpp"

namespace sim2road {

/// Returns Rx(roll) * Ry(pitch) * Rz(yaw).
Mat3 rotation_matrix(double roll, double pitch, double yaw);

using BoxCorners = std::array<Vec3, 8>;

/// World-frame corners of `box`, tilted by the plane's pitch and roll.
///
/// Object-frame corners are (+-l/2, +-w/2, {0, h}) with the origin at the
/// bottom center. Order: bottom face counter-clockwise seen from above,
/// starting at (+l/2, +w/2, 0), i.e. (+,+) (-,+) (-,-) (+,-); then the top
/// face in the same order.
BoxCorners box_corners_world(const Box3D& box, const GroundPlane& plane);

struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

/// Points at or closer than this camera-frame depth cannot be projected.
inline constexpr double kMinDepth = 1e-6;

/// Pinhole projection of world points. Throws BehindCameraError naming the
/// first point whose camera depth is <= kMinDepth.
std::vector<ImagePoint> project_points(std::span<const Vec3> points, const CameraModel& cam);

/// Inverse of project_points for a known depth.
Vec3 unproject_point(const ImagePoint& p, const CameraModel& cam);

/// Axis-aligned hull of the 8 projected corners. Not clipped to the image.
Box2D projected_aabb(const Box3D& box, const GroundPlane& plane, const CameraModel& cam);

/// True when every corner of `box` has camera depth > kMinDepth.
bool in_front_of_camera(const Box3D& box, const GroundPlane& plane, const CameraModel& cam);

/// Least-squares plane through N >= 3 points via SVD of the centered
/// coordinates. Throws DegenerateGeometryError for collinear input.
GroundPlane fit_ground_plane(std::span<const Vec3> points);

}  // namespace sim2road
