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
#include "sim2road/geometry.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace sim2road {

Mat3 rotation_matrix(double roll, double pitch, double yaw) {
  if (!(std::isfinite(roll) && std::isfinite(pitch) && std::isfinite(yaw))) {
    throw InvalidArgument("rotation_matrix: non-finite angle");
  }
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  Mat3 rx, ry, rz;
  rx << 1, 0, 0,
        0, cr, -sr,
        0, sr, cr;
  ry << cp, 0, sp,
        0, 1, 0,
        -sp, 0, cp;
  rz << cy, -sy, 0,
        sy, cy, 0,
        0, 0, 1;
  return rx * ry * rz;
}

BoxCorners box_corners_world(const Box3D& box, const GroundPlane& plane) {
  const Mat3 r = rotation_matrix(plane.roll, plane.pitch, box.yaw);
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  static constexpr std::array<std::array<double, 2>, 4> kSigns = {
      {{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}}};
  BoxCorners corners;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& s = kSigns[i % 4];
    const Vec3 local(s[0] * hl, s[1] * hw, i < 4 ? 0.0 : box.height);
    corners[i] = r * local + box.location;
  }
  return corners;
}

std::vector<ImagePoint> project_points(std::span<const Vec3> points, const CameraModel& cam) {
  const Mat3 r = cam.rotation();
  const Vec3 t = cam.translation();
  std::vector<ImagePoint> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 pc = r * points[i] + t;
    if (!(pc.z() > kMinDepth)) throw BehindCameraError(i, pc.z());
    out.push_back({cam.fx() * pc.x() / pc.z() + cam.cx(), cam.fy() * pc.y() / pc.z() + cam.cy(),
                   pc.z()});
  }
  return out;
}

Vec3 unproject_point(const ImagePoint& p, const CameraModel& cam) {
  const Vec3 pc((p.u - cam.cx()) / cam.fx() * p.depth, (p.v - cam.cy()) / cam.fy() * p.depth,
                p.depth);
  return cam.camera_to_world(pc);
}

Box2D projected_aabb(const Box3D& box, const GroundPlane& plane, const CameraModel& cam) {
  const BoxCorners corners = box_corners_world(box, plane);
  const auto pixels = project_points(corners, cam);
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const auto& p : pixels) {
    x0 = std::min(x0, p.u);
    y0 = std::min(y0, p.v);
    x1 = std::max(x1, p.u);
    y1 = std::max(y1, p.v);
  }
  return Box2D(box.label, x0, y0, x1, y1, box.confidence);
}

bool in_front_of_camera(const Box3D& box, const GroundPlane& plane, const CameraModel& cam) {
  for (const Vec3& c : box_corners_world(box, plane)) {
    if (!(cam.world_to_camera(c).z() > kMinDepth)) return false;
  }
  return true;
}

GroundPlane fit_ground_plane(std::span<const Vec3> points) {
  if (points.size() < 3) {
    throw DegenerateGeometryError("fit_ground_plane: need at least 3 points");
  }
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Eigen::MatrixX3d centered(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) centered.row(i) = (points[i] - mean).transpose();

  Eigen::JacobiSVD<Eigen::MatrixX3d> svd(centered, Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  // Rank < 2 means the points do not span a plane.
  const double scale = std::max(sv(0), 1.0);
  if (sv(1) <= 1e-12 * scale * std::sqrt(static_cast<double>(points.size()))) {
    throw DegenerateGeometryError("fit_ground_plane: points are collinear or coincident");
  }
  Vec3 normal = svd.matrixV().col(2);
  if (normal.z() < 0.0) normal = -normal;
  if (normal.z() == 0.0) throw DegenerateGeometryError("fit_ground_plane: vertical plane");
  return GroundPlane::from_normal(normal, normal.dot(mean));
}

}  // namespace sim2road
