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
#include "sim2road/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace sim2road {

BehindCameraError::BehindCameraError(std::size_t index, double depth)
    : Error("point " + std::to_string(index) + " is behind the camera (depth " +
            std::to_string(depth) + " m)"),
      index_(index),
      depth_(depth) {}

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : Error(source + ":" + std::to_string(line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

std::string_view category_name(Category c) {
  switch (c) {
    case Category::Car: return "Car";
    case Category::Pedestrian: return "Pedestrian";
    case Category::Cyclist: return "Cyclist";
    case Category::BigVehicle: return "BigVehicle";
    case Category::Ignore: return "Ignore";
  }
  return "Ignore";
}

std::optional<Category> category_from_name(std::string_view name) {
  for (Category c : {Category::Car, Category::Pedestrian, Category::Cyclist,
                     Category::BigVehicle, Category::Ignore}) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

double wrap_angle(double radians) {
  double wrapped = std::fmod(radians + kPi, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  wrapped -= kPi;
  // fmod can land exactly on +pi after the shift.
  if (wrapped >= kPi) wrapped -= 2.0 * kPi;
  return wrapped;
}

void Box3D::validate() const {
  if (label == Category::Ignore) throw InvalidArgument("Box3D: Ignore is not a box class");
  if (!(std::isfinite(length) && std::isfinite(width) && std::isfinite(height)) ||
      !(length > 0.0 && width > 0.0 && height > 0.0)) {
    throw InvalidArgument("Box3D: dimensions must be finite and positive");
  }
  if (!location.allFinite()) throw InvalidArgument("Box3D: non-finite location");
  if (!std::isfinite(yaw) || yaw < -kPi || yaw >= kPi) {
    throw InvalidArgument("Box3D: yaw must lie in [-pi, pi)");
  }
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw InvalidArgument("Box3D: confidence must lie in [0, 1]");
  }
}

Box2D::Box2D(Category label, double x_min, double y_min, double x_max, double y_max,
             double confidence)
    : label_(label), x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max),
      confidence_(confidence) {
  if (!(std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
        std::isfinite(y_max))) {
    throw InvalidArgument("Box2D: non-finite corner");
  }
  if (!(x_min < x_max && y_min < y_max)) {
    std::ostringstream os;
    os << "Box2D: zero or negative area [" << x_min << ", " << y_min << ", " << x_max << ", "
       << y_max << "]";
    throw InvalidArgument(os.str());
  }
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw InvalidArgument("Box2D: confidence must lie in [0, 1]");
  }
}

Box2D Box2D::from_center(Category label, double cx, double cy, double w, double h,
                         double confidence) {
  return Box2D(label, cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h, confidence);
}

Box2D Box2D::with_label(Category label) const {
  Box2D out = *this;
  out.label_ = label;
  return out;
}

Box2D Box2D::with_confidence(double confidence) const {
  return Box2D(label_, x_min_, y_min_, x_max_, y_max_, confidence);
}

CameraModel::CameraModel(const Mat3& intrinsics, const Mat4& extrinsics, int image_width,
                         int image_height)
    : intrinsics_(intrinsics),
      extrinsics_(extrinsics),
      image_width_(image_width),
      image_height_(image_height) {
  if (!intrinsics.allFinite() || !extrinsics.allFinite()) {
    throw InvalidArgument("CameraModel: non-finite parameter");
  }
  if (!(fx() > 0.0 && fy() > 0.0)) throw InvalidArgument("CameraModel: fx and fy must be > 0");
  if (intrinsics(0, 1) != 0.0 || intrinsics(1, 0) != 0.0 || intrinsics(2, 0) != 0.0 ||
      intrinsics(2, 1) != 0.0 || intrinsics(2, 2) != 1.0) {
    throw InvalidArgument("CameraModel: intrinsics must be [[fx,0,cx],[0,fy,cy],[0,0,1]]");
  }
  if (extrinsics.row(3) != Eigen::RowVector4d(0, 0, 0, 1)) {
    throw InvalidArgument("CameraModel: extrinsics bottom row must be (0, 0, 0, 1)");
  }
  const Mat3 r = rotation();
  if (!(r * r.transpose()).isApprox(Mat3::Identity(), 1e-6) ||
      std::abs(r.determinant() - 1.0) > 1e-6) {
    throw InvalidArgument("CameraModel: extrinsic rotation must be orthonormal with det +1");
  }
  if (image_width <= 0 || image_height <= 0) {
    throw InvalidArgument("CameraModel: image dimensions must be positive");
  }
}

Vec3 CameraModel::camera_to_world(const Vec3& p) const {
  return rotation().transpose() * (p - translation());
}

Vec3 CameraModel::position() const { return -(rotation().transpose() * translation()); }

GroundPlane GroundPlane::from_angles(double pitch, double roll, const Vec3& point) {
  GroundPlane plane;
  plane.normal = Vec3(std::sin(pitch), -std::sin(roll) * std::cos(pitch),
                      std::cos(roll) * std::cos(pitch));
  plane.offset = plane.normal.dot(point);
  plane.pitch = pitch;
  plane.roll = roll;
  return plane;
}

GroundPlane GroundPlane::from_normal(const Vec3& normal, double offset) {
  const double norm = normal.norm();
  if (!(norm > 0.0) || !normal.allFinite()) {
    throw DegenerateGeometryError("GroundPlane: zero or non-finite normal");
  }
  Vec3 n = normal / norm;
  if (n.z() < 0.0) {
    n = -n;
    offset = -offset;
  }
  if (!(n.z() > 0.0)) throw DegenerateGeometryError("GroundPlane: vertical plane");
  GroundPlane plane;
  plane.normal = n;
  plane.offset = offset / norm;
  plane.pitch = std::asin(std::clamp(n.x(), -1.0, 1.0));
  plane.roll = std::atan2(-n.y(), n.z());
  return plane;
}

double GroundPlane::height_at(double x, double y) const {
  return (offset - normal.x() * x - normal.y() * y) / normal.z();
}

}  // namespace sim2road
