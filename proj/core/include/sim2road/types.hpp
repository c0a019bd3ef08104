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
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "sim2road/errors.hpp"

namespace sim2road {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Evaluation categories. Raw dataset strings are folded into these by the
/// io module's ClassMap; Ignore marks labels that are dropped.
enum class Category : int { Car = 0, Pedestrian = 1, Cyclist = 2, BigVehicle = 3, Ignore = 4 };

inline constexpr std::size_t kNumCategories = 4;
inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::Car, Category::Pedestrian, Category::Cyclist, Category::BigVehicle};

std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);
inline std::size_t category_index(Category c) { return static_cast<std::size_t>(c); }

/// Wraps an angle into [-pi, pi).
double wrap_angle(double radians);

/// Oriented 3D box. `location` is the bottom-center in the world frame
/// (z up); `yaw` rotates about the local up axis.
struct Box3D {
  Category label = Category::Car;
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  Vec3 location = Vec3::Zero();
  double yaw = 0.0;
  double confidence = 1.0;

  /// Throws InvalidArgument on non-positive size, non-finite fields or a
  /// confidence outside [0, 1]. Yaw must already be wrapped.
  void validate() const;
};

/// Axis-aligned image rectangle with strictly positive area.
class Box2D {
 public:
  Box2D(Category label, double x_min, double y_min, double x_max, double y_max,
        double confidence = 1.0);

  static Box2D from_center(Category label, double cx, double cy, double w, double h,
                           double confidence = 1.0);

  Category label() const noexcept { return label_; }
  double x_min() const noexcept { return x_min_; }
  double y_min() const noexcept { return y_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_max() const noexcept { return y_max_; }
  double confidence() const noexcept { return confidence_; }

  double width() const noexcept { return x_max_ - x_min_; }
  double height() const noexcept { return y_max_ - y_min_; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (x_min_ + x_max_); }
  double center_y() const noexcept { return 0.5 * (y_min_ + y_max_); }

  Box2D with_label(Category label) const;
  Box2D with_confidence(double confidence) const;

  friend bool operator==(const Box2D&, const Box2D&) = default;

 private:
  Category label_;
  double x_min_, y_min_, x_max_, y_max_;
  double confidence_;
};

/// Pinhole camera. `extrinsics` maps world coordinates to camera
/// coordinates (x right, y down, z forward).
class CameraModel {
 public:
  CameraModel(const Mat3& intrinsics, const Mat4& extrinsics, int image_width,
              int image_height);

  const Mat3& intrinsics() const noexcept { return intrinsics_; }
  const Mat4& extrinsics() const noexcept { return extrinsics_; }
  int image_width() const noexcept { return image_width_; }
  int image_height() const noexcept { return image_height_; }

  double fx() const { return intrinsics_(0, 0); }
  double fy() const { return intrinsics_(1, 1); }
  double cx() const { return intrinsics_(0, 2); }
  double cy() const { return intrinsics_(1, 2); }

  Mat3 rotation() const { return extrinsics_.topLeftCorner<3, 3>(); }
  Vec3 translation() const { return extrinsics_.topRightCorner<3, 1>(); }
  Vec3 world_to_camera(const Vec3& p) const { return rotation() * p + translation(); }
  Vec3 camera_to_world(const Vec3& p) const;
  /// Camera center expressed in world coordinates.
  Vec3 position() const;

 private:
  Mat3 intrinsics_;
  Mat4 extrinsics_;
  int image_width_;
  int image_height_;
};

/// Ground plane n . p = offset with upward unit normal n. Pitch and roll are
/// the angles that tilt world-up onto n.
struct GroundPlane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  static GroundPlane flat() { return {}; }
  /// Builds the plane through `point` with the given tilt.
  static GroundPlane from_angles(double pitch, double roll, const Vec3& point = Vec3::Zero());
  /// Builds the plane from a normal (normalized and flipped upward here).
  static GroundPlane from_normal(const Vec3& normal, double offset);

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  /// Height of the plane above (x, y).
  double height_at(double x, double y) const;
};

struct ImageSize {
  double width = 960.0;
  double height = 600.0;
};

}  // namespace sim2road
