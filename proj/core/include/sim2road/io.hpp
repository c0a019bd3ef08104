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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sim2road/types.hpp"

namespace sim2road {

/// Folds raw dataset class strings into evaluation categories. Matching is
/// case-insensitive; unknown strings map to Ignore.
class ClassMap {
 public:
  /// Car, Van -> Car; Truck, Trailer, Bus, Emergency_Vehicle -> BigVehicle;
  /// Pedestrian -> Pedestrian; Bicycle, Motorcycle -> Cyclist; Other -> Ignore.
  /// The category names themselves map to their category.
  static ClassMap standard();

  void set(std::string_view raw, Category category);
  Category map(std::string_view raw) const;

 private:
  std::unordered_map<std::string, Category> table_;
};

/// The ten raw classes ClassMap::standard() is total over.
extern const std::array<std::string_view, 10> kRawClasses;

/// One whitespace-separated KITTI object line, camera frame, y down.
struct KittiLabelLine {
  std::string type;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox{};        // left, top, right, bottom
  std::array<double, 3> dimensions{};  // h, w, l
  std::array<double, 3> location{};    // x, y, z (bottom center)
  double rotation_y = 0.0;
  std::optional<double> score;

  /// All 3D fields carry the -1000 sentinel: a 2D-only record.
  bool is_2d_only() const;
};

inline constexpr double kSentinel3D = -1000.0;

KittiLabelLine parse_kitti_line(std::string_view line, const std::string& source,
                                std::size_t line_number);
/// Scores use 6 decimals; 3D fields use 9 so that conversions survive.
std::string format_kitti_line(const KittiLabelLine& line);

/// Camera plus the ground plane of the frame.
struct Calibration {
  CameraModel camera;
  GroundPlane plane = GroundPlane::flat();
};

/// Key-value calibration text:
///   K: 9 floats (row-major)          required
///   E: 16 floats (row-major)         required, world -> camera
///   image_size: width height         optional, default 1920 1080
///   plane: nx ny nz offset           optional, default z = 0
/// Blank lines and lines starting with '#' are skipped.
Calibration parse_calib_text(std::string_view text, const std::string& source = "<calib>");
Calibration parse_calib(const std::filesystem::path& path);
std::string format_calib(const Calibration& calib);
void write_calib(const Calibration& calib, const std::filesystem::path& path);

/// Camera-frame KITTI box <-> world-frame Box3D.
Box3D kitti_to_box(const KittiLabelLine& line, Category label, const CameraModel& cam);
KittiLabelLine box_to_kitti(const Box3D& box, const CameraModel& cam);

/// KITTI yaw about camera y <-> world yaw about z.
double world_yaw_to_kitti(double yaw, const CameraModel& cam);
double kitti_yaw_to_world(double rotation_y, const CameraModel& cam);

/// A parsed object: 3D box, image box, or both. `has_score` is false for
/// 15-field ground-truth lines, whose confidence is 1.
struct LabelRecord {
  std::string type;
  std::optional<Box3D> box3d;
  std::optional<Box2D> box2d;
  bool has_score = false;
  double truncated = 0.0;
  int occluded = 0;

  Category label() const;
  double confidence() const;
};

struct LabelFile {
  std::vector<LabelRecord> records;
  std::size_t ignored = 0;  // lines whose class maps to Ignore

  std::vector<Box3D> boxes3d() const;
  std::vector<Box2D> boxes2d() const;  // records carrying an image box
};

LabelFile parse_label_text(std::string_view text, const ClassMap& class_map,
                           const std::optional<Calibration>& calib,
                           const std::string& source = "<labels>");
LabelFile parse_label_file(const std::filesystem::path& path, const ClassMap& class_map,
                           const std::optional<Calibration>& calib);

/// Records without an image box get the projected 3D box (or zeros when it
/// cannot be projected). Ignore-class records are refused.
std::string format_label_text(const std::vector<LabelRecord>& records, const Calibration& calib);
void write_label_file(const std::vector<LabelRecord>& records, const Calibration& calib,
                      const std::filesystem::path& path);

inline constexpr std::size_t kYawBins = 36;

struct DatasetStats {
  std::map<std::string, std::size_t> class_counts;
  std::map<std::size_t, std::size_t> labels_per_frame;
  std::array<std::size_t, kYawBins> yaw_histogram{};
  std::size_t total_labels = 0;

  std::string to_json() const;
  std::string class_counts_csv() const;
  std::string labels_per_frame_csv() const;
  std::string yaw_histogram_csv() const;
};

std::size_t yaw_bin(double yaw);
DatasetStats dataset_stats(const std::vector<std::vector<Box3D>>& frames);

/// Reads a whole file; throws IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace sim2road
