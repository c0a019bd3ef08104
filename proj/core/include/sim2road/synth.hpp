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
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sim2road/io.hpp"
#include "sim2road/types.hpp"

namespace sim2road {

/// The single random stream behind every synthetic draw.
///
/// Engine: std::mt19937_64 (fully specified by the C++ standard).
///   uniform()  = (next() >> 11) * 2^-53, in [0, 1)
///   normal()   = Box-Muller on two uniforms u1, u2:
///                sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
///   poisson(m) = Knuth's product-of-uniforms method
/// Standard-library distributions are avoided because their algorithms are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n);
  std::size_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SizePrior {
  double length = 4.4;
  double width = 1.8;
  double height = 1.5;
  double spread = 0.1;  // relative, uniform in [-spread, spread]
};

struct TeacherNoise {
  Vec3 location_sigma = Vec3::Zero();  // meters per axis
  double yaw_sigma = 0.0;
  double size_sigma = 0.0;  // relative
  double drop_rate = 0.0;
  double false_positive_rate = 0.0;  // Poisson mean of injected boxes per frame
  /// confidence = exp(-decay * (|dloc| + |dyaw| + sum |dsize / size|))
  double confidence_decay = 0.5;
  Range fp_confidence{0.05, 0.5};

  void validate() const;
};

struct Detector2DNoise {
  double jitter_sigma = 0.0;  // per edge, relative to the box extent
  double drop_rate = 0.0;
  double false_positive_rate = 0.0;  // Poisson mean per frame
  double class_flip = 0.0;
  /// confidence = exp(-decay * mean |edge shift / extent|)
  double confidence_decay = 2.0;
  Range fp_confidence{0.05, 0.5};

  void validate() const;
};

struct SceneConfig {
  std::uint64_t seed = 0;
  int n_frames = 10;
  int min_objects = 4;
  int max_objects = 12;
  std::array<double, kNumCategories> class_proportions = {0.6, 0.15, 0.1, 0.15};
  std::array<SizePrior, kNumCategories> size_priors = {{
      {4.4, 1.8, 1.5, 0.1},    // Car
      {0.6, 0.6, 1.75, 0.1},   // Pedestrian
      {1.8, 0.6, 1.7, 0.1},    // Cyclist
      {10.0, 2.5, 3.3, 0.2},   // BigVehicle
  }};
  Range placement_range{10.0, 110.0};  // forward distance, meters
  double camera_height = 7.0;
  Range camera_pitch{0.12, 0.22};  // downward tilt, radians
  Range camera_roll{-0.02, 0.02};
  Range ground_pitch{-0.02, 0.02};
  Range ground_roll{-0.02, 0.02};
  double focal_length = 1400.0;  // pixels
  int image_width = 1920;
  int image_height = 1080;
  int max_retries = 2000;  // per object
  TeacherNoise teacher_noise;
  Detector2DNoise detector_noise;

  void validate() const;
};

struct Frame {
  std::string name;
  Calibration calib;
  std::vector<Box3D> ground_truth;
};

struct Scene {
  std::vector<Frame> frames;
};

/// Roadside camera at (0, 0, height) looking along world +y.
CameraModel roadside_camera(double focal, int width, int height, double mount_height,
                            double pitch_down, double roll);

/// Deterministic in cfg.seed. All bottom centers lie on the frame's ground
/// plane and every box projects inside the image.
Scene generate_scene(const SceneConfig& cfg);

using FrameBoxes3D = std::vector<std::vector<Box3D>>;
using FrameBoxes2D = std::vector<std::vector<Box2D>>;

FrameBoxes3D corrupt_teacher(const Scene& scene, const TeacherNoise& noise, std::uint64_t seed);
FrameBoxes2D corrupt_2d(const Scene& scene, const Detector2DNoise& noise, std::uint64_t seed);

FrameBoxes3D ground_truth_of(const Scene& scene);

/// Writes calib/, label/, teacher/ and det2d/ subdirectories of KITTI files
/// named by frame. Empty teacher / det lists skip their directory.
void write_scene(const Scene& scene, const FrameBoxes3D& teacher, const FrameBoxes2D& dets,
                 const std::filesystem::path& root);

}  // namespace sim2road
