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
#include "sim2road/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Geometry>

#include "sim2road/eval.hpp"
#include "sim2road/geometry.hpp"

namespace sim2road {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
}

std::size_t Rng::index(std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

std::size_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  const double limit = std::exp(-mean);
  std::size_t k = 0;
  double product = uniform();
  while (product > limit) {
    ++k;
    product *= uniform();
  }
  return k;
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

void TeacherNoise::validate() const {
  if (!(location_sigma.minCoeff() >= 0.0 && yaw_sigma >= 0.0 && size_sigma >= 0.0)) {
    throw InvalidArgument("TeacherNoise: sigmas must be non-negative");
  }
  check_probability(drop_rate, "TeacherNoise.drop_rate");
  check_probability(false_positive_rate, "TeacherNoise.false_positive_rate");
  if (!(confidence_decay >= 0.0)) throw InvalidArgument("TeacherNoise: decay must be >= 0");
}

void Detector2DNoise::validate() const {
  if (!(jitter_sigma >= 0.0)) throw InvalidArgument("Detector2DNoise: jitter must be >= 0");
  check_probability(drop_rate, "Detector2DNoise.drop_rate");
  check_probability(class_flip, "Detector2DNoise.class_flip");
  if (!(false_positive_rate >= 0.0)) {
    throw InvalidArgument("Detector2DNoise: false_positive_rate must be >= 0");
  }
  if (!(confidence_decay >= 0.0)) throw InvalidArgument("Detector2DNoise: decay must be >= 0");
}

void SceneConfig::validate() const {
  if (n_frames < 0) throw InvalidArgument("SceneConfig: n_frames must be >= 0");
  if (min_objects < 0 || max_objects < min_objects) {
    throw InvalidArgument("SceneConfig: need 0 <= min_objects <= max_objects");
  }
  double sum = 0.0;
  for (double p : class_proportions) {
    if (!(p >= 0.0)) throw InvalidArgument("SceneConfig: class proportions must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("SceneConfig: class proportions must sum to 1");
  if (!(placement_range.lo > 0.0 && placement_range.hi <= 120.0 &&
        placement_range.lo < placement_range.hi)) {
    throw InvalidArgument("SceneConfig: placement range must lie within (0, 120]");
  }
  if (!(camera_height > 0.0 && focal_length > 0.0) || image_width <= 0 || image_height <= 0) {
    throw InvalidArgument("SceneConfig: camera parameters must be positive");
  }
  if (max_retries < 1) throw InvalidArgument("SceneConfig: max_retries must be >= 1");
  teacher_noise.validate();
  detector_noise.validate();
}

CameraModel roadside_camera(double focal, int width, int height, double mount_height,
                            double pitch_down, double roll) {
  const Vec3 forward(0.0, std::cos(pitch_down), -std::sin(pitch_down));
  Vec3 right = Vec3::UnitX();
  Vec3 down = forward.cross(right);
  const Eigen::AngleAxisd spin(roll, forward);
  right = spin * right;
  down = spin * down;

  Mat3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  Mat4 e = Mat4::Identity();
  e.topLeftCorner<3, 3>() = r;
  e.topRightCorner<3, 1>() = -(r * Vec3(0.0, 0.0, mount_height));

  Mat3 k;
  k << focal, 0.0, 0.5 * width,
       0.0, focal, 0.5 * height,
       0.0, 0.0, 1.0;
  return CameraModel(k, e, width, height);
}

namespace {

Category draw_category(Rng& rng, const std::array<double, kNumCategories>& proportions) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    acc += proportions[i];
    if (u < acc) return kAllCategories[i];
  }
  for (std::size_t i = kNumCategories; i-- > 0;) {
    if (proportions[i] > 0.0) return kAllCategories[i];
  }
  return Category::Car;
}

bool inside_image(const Box3D& box, const Calibration& calib) {
  if (!in_front_of_camera(box, calib.plane, calib.camera)) return false;
  const Box2D p = projected_aabb(box, calib.plane, calib.camera);
  return p.x_min() >= 0.0 && p.y_min() >= 0.0 && p.x_max() <= calib.camera.image_width() &&
         p.y_max() <= calib.camera.image_height();
}

// Places a box of the given class on the ground inside the view frustum.
Box3D draw_box(Rng& rng, Category label, const SceneConfig& cfg, const Calibration& calib) {
  const SizePrior& prior = cfg.size_priors[category_index(label)];
  const double half_fov = std::atan(0.5 * cfg.image_width / cfg.focal_length);
  Box3D box;
  box.label = label;
  box.length = prior.length * (1.0 + prior.spread * rng.uniform(-1.0, 1.0));
  box.width = prior.width * (1.0 + prior.spread * rng.uniform(-1.0, 1.0));
  box.height = prior.height * (1.0 + prior.spread * rng.uniform(-1.0, 1.0));
  const double forward = rng.uniform(cfg.placement_range.lo, cfg.placement_range.hi);
  const double lateral = forward * std::tan(half_fov) * rng.uniform(-0.9, 0.9);
  box.location = Vec3(lateral, forward, calib.plane.height_at(lateral, forward));
  box.yaw = rng.uniform(-kPi, kPi);
  box.confidence = 1.0;
  return box;
}

}  // namespace

Scene generate_scene(const SceneConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Scene scene;
  scene.frames.reserve(static_cast<std::size_t>(cfg.n_frames));
  for (int f = 0; f < cfg.n_frames; ++f) {
    const double pitch = rng.uniform(cfg.camera_pitch.lo, cfg.camera_pitch.hi);
    const double roll = rng.uniform(cfg.camera_roll.lo, cfg.camera_roll.hi);
    const double g_pitch = rng.uniform(cfg.ground_pitch.lo, cfg.ground_pitch.hi);
    const double g_roll = rng.uniform(cfg.ground_roll.lo, cfg.ground_roll.hi);
    char name[16];
    std::snprintf(name, sizeof(name), "%06d", f);
    Frame frame{name,
                Calibration{roadside_camera(cfg.focal_length, cfg.image_width, cfg.image_height,
                                            cfg.camera_height, pitch, roll),
                            GroundPlane::from_angles(g_pitch, g_roll)},
                {}};

    const auto span = static_cast<std::size_t>(cfg.max_objects - cfg.min_objects + 1);
    const std::size_t count = static_cast<std::size_t>(cfg.min_objects) + rng.index(span);
    for (std::size_t k = 0; k < count; ++k) {
      const Category label = draw_category(rng, cfg.class_proportions);
      bool placed = false;
      for (int attempt = 0; attempt < cfg.max_retries && !placed; ++attempt) {
        const Box3D box = draw_box(rng, label, cfg, frame.calib);
        if (!inside_image(box, frame.calib)) continue;
        const bool overlaps = std::any_of(
            frame.ground_truth.begin(), frame.ground_truth.end(),
            [&](const Box3D& other) { return iou_3d(box, other) > 0.0; });
        if (overlaps) continue;
        frame.ground_truth.push_back(box);
        placed = true;
      }
      if (!placed) {
        throw GenerationError("generate_scene: could not place object " + std::to_string(k) +
                              " of frame " + frame.name + " after " +
                              std::to_string(cfg.max_retries) + " attempts");
      }
    }
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

FrameBoxes3D ground_truth_of(const Scene& scene) {
  FrameBoxes3D out;
  out.reserve(scene.frames.size());
  for (const Frame& f : scene.frames) out.push_back(f.ground_truth);
  return out;
}

FrameBoxes3D corrupt_teacher(const Scene& scene, const TeacherNoise& noise, std::uint64_t seed) {
  noise.validate();
  Rng rng(seed);
  FrameBoxes3D out;
  out.reserve(scene.frames.size());
  for (const Frame& frame : scene.frames) {
    std::vector<Box3D> boxes;
    for (const Box3D& gt : frame.ground_truth) {
      if (rng.bernoulli(noise.drop_rate)) continue;
      Box3D b = gt;
      const Vec3 dloc(rng.normal(0.0, noise.location_sigma.x()),
                      rng.normal(0.0, noise.location_sigma.y()),
                      rng.normal(0.0, noise.location_sigma.z()));
      const double dyaw = rng.normal(0.0, noise.yaw_sigma);
      const Vec3 dsize(rng.normal(0.0, noise.size_sigma), rng.normal(0.0, noise.size_sigma),
                       rng.normal(0.0, noise.size_sigma));
      b.location += dloc;
      b.yaw = wrap_angle(b.yaw + dyaw);
      // Keep sizes positive under heavy noise.
      b.length *= std::max(0.1, 1.0 + dsize.x());
      b.width *= std::max(0.1, 1.0 + dsize.y());
      b.height *= std::max(0.1, 1.0 + dsize.z());
      const double magnitude = dloc.norm() + std::abs(dyaw) + dsize.cwiseAbs().sum();
      b.confidence = std::clamp(std::exp(-noise.confidence_decay * magnitude), 0.0, 1.0);
      boxes.push_back(b);
    }
    const std::size_t fps = rng.poisson(noise.false_positive_rate);
    SceneConfig placement;  // default frustum sampling
    placement.focal_length = frame.calib.camera.fx();
    placement.image_width = frame.calib.camera.image_width();
    placement.image_height = frame.calib.camera.image_height();
    for (std::size_t k = 0; k < fps; ++k) {
      const Category label = kAllCategories[rng.index(kNumCategories)];
      Box3D b = draw_box(rng, label, placement, frame.calib);
      b.confidence = rng.uniform(noise.fp_confidence.lo, noise.fp_confidence.hi);
      boxes.push_back(b);
    }
    out.push_back(std::move(boxes));
  }
  return out;
}

FrameBoxes2D corrupt_2d(const Scene& scene, const Detector2DNoise& noise, std::uint64_t seed) {
  noise.validate();
  Rng rng(seed);
  FrameBoxes2D out;
  out.reserve(scene.frames.size());
  for (const Frame& frame : scene.frames) {
    std::vector<Box2D> boxes;
    const double img_w = frame.calib.camera.image_width();
    const double img_h = frame.calib.camera.image_height();
    for (const Box3D& gt : frame.ground_truth) {
      if (rng.bernoulli(noise.drop_rate)) continue;
      const Box2D exact = projected_aabb(gt, frame.calib.plane, frame.calib.camera);
      std::array<double, 4> shift{};
      for (double& s : shift) s = rng.normal(0.0, noise.jitter_sigma);
      Category label = exact.label();
      if (rng.bernoulli(noise.class_flip)) {
        const std::size_t offset = 1 + rng.index(kNumCategories - 1);
        label = kAllCategories[(category_index(label) + offset) % kNumCategories];
      }
      const double w = exact.width(), h = exact.height();
      double x0 = exact.x_min() + shift[0] * w, x1 = exact.x_max() + shift[2] * w;
      double y0 = exact.y_min() + shift[1] * h, y1 = exact.y_max() + shift[3] * h;
      if (!(x1 - x0 > 1.0) || !(y1 - y0 > 1.0)) {
        // Jitter collapsed the box; fall back to the exact extent.
        x0 = exact.x_min();
        x1 = exact.x_max();
        y0 = exact.y_min();
        y1 = exact.y_max();
        shift = {};
      }
      const double mean_shift =
          0.25 * (std::abs(shift[0]) + std::abs(shift[1]) + std::abs(shift[2]) + std::abs(shift[3]));
      const double conf = std::clamp(std::exp(-noise.confidence_decay * mean_shift), 0.0, 1.0);
      boxes.emplace_back(label, x0, y0, x1, y1, conf);
    }
    const std::size_t fps = rng.poisson(noise.false_positive_rate);
    for (std::size_t k = 0; k < fps; ++k) {
      const Category label = kAllCategories[rng.index(kNumCategories)];
      const double w = rng.uniform(20.0, 200.0);
      const double h = rng.uniform(20.0, 200.0);
      const double x = rng.uniform(0.0, img_w - w);
      const double y = rng.uniform(0.0, img_h - h);
      boxes.emplace_back(label, x, y, x + w, y + h,
                         rng.uniform(noise.fp_confidence.lo, noise.fp_confidence.hi));
    }
    out.push_back(std::move(boxes));
  }
  return out;
}

void write_scene(const Scene& scene, const FrameBoxes3D& teacher, const FrameBoxes2D& dets,
                 const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  const bool with_teacher = !teacher.empty();
  const bool with_dets = !dets.empty();
  if (with_teacher && teacher.size() != scene.frames.size()) {
    throw InvalidArgument("write_scene: teacher frames do not match the scene");
  }
  if (with_dets && dets.size() != scene.frames.size()) {
    throw InvalidArgument("write_scene: 2D detection frames do not match the scene");
  }
  std::error_code ec;
  for (const char* sub : {"calib", "label"}) fs::create_directories(root / sub, ec);
  if (with_teacher) fs::create_directories(root / "teacher", ec);
  if (with_dets) fs::create_directories(root / "det2d", ec);
  if (ec) throw IoError("write_scene: cannot create directories under " + root.string());

  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    const Frame& frame = scene.frames[f];
    const std::string file = frame.name + ".txt";
    write_calib(frame.calib, root / "calib" / file);

    std::vector<LabelRecord> gt;
    for (const Box3D& b : frame.ground_truth) gt.push_back({"", b, std::nullopt, false, 0.0, 0});
    write_label_file(gt, frame.calib, root / "label" / file);

    if (with_teacher) {
      std::vector<LabelRecord> recs;
      for (const Box3D& b : teacher[f]) recs.push_back({"", b, std::nullopt, true, 0.0, 0});
      write_label_file(recs, frame.calib, root / "teacher" / file);
    }
    if (with_dets) {
      std::vector<LabelRecord> recs;
      for (const Box2D& b : dets[f]) recs.push_back({"", std::nullopt, b, true, 0.0, 0});
      write_label_file(recs, frame.calib, root / "det2d" / file);
    }
  }
}

}  // namespace sim2road
