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
#include <cmath>

#include <gtest/gtest.h>

#include "sim2road/errors.hpp"
#include "sim2road/geometry.hpp"
#include "sim2road/losses.hpp"
#include "sim2road/synth.hpp"
#include "support/temp_dir.hpp"

namespace sim2road {
namespace {

SceneConfig small_config(std::uint64_t seed, int frames = 20) {
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.n_frames = frames;
  return cfg;
}

bool same_box(const Box3D& a, const Box3D& b) {
  return a.label == b.label && a.length == b.length && a.width == b.width &&
         a.height == b.height && a.location == b.location && a.yaw == b.yaw &&
         a.confidence == b.confidence;
}

TEST(Rng, DocumentedTransforms) {
  std::mt19937_64 ref(123);
  Rng rng(123);
  for (int i = 0; i < 100; ++i) {
    const double expected = static_cast<double>(ref() >> 11) * 0x1.0p-53;
    ASSERT_EQ(rng.uniform(), expected);
  }
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(Rng, PoissonMean) {
  Rng rng(3);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) sum += static_cast<double>(rng.poisson(0.5));
  EXPECT_NEAR(sum / 20000, 0.5, 0.02);
}

TEST(GenerateScene, Deterministic) {
  const Scene a = generate_scene(small_config(11));
  const Scene b = generate_scene(small_config(11));
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    ASSERT_EQ(a.frames[f].ground_truth.size(), b.frames[f].ground_truth.size());
    for (std::size_t i = 0; i < a.frames[f].ground_truth.size(); ++i)
      ASSERT_TRUE(same_box(a.frames[f].ground_truth[i], b.frames[f].ground_truth[i]));
    ASSERT_EQ(a.frames[f].calib.camera.extrinsics(), b.frames[f].calib.camera.extrinsics());
  }
}

TEST(GenerateScene, GeometryInvariants) {
  SceneConfig cfg = small_config(2, 100);
  const Scene s = generate_scene(cfg);
  for (const auto& frame : s.frames) {
    const auto& gt = frame.ground_truth;
    ASSERT_GE(gt.size(), 4u);
    ASSERT_LE(gt.size(), 12u);
    for (const auto& b : gt) {
      ASSERT_NEAR(frame.calib.plane.signed_distance(b.location), 0.0, 1e-9);
      const Box2D p = projected_aabb(b, frame.calib.plane, frame.calib.camera);
      ASSERT_GE(p.x_min(), 0.0);
      ASSERT_GE(p.y_min(), 0.0);
      ASSERT_LE(p.x_max(), 1920.0);
      ASSERT_LE(p.y_max(), 1080.0);
    }
    ASSERT_NEAR(frame_coplanarity(gt), 0.0, 1e-12);
  }
}

TEST(GenerateScene, InfeasibleConfigFails) {
  SceneConfig cfg = small_config(1, 1);
  cfg.placement_range = {1.0, 1.5};  // too close to see whole objects
  cfg.max_retries = 20;
  EXPECT_THROW(generate_scene(cfg), GenerationError);
  cfg = small_config(1, 1);
  cfg.class_proportions = {0.5, 0.2, 0.2, 0.2};
  EXPECT_THROW(generate_scene(cfg), InvalidArgument);
}

TEST(CorruptTeacher, ZeroNoiseIsGroundTruth) {
  const Scene s = generate_scene(small_config(4));
  const auto t = corrupt_teacher(s, TeacherNoise{}, 9);
  const auto gt = ground_truth_of(s);
  for (std::size_t f = 0; f < gt.size(); ++f) {
    ASSERT_EQ(t[f].size(), gt[f].size());
    for (std::size_t i = 0; i < gt[f].size(); ++i) {
      ASSERT_TRUE(same_box(t[f][i], gt[f][i]));
      ASSERT_EQ(t[f][i].confidence, 1.0);
    }
  }
}

TEST(CorruptTeacher, DropAllLeavesOnlyFalsePositives) {
  const Scene s = generate_scene(small_config(4));
  TeacherNoise n;
  n.drop_rate = 1.0;
  for (const auto& frame : corrupt_teacher(s, n, 1)) EXPECT_TRUE(frame.empty());
  n.false_positive_rate = 1.0;
  std::size_t fps = 0;
  for (const auto& frame : corrupt_teacher(s, n, 1)) {
    fps += frame.size();
    for (const auto& b : frame) EXPECT_LT(b.confidence, 0.5 + 1e-12);
  }
  EXPECT_GT(fps, 0u);
}

TEST(CorruptTeacher, LocationSigmaStatistics) {
  const Scene s = generate_scene(small_config(6, 300));
  TeacherNoise n;
  n.location_sigma = Vec3(0.5, 0.5, 0.0);
  const auto t = corrupt_teacher(s, n, 2);
  const auto gt = ground_truth_of(s);
  double sx = 0, sy = 0, sz = 0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < gt.size(); ++f) {
    for (std::size_t i = 0; i < gt[f].size(); ++i) {
      const Vec3 d = t[f][i].location - gt[f][i].location;
      sx += d.x() * d.x();
      sy += d.y() * d.y();
      sz += d.z() * d.z();
      ++count;
    }
  }
  ASSERT_GT(count, 1000u);
  EXPECT_NEAR(std::sqrt(sx / count), 0.5, 0.05);
  EXPECT_NEAR(std::sqrt(sy / count), 0.5, 0.05);
  EXPECT_EQ(sz, 0.0);
}

TEST(Corrupt2d, ZeroNoiseIsProjection) {
  const Scene s = generate_scene(small_config(4));
  const auto d = corrupt_2d(s, Detector2DNoise{}, 3);
  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    const auto& frame = s.frames[f];
    ASSERT_EQ(d[f].size(), frame.ground_truth.size());
    for (std::size_t i = 0; i < d[f].size(); ++i) {
      const Box2D p = projected_aabb(frame.ground_truth[i], frame.calib.plane, frame.calib.camera);
      ASSERT_EQ(d[f][i], p);
    }
  }
}

TEST(Corrupt2d, FalsePositiveMean) {
  const Scene s = generate_scene(small_config(8, 2000));
  Detector2DNoise n;
  n.false_positive_rate = 0.5;
  const auto d = corrupt_2d(s, n, 4);
  std::size_t extra = 0;
  for (std::size_t f = 0; f < s.frames.size(); ++f) extra += d[f].size() - s.frames[f].ground_truth.size();
  EXPECT_NEAR(static_cast<double>(extra) / 2000.0, 0.5, 0.05);
}

TEST(Corrupt2d, FullClassFlip) {
  const Scene s = generate_scene(small_config(4));
  Detector2DNoise n;
  n.class_flip = 1.0;
  const auto d = corrupt_2d(s, n, 5);
  for (std::size_t f = 0; f < s.frames.size(); ++f)
    for (std::size_t i = 0; i < d[f].size(); ++i)
      ASSERT_NE(d[f][i].label(), s.frames[f].ground_truth[i].label);
}

TEST(WriteScene, ProducesKittiTree) {
  const Scene s = generate_scene(small_config(4, 3));
  testing::TempDir dir("scene");
  write_scene(s, corrupt_teacher(s, TeacherNoise{}, 1), corrupt_2d(s, Detector2DNoise{}, 1), dir.path());
  for (const char* sub : {"calib", "label", "teacher", "det2d"})
    EXPECT_TRUE(std::filesystem::exists(dir.path() / sub / "000002.txt")) << sub;
  const Calibration c = parse_calib(dir.path() / "calib" / "000001.txt");
  const LabelFile f = parse_label_file(dir.path() / "label" / "000001.txt", ClassMap::standard(), c);
  EXPECT_EQ(f.records.size(), s.frames[1].ground_truth.size());
}

}  // namespace
}  // namespace sim2road
