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
#include <random>

#include <benchmark/benchmark.h>

#include "sim2road/eval.hpp"
#include "sim2road/matching.hpp"
#include "sim2road/synth.hpp"

namespace {

using namespace sim2road;

void BM_Hungarian(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  CostMatrix c(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index k = 0; k < n; ++k) c(r, k) = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(hungarian(c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(4, 128)->Complexity(benchmark::oNCubed);

void BM_Iou3d(benchmark::State& state) {
  Box3D a;
  a.length = 4.4;
  a.width = 1.8;
  a.height = 1.5;
  Box3D b = a;
  b.location = Vec3(0.7, 0.4, 0.1);
  b.yaw = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(iou_3d(a, b));
}
BENCHMARK(BM_Iou3d);

void BM_Cabm(benchmark::State& state) {
  SceneConfig cfg;
  cfg.seed = 3;
  cfg.n_frames = 1;
  cfg.min_objects = cfg.max_objects = static_cast<int>(state.range(0));
  cfg.placement_range = {10.0, 120.0};
  const Scene scene = generate_scene(cfg);
  TeacherNoise tn;
  tn.location_sigma = Vec3(0.5, 0.5, 0.0);
  tn.false_positive_rate = 1.0;
  Detector2DNoise dn;
  dn.jitter_sigma = 0.05;
  dn.false_positive_rate = 1.0;
  const auto teacher = corrupt_teacher(scene, tn, 1).front();
  const auto dets = corrupt_2d(scene, dn, 2).front();
  const auto& c = scene.frames.front().calib;
  for (auto _ : state) benchmark::DoNotOptimize(cabm(teacher, dets, c.plane, c.camera, MatchWeights{}));
}
BENCHMARK(BM_Cabm)->Arg(4)->Arg(12)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
