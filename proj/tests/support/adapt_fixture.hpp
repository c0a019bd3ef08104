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
// Seeded scenario for the adaptation loop: a clean synthetic target domain
// and a teacher whose Car outputs carry a systematic +2 m lateral bias.
#pragma once

#include "sim2road/adapt.hpp"
#include "sim2road/synth.hpp"

namespace sim2road::testing {

struct AdaptScenario {
  Scene scene;
  AdaptationData data;
  ToyModel biased_teacher;
  LoopConfig config;
};

inline AdaptScenario make_adapt_scenario(int frames = 6, std::uint64_t seed = 2024) {
  AdaptScenario s;
  SceneConfig sc;
  sc.seed = seed;
  sc.n_frames = frames;
  s.scene = generate_scene(sc);
  s.biased_teacher.set(Category::Car, ToyModel::kDx, 2.0);
  // Projective consistency has to outweigh the pull toward the biased
  // teacher poses, and the step size has to cover 2 m in the step budget.
  s.config.learning_rate = 0.05;
  s.config.loss.lambda_3d = 0.01;
  return s;
}

/// Binds data pointers after the scenario has reached its final address.
inline void bind(AdaptScenario& s) {
  s.data.scene = &s.scene;
  s.data.raw_detections = ground_truth_of(s.scene);
  s.data.dets_2d = corrupt_2d(s.scene, Detector2DNoise{}, 1);
}

}  // namespace sim2road::testing
