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

#include <cstdint>
#include <vector>

namespace sim2road {

struct ParamVector {
  std::vector<double> values;
  std::int64_t step = 0;  // number of EMA updates applied
};

struct EmaConfig {
  double momentum = 0.999;
  std::int64_t update_interval = 200;

  void validate() const;
};

/// Teacher update at `global_step` (1-based). Off-interval steps return the
/// teacher unchanged; interval steps return m * teacher + (1 - m) * student.
ParamVector ema_update(const ParamVector& teacher, const ParamVector& student,
                       const EmaConfig& cfg, std::int64_t global_step);

}  // namespace sim2road
