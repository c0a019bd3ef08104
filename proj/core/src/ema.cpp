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
#include "sim2road/ema.hpp"

#include <cmath>

#include "sim2road/errors.hpp"

namespace sim2road {

void EmaConfig::validate() const {
  if (!(momentum >= 0.0 && momentum <= 1.0)) {
    throw InvalidArgument("EmaConfig: momentum must lie in [0, 1]");
  }
  if (update_interval < 1) throw InvalidArgument("EmaConfig: update_interval must be >= 1");
}

ParamVector ema_update(const ParamVector& teacher, const ParamVector& student,
                       const EmaConfig& cfg, std::int64_t global_step) {
  cfg.validate();
  if (teacher.values.size() != student.values.size()) {
    throw InvalidArgument("ema_update: teacher and student differ in length");
  }
  if (global_step < 1) throw InvalidArgument("ema_update: global_step must be >= 1");
  if (global_step % cfg.update_interval != 0) return teacher;

  ParamVector out;
  out.values.resize(teacher.values.size());
  const double m = cfg.momentum;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double v = m * teacher.values[i] + (1.0 - m) * student.values[i];
    if (!std::isfinite(v)) throw NumericalError("ema_update: non-finite parameter");
    out.values[i] = v;
  }
  out.step = teacher.step + 1;
  return out;
}

}  // namespace sim2road
