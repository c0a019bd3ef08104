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
#include "sim2road/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sim2road {

ToyModel::ToyModel() { params_.values.assign(kParamsPerClass * kNumCategories, 0.0); }

ToyModel::ToyModel(ParamVector params) : params_(std::move(params)) {
  if (params_.values.size() != kParamsPerClass * kNumCategories) {
    throw InvalidArgument("ToyModel: expected " + std::to_string(kParamsPerClass * kNumCategories) +
                          " parameters");
  }
  normalize();
}

double ToyModel::get(Category c, Slot s) const {
  return params_.values[category_index(c) * kParamsPerClass + s];
}

void ToyModel::set(Category c, Slot s, double value) {
  params_.values[category_index(c) * kParamsPerClass + s] = s == kDyaw ? wrap_angle(value) : value;
}

void ToyModel::normalize() {
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    double& yaw = params_.values[c * kParamsPerClass + kDyaw];
    yaw = wrap_angle(yaw);
  }
}

Box3D ToyModel::apply(const Box3D& raw) const {
  if (raw.label == Category::Ignore) return raw;
  Box3D b = raw;
  b.location += Vec3(get(raw.label, kDx), get(raw.label, kDy), get(raw.label, kDz));
  b.yaw = wrap_angle(b.yaw + get(raw.label, kDyaw));
  b.confidence = std::clamp(b.confidence + get(raw.label, kDconf), 0.0, 1.0);
  return b;
}

std::vector<Box3D> ToyModel::apply(const std::vector<Box3D>& raw) const {
  std::vector<Box3D> out;
  out.reserve(raw.size());
  for (const Box3D& b : raw) out.push_back(apply(b));
  return out;
}

void LoopConfig::validate() const {
  if (steps < 1) throw InvalidArgument("LoopConfig: steps must be >= 1");
  if (!(learning_rate >= 0.0)) throw InvalidArgument("LoopConfig: learning_rate must be >= 0");
  if (!(fd_epsilon > 0.0)) throw InvalidArgument("LoopConfig: fd_epsilon must be > 0");
  ema.validate();
  match.validate();
  loss.validate();
}

namespace {

void check_finite(double v, const char* term, int step) {
  if (!std::isfinite(v)) {
    throw NumericalError(std::string("run_adaptation: non-finite ") + term + " at step " +
                         std::to_string(step));
  }
}

}  // namespace

LossReport StudentObjective::evaluate(const ToyModel& student, std::size_t* pc_skipped) const {
  const auto& frames = data->scene->frames;
  std::vector<std::vector<Box3D>> student_out;
  student_out.reserve(frames.size());
  double pc_sum = 0.0;
  std::size_t pc_used = 0, skipped = 0;
  std::vector<double> l3d;
  std::vector<bool> mask;

  for (std::size_t f = 0; f < frames.size(); ++f) {
    student_out.push_back(student.apply(data->raw_detections[f]));
    const auto& out = student_out.back();
    for (const Box3D& b : out) {
      if (!b.location.allFinite() || !std::isfinite(b.yaw) || !std::isfinite(b.confidence)) {
        throw NumericalError("StudentObjective: non-finite student output in frame " +
                             std::to_string(f));
      }
    }
    const PseudoLabelSet& labels = (*pseudo)[f];
    const Calibration& calib = frames[f].calib;

    std::vector<Box3D> preds;
    std::vector<Box2D> targets;
    for (const MatchedPair& m : labels.matched_3d) {
      preds.push_back(out[m.teacher_index]);
      targets.push_back(m.box2d);
      l3d.push_back(pose_l1(out[m.teacher_index], m.box3d));
      mask.push_back(true);
    }
    for (std::size_t k = 0; k < labels.kept_2d.size(); ++k) {
      l3d.push_back(0.0);
      mask.push_back(false);
    }
    const ImageSize image{static_cast<double>(calib.camera.image_width()),
                          static_cast<double>(calib.camera.image_height())};
    const ProjectiveConsistency pc =
        projective_consistency_loss(preds, targets, calib.plane, calib.camera, weights, image);
    pc_sum += pc.value * static_cast<double>(pc.pairs_used);
    pc_used += pc.pairs_used;
    skipped += pc.pairs_skipped;
  }
  if (pc_skipped) *pc_skipped = skipped;
  const double l_pc = pc_used > 0 ? pc_sum / static_cast<double>(pc_used) : 0.0;
  const double l_moc = coplanar_loss(student_out);
  return overall_loss(0.0, l3d, mask, 0.0, l_pc, l_moc, weights);
}

AdaptationResult run_adaptation(const AdaptationData& data, const ToyModel& teacher_init,
                                const LoopConfig& cfg) {
  cfg.validate();
  if (data.scene == nullptr) throw InvalidArgument("run_adaptation: no scene");
  const std::size_t n_frames = data.scene->frames.size();
  if (data.raw_detections.size() != n_frames || data.dets_2d.size() != n_frames) {
    throw InvalidArgument("run_adaptation: scene, raw detections and 2D detections must be frame-aligned");
  }

  for (double v : teacher_init.params().values) {
    if (!std::isfinite(v)) throw InvalidArgument("run_adaptation: non-finite teacher_init parameter");
  }

  // Only classes that occur can receive a gradient.
  std::array<bool, kNumCategories> active{};
  for (const auto& frame : data.raw_detections)
    for (const Box3D& b : frame)
      if (b.label != Category::Ignore) active[category_index(b.label)] = true;

  AdaptationResult result;
  ToyModel teacher = teacher_init;
  ToyModel student = teacher_init;
  std::vector<PseudoLabelSet> pseudo(n_frames);
  StudentObjective objective{&data, &pseudo, cfg.loss};
  std::vector<double> grad(student.params().values.size(), 0.0);

  for (int step = 1; step <= cfg.steps; ++step) {
    StepRecord rec;
    rec.step = step;
    for (std::size_t f = 0; f < n_frames; ++f) {
      const Frame& frame = data.scene->frames[f];
      pseudo[f] = cabm(teacher.apply(data.raw_detections[f]), data.dets_2d[f], frame.calib.plane,
                       frame.calib.camera, cfg.match);
      rec.matched += pseudo[f].matched_3d.size();
    }
    rec.loss = objective.evaluate(student, &rec.pc_skipped);
    check_finite(rec.loss.l_pc, "projective consistency loss", step);
    check_finite(rec.loss.l_moc, "coplanar loss", step);
    check_finite(rec.loss.l_3d, "3D pose loss", step);
    check_finite(rec.loss.total, "total loss", step);
    result.history.push_back(rec);

    std::fill(grad.begin(), grad.end(), 0.0);
    if (cfg.learning_rate > 0.0) {
      for (std::size_t c = 0; c < kNumCategories; ++c) {
        if (!active[c]) continue;
        for (std::size_t s = 0; s < ToyModel::kParamsPerClass; ++s) {
          const std::size_t i = c * ToyModel::kParamsPerClass + s;
          ToyModel plus = student, minus = student;
          plus.params().values[i] += cfg.fd_epsilon;
          minus.params().values[i] -= cfg.fd_epsilon;
          const double lp = objective.evaluate(plus).total;
          const double lm = objective.evaluate(minus).total;
          grad[i] = (lp - lm) / (2.0 * cfg.fd_epsilon);
          check_finite(grad[i], "loss gradient", step);
        }
      }
      for (std::size_t i = 0; i < grad.size(); ++i) {
        student.params().values[i] -= cfg.learning_rate * grad[i];
        check_finite(student.params().values[i], "student parameter", step);
      }
      student.normalize();
    }
    student.params().step = step;

    const std::int64_t before = teacher.params().step;
    teacher = ToyModel(ema_update(teacher.params(), student.params(), cfg.ema, step));
    if (teacher.params().step != before) {
      result.snapshots.push_back({step, student.params(), teacher.params()});
    }
  }
  result.student = student;
  result.teacher = teacher;
  return result;
}

std::string AdaptationResult::history_csv() const {
  std::string out = "step,l_2d,l_3d,l_dmap,l_pc,l_moc,total,mask_count,matched";
  const std::size_t n = ToyModel::kParamsPerClass * kNumCategories;
  static constexpr std::array<const char*, ToyModel::kParamsPerClass> kSlot = {"dx", "dy", "dz",
                                                                               "dyaw", "dconf"};
  for (const char* who : {"student", "teacher"}) {
    for (std::size_t i = 0; i < n; ++i) {
      out += ",";
      out += who;
      out += "_";
      out += category_name(kAllCategories[i / ToyModel::kParamsPerClass]);
      out += "_";
      out += kSlot[i % ToyModel::kParamsPerClass];
    }
  }
  out += "\n";
  std::size_t snap = 0;
  char buf[64];
  for (const StepRecord& r : history) {
    std::snprintf(buf, sizeof(buf), "%d", r.step);
    out += buf;
    for (double v : {r.loss.l_2d, r.loss.l_3d, r.loss.l_dmap, r.loss.l_pc, r.loss.l_moc, r.loss.total}) {
      std::snprintf(buf, sizeof(buf), ",%.12g", v);
      out += buf;
    }
    out += "," + std::to_string(r.loss.mask_count) + "," + std::to_string(r.matched);
    const bool has_snapshot = snap < snapshots.size() && snapshots[snap].step == r.step;
    for (int who = 0; who < 2; ++who) {
      for (std::size_t i = 0; i < n; ++i) {
        if (has_snapshot) {
          const auto& p = who == 0 ? snapshots[snap].student : snapshots[snap].teacher;
          std::snprintf(buf, sizeof(buf), ",%.12g", p.values[i]);
          out += buf;
        } else {
          out += ",";
        }
      }
    }
    if (has_snapshot) ++snap;
    out += "\n";
  }
  return out;
}

}  // namespace sim2road
