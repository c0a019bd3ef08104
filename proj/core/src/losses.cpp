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
#include "sim2road/losses.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sim2road/boxes2d.hpp"
#include "sim2road/geometry.hpp"

namespace sim2road {

void LossWeights::validate() const {
  for (double v : {lambda_2d, lambda_3d, lambda_dmap, lambda_pc, lambda_moc, lambda_giou_pc,
                   lambda_center_pc}) {
    if (!(v >= 0.0)) throw InvalidArgument("LossWeights: lambdas must be non-negative");
  }
}

ProjectiveConsistency projective_consistency_loss(std::span<const Box3D> preds_3d,
                                                  std::span<const Box2D> targets_2d,
                                                  const GroundPlane& plane, const CameraModel& cam,
                                                  const LossWeights& w, const ImageSize& image) {
  if (preds_3d.size() != targets_2d.size()) {
    throw InvalidArgument("projective_consistency_loss: predictions and targets differ in length");
  }
  ProjectiveConsistency out;
  double sum = 0.0;
  for (std::size_t i = 0; i < preds_3d.size(); ++i) {
    if (!in_front_of_camera(preds_3d[i], plane, cam)) {
      ++out.pairs_skipped;
      continue;
    }
    const Box2D proj = projected_aabb(preds_3d[i], plane, cam);
    sum += w.lambda_giou_pc * 0.5 * (1.0 - giou_2d(proj, targets_2d[i])) +
           w.lambda_center_pc * center_l1(proj, targets_2d[i], image);
    ++out.pairs_used;
  }
  if (out.pairs_used > 0) out.value = sum / static_cast<double>(out.pairs_used);
  return out;
}

namespace {

enum class FrameKind { Inactive, Degenerate, Active };

FrameKind coplanarity_of(std::span<const Box3D> boxes, double& value) {
  value = 0.0;
  if (boxes.size() < 4) return FrameKind::Inactive;
  Vec3 mean = Vec3::Zero();
  for (const Box3D& b : boxes) mean += b.location;
  mean /= static_cast<double>(boxes.size());
  Eigen::MatrixX3d centered(boxes.size(), 3);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    centered.row(static_cast<Eigen::Index>(i)) = (boxes[i].location - mean).transpose();
  }
  const Vec3 sv = Eigen::JacobiSVD<Eigen::MatrixX3d>(centered).singularValues();
  const double total = sv.squaredNorm();
  if (!(total > 0.0)) return FrameKind::Degenerate;
  value = sv(2) * sv(2) / total;
  return FrameKind::Active;
}

}  // namespace

double frame_coplanarity(std::span<const Box3D> boxes) {
  double value = 0.0;
  coplanarity_of(boxes, value);
  return value;
}

CoplanarReport coplanar_loss_report(std::span<const std::vector<Box3D>> frames) {
  CoplanarReport out;
  out.frames = frames.size();
  double sum = 0.0;
  for (const auto& frame : frames) {
    double value = 0.0;
    switch (coplanarity_of(frame, value)) {
      case FrameKind::Inactive: break;
      case FrameKind::Degenerate:
        ++out.active_frames;
        ++out.degenerate_frames;
        break;
      case FrameKind::Active:
        ++out.active_frames;
        sum += value;
        break;
    }
  }
  if (!frames.empty()) out.value = sum / static_cast<double>(frames.size());
  return out;
}

double coplanar_loss(std::span<const std::vector<Box3D>> frames) {
  return coplanar_loss_report(frames).value;
}

double pose_l1(const Box3D& a, const Box3D& b) {
  return (a.location - b.location).cwiseAbs().sum() + std::abs(wrap_angle(a.yaw - b.yaw));
}

LossReport overall_loss(double l_2d, std::span<const double> l_3d_per_object,
                        const std::vector<bool>& mask_3d, double l_dmap, double l_pc, double l_moc,
                        const LossWeights& w) {
  if (l_3d_per_object.size() != mask_3d.size()) {
    throw InvalidArgument("overall_loss: l_3d_per_object and mask_3d differ in length");
  }
  LossReport r;
  r.l_2d = l_2d;
  r.l_dmap = l_dmap;
  r.l_pc = l_pc;
  r.l_moc = l_moc;
  double sum = 0.0;
  for (std::size_t i = 0; i < mask_3d.size(); ++i) {
    if (!mask_3d[i]) continue;
    sum += l_3d_per_object[i];
    ++r.mask_count;
  }
  r.l_3d = r.mask_count > 0 ? sum / static_cast<double>(r.mask_count) : 0.0;
  r.total = w.lambda_2d * r.l_2d + w.lambda_3d * r.l_3d + w.lambda_dmap * r.l_dmap +
            w.lambda_pc * r.l_pc + w.lambda_moc * r.l_moc;
  return r;
}

}  // namespace sim2road
