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
#include "sim2road/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sim2road/boxes2d.hpp"
#include "sim2road/geometry.hpp"

namespace sim2road {

void MatchWeights::validate() const {
  if (!(lambda_class >= 0.0 && lambda_giou >= 0.0 && lambda_conf >= 0.0)) {
    throw InvalidArgument("MatchWeights: lambdas must be non-negative");
  }
  if (!(threshold >= 0.0 && threshold <= 3.0)) {
    throw InvalidArgument("MatchWeights: threshold must lie in [0, 3]");
  }
}

double match_cost(const Box2D& projected, const Box2D& det2d, const MatchWeights& w) {
  const double l_class = projected.label() == det2d.label() ? 0.0 : 1.0;
  const double l_giou = 0.5 * (1.0 - giou_2d(projected, det2d));
  const double l_conf = 1.0 - projected.confidence() * det2d.confidence();
  return w.lambda_class * l_class + w.lambda_giou * l_giou + w.lambda_conf * l_conf;
}

namespace {

// Shortest augmenting path with row/column potentials on a square matrix
// (1-based internally). Returns col_for_row.
std::vector<std::size_t> solve_square(const CostMatrix& a) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_for_row(n, 0);
  for (std::size_t j = 1; j <= n; ++j) col_for_row[p[j] - 1] = j - 1;
  return col_for_row;
}

}  // namespace

Assignment hungarian(const CostMatrix& cost) {
  if (!cost.allFinite()) throw InvalidArgument("hungarian: cost matrix has non-finite entries");
  const auto rows = static_cast<std::size_t>(cost.rows());
  const auto cols = static_cast<std::size_t>(cost.cols());
  if (rows == 0 || cols == 0) return {};

  const std::size_t n = std::max(rows, cols);
  CostMatrix square = cost;
  if (rows != cols) {
    const double sentinel = cost.maxCoeff() + 1.0;
    square = CostMatrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                  sentinel);
    square.topLeftCorner(cost.rows(), cost.cols()) = cost;
  }
  const auto col_for_row = solve_square(square);
  Assignment out;
  out.reserve(std::min(rows, cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (col_for_row[r] < cols) out.emplace_back(r, col_for_row[r]);
  }
  return out;
}

double assignment_cost(const CostMatrix& cost, const Assignment& assignment) {
  double total = 0.0;
  for (const auto& [r, c] : assignment) {
    total += cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return total;
}

MatchCandidates prepare_matches(std::span<const Box3D> teacher_3d, std::span<const Box2D> dets_2d,
                                const GroundPlane& plane, const CameraModel& cam,
                                const MatchWeights& w) {
  w.validate();
  MatchCandidates out;
  out.teacher.assign(teacher_3d.begin(), teacher_3d.end());
  out.dets.assign(dets_2d.begin(), dets_2d.end());

  std::vector<Box2D> projected;
  for (std::size_t i = 0; i < teacher_3d.size(); ++i) {
    if (!in_front_of_camera(teacher_3d[i], plane, cam)) continue;
    out.projectable.push_back(i);
    projected.push_back(projected_aabb(teacher_3d[i], plane, cam));
  }

  out.cost.resize(static_cast<Eigen::Index>(projected.size()),
                  static_cast<Eigen::Index>(dets_2d.size()));
  for (std::size_t r = 0; r < projected.size(); ++r) {
    for (std::size_t c = 0; c < dets_2d.size(); ++c) {
      out.cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          match_cost(projected[r], dets_2d[c], w);
    }
  }
  out.assignment = hungarian(out.cost);
  return out;
}

PseudoLabelSet gate_matches(const MatchCandidates& candidates, double threshold) {
  PseudoLabelSet out;
  std::vector<char> teacher_used(candidates.teacher.size(), 0);
  std::vector<char> det_used(candidates.dets.size(), 0);

  for (const auto& [row, det] : candidates.assignment) {
    const double cost = candidates.cost(static_cast<Eigen::Index>(row),
                                        static_cast<Eigen::Index>(det));
    if (!(cost <= threshold)) continue;
    const std::size_t ti = candidates.projectable[row];
    MatchedPair pair{candidates.teacher[ti], candidates.dets[det], cost, ti, det};
    pair.box3d.label = candidates.dets[det].label();
    out.matched_3d.push_back(std::move(pair));
    teacher_used[ti] = 1;
    det_used[det] = 1;
  }
  std::sort(out.matched_3d.begin(), out.matched_3d.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.det_index < b.det_index; });

  for (std::size_t j = 0; j < candidates.dets.size(); ++j) {
    if (det_used[j]) continue;
    out.kept_2d.push_back(candidates.dets[j]);
    out.kept_2d_indices.push_back(j);
  }
  for (std::size_t i = 0; i < candidates.teacher.size(); ++i) {
    if (teacher_used[i]) continue;
    out.discarded_3d.push_back(candidates.teacher[i]);
    out.discarded_3d_indices.push_back(i);
  }
  out.behind_camera = candidates.teacher.size() - candidates.projectable.size();
  return out;
}

PseudoLabelSet cabm(std::span<const Box3D> teacher_3d, std::span<const Box2D> dets_2d,
                    const GroundPlane& plane, const CameraModel& cam, const MatchWeights& w) {
  return gate_matches(prepare_matches(teacher_3d, dets_2d, plane, cam, w), w.threshold);
}

}  // namespace sim2road
