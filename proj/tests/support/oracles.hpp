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
// Reference computations used only by tests. None of these call into the
// library code paths they are used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace sim2road::oracle {

/// Element-wise expansion of Rx(roll) * Ry(pitch) * Rz(yaw), written out by
/// hand.
inline Eigen::Matrix3d expanded_rotation(double roll, double pitch, double yaw) {
  const double cf = std::cos(roll), sf = std::sin(roll);
  const double ct = std::cos(pitch), st = std::sin(pitch);
  const double cp = std::cos(yaw), sp = std::sin(yaw);
  Eigen::Matrix3d r;
  r << ct * cp, -ct * sp, st,
       sf * st * cp + cf * sp, -sf * st * sp + cf * cp, -sf * ct,
       -cf * st * cp + sf * sp, cf * st * sp + sf * cp, cf * ct;
  return r;
}

/// Exhaustive minimum over all injective row->column (or column->row)
/// assignments; cost summed in row order.
inline double brute_force_assignment(const Eigen::MatrixXd& cost) {
  const bool transpose = cost.rows() > cost.cols();
  const Eigen::MatrixXd c = transpose ? Eigen::MatrixXd(cost.transpose()) : cost;
  const int rows = static_cast<int>(c.rows()), cols = static_cast<int>(c.cols());
  if (rows == 0) return 0.0;
  std::vector<int> perm(static_cast<std::size_t>(cols));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  // Enumerate permutations of the columns; the first `rows` entries define
  // the assignment (duplicates are harmless for a minimum).
  do {
    double total = 0.0;
    if (!transpose) {
      for (int r = 0; r < rows; ++r) total += c(r, perm[static_cast<std::size_t>(r)]);
    } else {
      // Sum in original row order (original rows are c's columns).
      std::vector<double> by_orig_row(static_cast<std::size_t>(cols), 0.0);
      std::vector<char> used(static_cast<std::size_t>(cols), 0);
      for (int r = 0; r < rows; ++r) {
        by_orig_row[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])] =
            c(r, perm[static_cast<std::size_t>(r)]);
        used[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])] = 1;
      }
      for (int k = 0; k < cols; ++k)
        if (used[static_cast<std::size_t>(k)]) total += by_orig_row[static_cast<std::size_t>(k)];
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct McBox {
  double cx, cy, z0, l, w, h, yaw;
};

inline bool mc_contains(const McBox& b, double x, double y, double z) {
  if (z < b.z0 || z > b.z0 + b.h) return false;
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double dx = x - b.cx, dy = y - b.cy;
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= 0.5 * b.l && std::abs(ly) <= 0.5 * b.w;
}

/// Monte-Carlo 3D IoU: sample uniformly inside `a`, estimate the fraction
/// that also lies in `b`, and convert to IoU.
inline double monte_carlo_iou(const McBox& a, const McBox& b, std::size_t samples,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double c = std::cos(a.yaw), s = std::sin(a.yaw);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double lx = u(rng) * a.l, ly = u(rng) * a.w, lz = (u(rng) + 0.5) * a.h;
    const double x = a.cx + c * lx - s * ly;
    const double y = a.cy + s * lx + c * ly;
    if (mc_contains(b, x, y, a.z0 + lz)) ++hits;
  }
  const double va = a.l * a.w * a.h, vb = b.l * b.w * b.h;
  const double inter = va * static_cast<double>(hits) / static_cast<double>(samples);
  return inter / (va + vb - inter);
}

/// Forward-mode dual number for gradient oracles.
struct Dual {
  double v = 0.0;
  double d = 0.0;
};
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
inline Dual dsin(Dual a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Dual dcos(Dual a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
inline Dual dabs(Dual a) { return a.v >= 0.0 ? a : Dual{-a.v, -a.d}; }
inline Dual dmin(Dual a, Dual b) { return a.v <= b.v ? a : b; }
inline Dual dmax(Dual a, Dual b) { return a.v >= b.v ? a : b; }
inline Dual konst(double v) { return {v, 0.0}; }

struct PcInput {
  // Box: size, bottom-center, yaw; plane tilt; camera K and E (world->cam).
  double l, w, h;
  double x, y, z, yaw;
  double plane_pitch, plane_roll;
  Eigen::Matrix3d k;
  Eigen::Matrix4d e;
  double tx0, ty0, tx1, ty1;  // target rectangle
  double img_w, img_h;
  double lambda_giou, lambda_center;
};

struct PcEval {
  Dual loss;
  double min_gap;  // smallest separation between competing min/max candidates
};

/// Single-pair projective consistency loss and its derivative along the
/// parameter selected by `which` (0..3 = x, y, z, yaw), written
/// independently with dual numbers.
inline PcEval pc_loss_dual(const PcInput& in, int which) {
  Dual x = konst(in.x), y = konst(in.y), z = konst(in.z), yaw = konst(in.yaw);
  if (which == 0) x.d = 1.0;
  if (which == 1) y.d = 1.0;
  if (which == 2) z.d = 1.0;
  if (which == 3) yaw.d = 1.0;
  const Eigen::Matrix3d tilt = expanded_rotation(in.plane_roll, in.plane_pitch, 0.0);
  const Dual c = dcos(yaw), s = dsin(yaw);
  const double sx[4] = {1, -1, -1, 1}, sy[4] = {1, 1, -1, -1};
  std::vector<Dual> us, vs;
  for (int i = 0; i < 8; ++i) {
    const double ox = sx[i % 4] * 0.5 * in.l, oy = sy[i % 4] * 0.5 * in.w;
    const double oz = i < 4 ? 0.0 : in.h;
    // Yaw first, then the plane tilt, then translation.
    const Dual yx = c * konst(ox) - s * konst(oy);
    const Dual yy = s * konst(ox) + c * konst(oy);
    Dual world[3];
    for (int r = 0; r < 3; ++r) {
      world[r] = konst(tilt(r, 0)) * yx + konst(tilt(r, 1)) * yy + konst(tilt(r, 2) * oz);
    }
    world[0] = world[0] + x;
    world[1] = world[1] + y;
    world[2] = world[2] + z;
    Dual cam[3];
    for (int r = 0; r < 3; ++r) {
      cam[r] = konst(in.e(r, 3));
      for (int k = 0; k < 3; ++k) cam[r] = cam[r] + konst(in.e(r, k)) * world[k];
    }
    us.push_back(konst(in.k(0, 0)) * cam[0] / cam[2] + konst(in.k(0, 2)));
    vs.push_back(konst(in.k(1, 1)) * cam[1] / cam[2] + konst(in.k(1, 2)));
  }
  double min_gap = std::numeric_limits<double>::infinity();
  auto extreme = [&](const std::vector<Dual>& vals, bool want_min) {
    Dual best = vals[0];
    for (const Dual& v : vals) best = want_min ? dmin(best, v) : dmax(best, v);
    for (const Dual& v : vals) {
      const double gap = std::abs(v.v - best.v);
      if (gap > 0.0) min_gap = std::min(min_gap, gap);
    }
    return best;
  };
  const Dual x0 = extreme(us, true), x1 = extreme(us, false);
  const Dual y0 = extreme(vs, true), y1 = extreme(vs, false);
  const Dual tx0 = konst(in.tx0), ty0 = konst(in.ty0), tx1 = konst(in.tx1), ty1 = konst(in.ty1);

  const Dual iw = dmin(x1, tx1) - dmax(x0, tx0);
  const Dual ih = dmin(y1, ty1) - dmax(y0, ty0);
  for (double g : {x1.v - tx1.v, x0.v - tx0.v, y1.v - ty1.v, y0.v - ty0.v}) {
    min_gap = std::min(min_gap, std::abs(g));
  }
  const Dual inter = iw * ih;
  const Dual area_a = (x1 - x0) * (y1 - y0);
  const Dual area_b = (tx1 - tx0) * (ty1 - ty0);
  const Dual uni = area_a + area_b - inter;
  const Dual hull = (dmax(x1, tx1) - dmin(x0, tx0)) * (dmax(y1, ty1) - dmin(y0, ty0));
  const Dual giou = inter / uni - (hull - uni) / hull;
  const Dual dcx = (x0 + x1) * konst(0.5) - (tx0 + tx1) * konst(0.5);
  const Dual dcy = (y0 + y1) * konst(0.5) - (ty0 + ty1) * konst(0.5);
  min_gap = std::min({min_gap, std::abs(dcx.v), std::abs(dcy.v)});
  const Dual center = dabs(dcx) / konst(in.img_w) + dabs(dcy) / konst(in.img_h);
  const Dual loss = konst(in.lambda_giou) * konst(0.5) * (konst(1.0) - giou) +
                    konst(in.lambda_center) * center;
  // Positive overlap is required for the formula above.
  if (iw.v <= 0.0 || ih.v <= 0.0) min_gap = 0.0;
  return {loss, min_gap};
}

}  // namespace sim2road::oracle
