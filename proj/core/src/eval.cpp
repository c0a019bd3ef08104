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
#include "sim2road/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sim2road/errors.hpp"

namespace sim2road {

Polygon2 bev_footprint(const Box3D& box) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const double hl = 0.5 * box.length, hw = 0.5 * box.width;
  const std::array<Eigen::Vector2d, 4> local = {
      Eigen::Vector2d(hl, hw), Eigen::Vector2d(-hl, hw), Eigen::Vector2d(-hl, -hw),
      Eigen::Vector2d(hl, -hw)};
  Polygon2 out;
  out.reserve(4);
  for (const auto& p : local) {
    out.emplace_back(box.location.x() + c * p.x() - s * p.y(),
                     box.location.y() + s * p.x() + c * p.y());
  }
  return out;
}

double polygon_area(const Polygon2& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * std::abs(twice);
}

namespace {

constexpr double kVertexEps = 1e-9;

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

}  // namespace

Polygon2 clip_convex(const Polygon2& subject, const Polygon2& clip) {
  Polygon2 output = subject;
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const auto& a = clip[e];
    const auto& b = clip[(e + 1) % clip.size()];
    Polygon2 input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const auto& cur = input[i];
      const auto& prev = input[(i + input.size() - 1) % input.size()];
      const double dc = cross(a, b, cur);
      const double dp = cross(a, b, prev);
      const bool cur_in = dc >= -kVertexEps;
      const bool prev_in = dp >= -kVertexEps;
      if (cur_in != prev_in) {
        const double t = dp / (dp - dc);
        output.push_back(prev + t * (cur - prev));
      }
      if (cur_in) output.push_back(cur);
    }
  }
  return output;
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const double z_overlap = std::min(a.location.z() + a.height, b.location.z() + b.height) -
                           std::max(a.location.z(), b.location.z());
  if (z_overlap <= 0.0) return 0.0;
  const double bev = polygon_area(clip_convex(bev_footprint(a), bev_footprint(b)));
  if (bev <= 0.0) return 0.0;
  const double inter = bev * z_overlap;
  const double va = a.length * a.width * a.height;
  const double vb = b.length * b.width * b.height;
  return std::clamp(inter / (va + vb - inter), 0.0, 1.0);
}

void EvalConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw InvalidArgument("EvalConfig: iou_threshold must lie in (0, 1]");
  }
  if (recall_points < 2) throw InvalidArgument("EvalConfig: recall_points must be >= 2");
  if (!(max_range > 0.0)) throw InvalidArgument("EvalConfig: max_range must be positive");
  if (bin_edges.size() < 2 || bin_edges.front() != 0.0 || bin_edges.back() != max_range) {
    throw InvalidArgument("EvalConfig: bin edges must run from 0 to max_range");
  }
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] > bin_edges[i - 1])) {
      throw InvalidArgument("EvalConfig: bin edges must be strictly increasing");
    }
  }
}

double average_precision(const std::vector<bool>& is_tp, std::size_t num_gt, int recall_points,
                         ApMode mode) {
  if (num_gt == 0) return 0.0;
  std::vector<double> precision, recall;
  precision.reserve(is_tp.size());
  recall.reserve(is_tp.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < is_tp.size(); ++i) {
    if (is_tp[i]) ++tp;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(num_gt));
  }
  // Precision envelope: max precision at recall >= recall[i].
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }

  if (mode == ApMode::Continuous) {
    double ap = 0.0, prev_recall = 0.0;
    for (std::size_t i = 0; i < recall.size(); ++i) {
      if (recall[i] > prev_recall) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
      }
    }
    return ap;
  }

  double sum = 0.0;
  std::size_t k = 0;
  for (int i = 1; i <= recall_points; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(recall_points);
    while (k < recall.size() && recall[k] < r - 1e-12) ++k;
    if (k < recall.size()) sum += precision[k];
  }
  return sum / static_cast<double>(recall_points);
}

namespace {

struct RankedDet {
  std::size_t frame;
  std::size_t index;
  double confidence;
};

struct ClassBinCounts {
  std::vector<bool> ranked_tp;
  std::size_t num_gt = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
};

double bev_range(const Box3D& b, const Vec3& origin) {
  return std::hypot(b.location.x() - origin.x(), b.location.y() - origin.y());
}

bool in_bin(double d, double lo, double hi) { return (d > lo || (lo == 0.0 && d >= 0.0)) && d <= hi; }

// One class, one distance bin. GT in range but outside the bin is ignored:
// detections claiming it are neither TP nor FP; unmatched detections only
// count as FP when they fall inside the bin themselves.
ClassBinCounts evaluate_class_bin(const FrameBoxes& dets, const FrameBoxes& gts, Category cls,
                                  double lo, double hi, const EvalConfig& cfg,
                                  std::span<const Vec3> origins) {
  ClassBinCounts out;
  std::vector<RankedDet> ranked;
  std::vector<std::vector<std::size_t>> frame_gt(gts.size());
  std::vector<std::vector<char>> gt_valid(gts.size());
  for (std::size_t f = 0; f < gts.size(); ++f) {
    const Vec3 origin = origins.empty() ? Vec3::Zero() : origins[f];
    for (std::size_t g = 0; g < gts[f].size(); ++g) {
      const Box3D& gt = gts[f][g];
      if (gt.label != cls) continue;
      const double d = bev_range(gt, origin);
      if (d > cfg.max_range) continue;
      frame_gt[f].push_back(g);
      const bool valid = in_bin(d, lo, hi);
      gt_valid[f].push_back(valid ? 1 : 0);
      if (valid) ++out.num_gt;
    }
    for (std::size_t i = 0; i < dets[f].size(); ++i) {
      const Box3D& det = dets[f][i];
      if (det.label != cls || bev_range(det, origin) > cfg.max_range) continue;
      ranked.push_back({f, i, det.confidence});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedDet& a, const RankedDet& b) {
    return a.confidence > b.confidence;
  });

  std::vector<std::vector<char>> claimed(gts.size());
  for (std::size_t f = 0; f < gts.size(); ++f) claimed[f].assign(frame_gt[f].size(), 0);

  for (const RankedDet& r : ranked) {
    const Box3D& det = dets[r.frame][r.index];
    double best_iou = -1.0;
    std::size_t best = frame_gt[r.frame].size();
    for (std::size_t k = 0; k < frame_gt[r.frame].size(); ++k) {
      if (claimed[r.frame][k]) continue;
      const double iou = iou_3d(det, gts[r.frame][frame_gt[r.frame][k]]);
      if (iou >= cfg.iou_threshold && iou > best_iou) {
        best_iou = iou;
        best = k;
      }
    }
    if (best < frame_gt[r.frame].size()) {
      claimed[r.frame][best] = 1;
      if (gt_valid[r.frame][best]) {
        out.ranked_tp.push_back(true);
        ++out.tp;
      }
      continue;
    }
    const Vec3 origin = origins.empty() ? Vec3::Zero() : origins[r.frame];
    if (in_bin(bev_range(det, origin), lo, hi)) {
      out.ranked_tp.push_back(false);
      ++out.fp;
    }
  }
  return out;
}

}  // namespace

EvalReport evaluate(const FrameBoxes& detections, const FrameBoxes& ground_truth,
                    const EvalConfig& cfg, std::span<const Vec3> origins) {
  cfg.validate();
  if (detections.size() != ground_truth.size()) {
    throw InvalidArgument("evaluate: detections cover " + std::to_string(detections.size()) +
                          " frames but ground truth covers " +
                          std::to_string(ground_truth.size()));
  }
  if (!origins.empty() && origins.size() != ground_truth.size()) {
    throw InvalidArgument("evaluate: one origin per frame required");
  }

  const std::size_t num_bins = cfg.bin_edges.size() - 1;
  EvalReport report;
  report.map_bins.assign(num_bins, 0.0);
  std::vector<std::size_t> classes_in_bin(num_bins, 0);
  std::size_t classes_overall = 0;
  std::size_t tp_total = 0, fp_total = 0;

  for (Category cls : kAllCategories) {
    const ClassBinCounts all =
        evaluate_class_bin(detections, ground_truth, cls, 0.0, cfg.max_range, cfg, origins);
    if (all.num_gt == 0 && all.ranked_tp.empty()) continue;

    ClassReport cr;
    cr.num_gt = all.num_gt;
    cr.num_det = all.ranked_tp.size();
    cr.true_positives = all.tp;
    cr.false_positives = all.fp;
    cr.precision = cr.num_det > 0 ? static_cast<double>(all.tp) / static_cast<double>(cr.num_det) : 0.0;
    cr.recall = all.num_gt > 0 ? static_cast<double>(all.tp) / static_cast<double>(all.num_gt) : 0.0;
    cr.ap_overall = 100.0 * average_precision(all.ranked_tp, all.num_gt, cfg.recall_points, cfg.ap_mode);
    tp_total += all.tp;
    fp_total += all.fp;
    report.num_gt += all.num_gt;
    report.num_det += cr.num_det;
    if (all.num_gt > 0) {
      report.map_overall += cr.ap_overall;
      ++classes_overall;
    }

    for (std::size_t b = 0; b < num_bins; ++b) {
      const ClassBinCounts counts = evaluate_class_bin(
          detections, ground_truth, cls, cfg.bin_edges[b], cfg.bin_edges[b + 1], cfg, origins);
      const double ap =
          100.0 * average_precision(counts.ranked_tp, counts.num_gt, cfg.recall_points, cfg.ap_mode);
      cr.ap_bins.push_back(ap);
      cr.bin_has_gt.push_back(counts.num_gt > 0);
      if (counts.num_gt > 0) {
        report.map_bins[b] += ap;
        ++classes_in_bin[b];
      }
    }
    report.per_class.emplace(cls, std::move(cr));
  }

  for (std::size_t b = 0; b < num_bins; ++b) {
    if (classes_in_bin[b] > 0) report.map_bins[b] /= static_cast<double>(classes_in_bin[b]);
  }
  if (classes_overall > 0) report.map_overall /= static_cast<double>(classes_overall);
  if (num_bins >= 1) report.map_easy = report.map_bins[0];
  if (num_bins >= 2) report.map_mod = report.map_bins[1];
  if (num_bins >= 3) report.map_hard = report.map_bins[2];

  report.no_detections = report.num_det == 0;
  report.precision = report.num_det > 0
                         ? static_cast<double>(tp_total) / static_cast<double>(tp_total + fp_total)
                         : 0.0;
  report.recall =
      report.num_gt > 0 ? static_cast<double>(tp_total) / static_cast<double>(report.num_gt) : 0.0;
  return report;
}

std::string EvalReport::to_json(const EvalConfig& cfg) const {
  nlohmann::ordered_json j;
  j["precision"] = precision;
  j["recall"] = recall;
  j["map_easy"] = map_easy;
  j["map_mod"] = map_mod;
  j["map_hard"] = map_hard;
  j["map_overall"] = map_overall;
  j["map_bins"] = map_bins;
  j["no_detections"] = no_detections;
  j["num_gt"] = num_gt;
  j["num_det"] = num_det;
  j["config"] = {{"iou_threshold", cfg.iou_threshold},
                 {"recall_points", cfg.recall_points},
                 {"max_range", cfg.max_range},
                 {"bin_edges", cfg.bin_edges},
                 {"ap_mode", cfg.ap_mode == ApMode::Interpolated ? "interpolated" : "continuous"}};
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (const auto& [cls, cr] : per_class) {
    classes[std::string(category_name(cls))] = {
        {"num_gt", cr.num_gt},         {"num_det", cr.num_det},
        {"true_positives", cr.true_positives}, {"false_positives", cr.false_positives},
        {"precision", cr.precision},   {"recall", cr.recall},
        {"ap_bins", cr.ap_bins},       {"ap_overall", cr.ap_overall}};
  }
  j["per_class"] = std::move(classes);
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table(const std::string& row_name) const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %9s %9s %8s %8s %8s %8s\n", "Method", "Precision",
                "Recall", "Easy", "Mod.", "Hard", "Overall");
  os << line;
  std::snprintf(line, sizeof(line), "%-16s %9.2f %9.2f %8.2f %8.2f %8.2f %8.2f\n",
                row_name.c_str(), 100.0 * precision, 100.0 * recall, map_easy, map_mod, map_hard,
                map_overall);
  os << line;
  return os.str();
}

}  // namespace sim2road
