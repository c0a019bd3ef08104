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
#include "sim2road/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "frames.hpp"
#include "sim2road/adapt.hpp"
#include "sim2road/eval.hpp"
#include "sim2road/io.hpp"
#include "sim2road/losses.hpp"
#include "sim2road/matching.hpp"
#include "sim2road/synth.hpp"

#ifndef SIM2ROAD_VERSION
#define SIM2ROAD_VERSION "unknown"
#endif

namespace sim2road::cli {
namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Shared plumbing

struct Inputs {
  std::vector<std::pair<std::string, fs::path>> paths;
  std::optional<std::uint64_t> seed;
};

int g_jobs = 1;  // recorded in manifests

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& out_dir, const CLI::App& sub, const Inputs& inputs) {
  json m;
  m["command"] = sub.get_name();
  m["version"] = SIM2ROAD_VERSION;
  m["config"] = sub.config_to_str(true, false);
  json in = json::object();
  for (const auto& [name, path] : inputs.paths) in[name] = path.string();
  m["inputs"] = in;
  m["jobs"] = g_jobs;
  m["seed"] = inputs.seed ? json(*inputs.seed) : json(nullptr);
  m["wall_clock"] = utc_now();
  write_text_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

void prepare_out(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());
}

std::vector<LabelFile> load_labels(const fs::path& dir, const std::vector<std::string>& stems,
                                   CalibSource* calib, int jobs) {
  std::vector<LabelFile> files(stems.size());
  parallel_for(stems.size(), jobs, [&](std::size_t i) {
    std::optional<Calibration> c;
    if (calib) c = calib->get(stems[i]);
    files[i] = parse_label_file(dir / (stems[i] + ".txt"), ClassMap::standard(), c);
  });
  return files;
}

std::vector<LabelRecord> pseudo_records(const PseudoLabelSet& set) {
  std::vector<LabelRecord> out;
  for (const MatchedPair& m : set.matched_3d) {
    LabelRecord r;
    r.type = std::string(category_name(m.box3d.label));
    r.box3d = m.box3d;
    r.box2d = m.box2d;
    r.has_score = true;
    out.push_back(std::move(r));
  }
  for (const Box2D& d : set.kept_2d) {
    LabelRecord r;
    r.type = std::string(category_name(d.label()));
    r.box2d = d;
    r.has_score = true;
    out.push_back(std::move(r));
  }
  return out;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

void add_match_flags(CLI::App* sub, MatchWeights& w) {
  sub->add_option("--threshold", w.threshold, "Gating threshold on the matching cost")
      ->capture_default_str();
  sub->add_option("--lambda-class", w.lambda_class, "Weight of the class term")->capture_default_str();
  sub->add_option("--lambda-giou", w.lambda_giou, "Weight of the GIoU term")->capture_default_str();
  sub->add_option("--lambda-conf", w.lambda_conf, "Weight of the confidence term")
      ->capture_default_str();
}

void add_loss_flags(CLI::App* sub, LossWeights& w) {
  sub->add_option("--lambda-2d", w.lambda_2d)->capture_default_str();
  sub->add_option("--lambda-3d", w.lambda_3d)->capture_default_str();
  sub->add_option("--lambda-dmap", w.lambda_dmap)->capture_default_str();
  sub->add_option("--lambda-pc", w.lambda_pc)->capture_default_str();
  sub->add_option("--lambda-moc", w.lambda_moc)->capture_default_str();
  sub->add_option("--lambda-giou-pc", w.lambda_giou_pc)->capture_default_str();
  sub->add_option("--lambda-center-pc", w.lambda_center_pc)->capture_default_str();
}

void add_eval_flags(CLI::App* sub, EvalConfig& cfg, std::string& ap_mode) {
  sub->add_option("--iou", cfg.iou_threshold, "3D IoU threshold for a true positive")
      ->capture_default_str();
  sub->add_option("--bins", cfg.bin_edges, "Distance bin edges in meters")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--recall-points", cfg.recall_points)->capture_default_str();
  sub->add_option("--ap-mode", ap_mode, "interpolated or continuous")
      ->check(CLI::IsMember({"interpolated", "continuous"}))
      ->capture_default_str();
}

void finish_eval_config(EvalConfig& cfg, const std::string& ap_mode) {
  cfg.ap_mode = ap_mode == "continuous" ? ApMode::Continuous : ApMode::Interpolated;
  if (!cfg.bin_edges.empty()) cfg.max_range = cfg.bin_edges.back();
  cfg.validate();
}

// ---------------------------------------------------------------------------
// match / sweep

struct MatchOptions {
  fs::path teacher, det2d, calib, out;
  MatchWeights weights;
  int jobs = 1;
};

struct MatchInputs {
  std::vector<std::string> stems;
  std::vector<std::vector<Box3D>> teacher;
  std::vector<std::vector<Box2D>> dets;
  std::vector<const Calibration*> calib;
};

MatchInputs load_match_inputs(const fs::path& teacher_dir, const fs::path& det_dir,
                              CalibSource& calib, int jobs) {
  MatchInputs in;
  in.stems = list_stems(teacher_dir);
  const auto det_stems = list_stems(det_dir);
  require_stems(in.stems, det_stems, det_dir);
  require_stems(det_stems, in.stems, teacher_dir);
  const auto t = load_labels(teacher_dir, in.stems, &calib, jobs);
  const auto d = load_labels(det_dir, in.stems, &calib, jobs);
  for (std::size_t i = 0; i < in.stems.size(); ++i) {
    in.teacher.push_back(t[i].boxes3d());
    in.dets.push_back(d[i].boxes2d());
    in.calib.push_back(&calib.get(in.stems[i]));
  }
  return in;
}

int cmd_match(const MatchOptions& o, const CLI::App& sub, std::ostream& out) {
  o.weights.validate();
  CalibSource calib(o.calib);
  const MatchInputs in = load_match_inputs(o.teacher, o.det2d, calib, o.jobs);
  prepare_out(o.out);
  std::vector<PseudoLabelSet> sets(in.stems.size());
  parallel_for(in.stems.size(), o.jobs, [&](std::size_t i) {
    const Calibration& c = *in.calib[i];
    sets[i] = cabm(in.teacher[i], in.dets[i], c.plane, c.camera, o.weights);
    write_label_file(pseudo_records(sets[i]), c, o.out / (in.stems[i] + ".txt"));
  });

  std::size_t teacher = 0, dets = 0, matched = 0, kept = 0, discarded = 0, behind = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    teacher += in.teacher[i].size();
    dets += in.dets[i].size();
    matched += sets[i].matched_3d.size();
    kept += sets[i].kept_2d.size();
    discarded += sets[i].discarded_3d.size();
    behind += sets[i].behind_camera;
  }
  json s;
  s["frames"] = in.stems.size();
  s["teacher_boxes"] = teacher;
  s["detections_2d"] = dets;
  s["matched"] = matched;
  s["kept_2d"] = kept;
  s["discarded_3d"] = discarded;
  s["behind_camera"] = behind;
  s["threshold"] = o.weights.threshold;
  write_text_file(o.out / "summary.json", s.dump(2) + "\n");
  write_manifest(o.out, sub, {{{"teacher", o.teacher}, {"det2d", o.det2d}, {"calib", o.calib}}, {}});
  out << "matched " << matched << ", kept_2d " << kept << ", discarded_3d " << discarded << " over "
      << in.stems.size() << " frames\n";
  return kOk;
}

struct SweepOptions {
  MatchOptions match;
  fs::path gt;
  std::string param = "threshold";
  double from = 0.0, to = 3.0;
  int steps = 31;
  EvalConfig eval;
  std::string ap_mode = "interpolated";
};

int cmd_sweep(SweepOptions o, const CLI::App& sub, std::ostream& out) {
  if (o.param != "threshold") throw InvalidArgument("sweep: only --param threshold is supported");
  if (o.steps < 1) throw InvalidArgument("sweep: --steps must be >= 1");
  if (!(o.from <= o.to)) throw InvalidArgument("sweep: --from must not exceed --to");
  for (double tau : {o.from, o.to}) {
    MatchWeights w = o.match.weights;
    w.threshold = tau;
    w.validate();
  }
  finish_eval_config(o.eval, o.ap_mode);

  CalibSource calib(o.match.calib);
  const MatchInputs in = load_match_inputs(o.match.teacher, o.match.det2d, calib, o.match.jobs);
  require_stems(in.stems, list_stems(o.gt), o.gt);
  const auto gt_files = load_labels(o.gt, in.stems, &calib, o.match.jobs);
  FrameBoxes gt;
  std::vector<Vec3> origins;
  for (std::size_t i = 0; i < in.stems.size(); ++i) {
    gt.push_back(gt_files[i].boxes3d());
    origins.push_back(in.calib[i]->camera.position());
  }
  std::vector<MatchCandidates> cands(in.stems.size());
  parallel_for(in.stems.size(), o.match.jobs, [&](std::size_t i) {
    const Calibration& c = *in.calib[i];
    cands[i] = prepare_matches(in.teacher[i], in.dets[i], c.plane, c.camera, o.match.weights);
  });

  prepare_out(o.match.out);
  std::string csv = "tau,precision,recall,map,matched\n";
  for (int k = 0; k < o.steps; ++k) {
    const double tau = o.steps == 1 ? o.from : o.from + (o.to - o.from) * k / (o.steps - 1);
    FrameBoxes dets(in.stems.size());
    std::size_t matched = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const PseudoLabelSet set = gate_matches(cands[i], tau);
      for (const MatchedPair& m : set.matched_3d) dets[i].push_back(m.box3d);
      matched += set.matched_3d.size();
    }
    const EvalReport r = evaluate(dets, gt, o.eval, origins);
    csv += fmt("%.6f", tau) + "," + fmt("%.6f", r.precision) + "," + fmt("%.6f", r.recall) + "," +
           fmt("%.6f", r.map_overall) + "," + std::to_string(matched) + "\n";
  }
  write_text_file(o.match.out / "sweep.csv", csv);
  write_manifest(o.match.out, sub,
                 {{{"teacher", o.match.teacher},
                   {"det2d", o.match.det2d},
                   {"gt", o.gt},
                   {"calib", o.match.calib}},
                  {}});
  out << csv;
  return kOk;
}

// ---------------------------------------------------------------------------
// eval / stats

struct EvalOptions {
  fs::path dets, gt, calib, out;
  EvalConfig eval;
  std::string ap_mode = "interpolated";
  int jobs = 1;
};

int cmd_eval(EvalOptions o, const CLI::App& sub, std::ostream& out) {
  finish_eval_config(o.eval, o.ap_mode);
  CalibSource calib(o.calib);
  const auto stems = list_stems(o.gt);
  require_stems(stems, list_stems(o.dets), o.dets);
  const auto gt_files = load_labels(o.gt, stems, &calib, o.jobs);
  const auto det_files = load_labels(o.dets, stems, &calib, o.jobs);
  FrameBoxes gt, dets;
  std::vector<Vec3> origins;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    gt.push_back(gt_files[i].boxes3d());
    dets.push_back(det_files[i].boxes3d());
    origins.push_back(calib.get(stems[i]).camera.position());
  }
  const EvalReport r = evaluate(dets, gt, o.eval, origins);
  prepare_out(o.out);
  write_text_file(o.out / "report.json", r.to_json(o.eval) + "\n");
  const std::string table = r.to_table();
  write_text_file(o.out / "table.txt", table);
  write_manifest(o.out, sub, {{{"dets", o.dets}, {"gt", o.gt}, {"calib", o.calib}}, {}});
  out << table;
  return kOk;
}

struct StatsOptions {
  fs::path labels, calib, out;
  int jobs = 1;
};

int cmd_stats(const StatsOptions& o, const CLI::App& sub, std::ostream& out) {
  const auto stems = list_stems(o.labels);
  std::optional<CalibSource> calib;
  if (!o.calib.empty()) calib.emplace(o.calib);
  const auto files = load_labels(o.labels, stems, calib ? &*calib : nullptr, o.jobs);
  std::vector<std::vector<Box3D>> frames;
  for (const auto& f : files) frames.push_back(f.boxes3d());
  const DatasetStats s = dataset_stats(frames);
  prepare_out(o.out);
  write_text_file(o.out / "stats.json", s.to_json() + "\n");
  write_text_file(o.out / "class_counts.csv", s.class_counts_csv());
  write_text_file(o.out / "labels_per_frame.csv", s.labels_per_frame_csv());
  write_text_file(o.out / "yaw_histogram.csv", s.yaw_histogram_csv());
  Inputs inputs{{{"labels", o.labels}}, {}};
  if (!o.calib.empty()) inputs.paths.emplace_back("calib", o.calib);
  write_manifest(o.out, sub, inputs);
  out << s.total_labels << " labels in " << frames.size() << " frames\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  SceneConfig scene;
  double loc_sigma = 0.0, loc_sigma_z = 0.0;
  fs::path out;
};

int cmd_synth(SynthOptions o, const CLI::App& sub, std::ostream& out) {
  o.scene.teacher_noise.location_sigma = Vec3(o.loc_sigma, o.loc_sigma, o.loc_sigma_z);
  o.scene.validate();
  const Scene scene = generate_scene(o.scene);
  // Independent streams for the two corruptions, derived from the one seed.
  const auto teacher = corrupt_teacher(scene, o.scene.teacher_noise, o.scene.seed + 1);
  const auto dets = corrupt_2d(scene, o.scene.detector_noise, o.scene.seed + 2);
  prepare_out(o.out);
  write_scene(scene, teacher, dets, o.out);
  write_manifest(o.out, sub, {{}, o.scene.seed});
  std::size_t n = 0;
  for (const auto& f : scene.frames) n += f.ground_truth.size();
  out << "wrote " << scene.frames.size() << " frames, " << n << " objects to " << o.out.string()
      << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// adapt

struct AdaptOptions {
  fs::path data, out;
  LoopConfig loop;
  std::vector<std::string> biases;
  int jobs = 1;
};

ToyModel parse_biases(const std::vector<std::string>& entries) {
  static const std::map<std::string, ToyModel::Slot> kSlots = {
      {"dx", ToyModel::kDx}, {"dy", ToyModel::kDy}, {"dz", ToyModel::kDz},
      {"dyaw", ToyModel::kDyaw}, {"dconf", ToyModel::kDconf}};
  ToyModel m;
  for (const std::string& entry : entries) {
    const auto colon = entry.find(':');
    const auto eq = entry.find('=');
    if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
      throw InvalidArgument("--bias expects CLASS:SLOT=VALUE, got '" + entry + "'");
    }
    const auto c = category_from_name(entry.substr(0, colon));
    if (!c || *c == Category::Ignore) throw InvalidArgument("--bias: unknown class in '" + entry + "'");
    const auto slot = kSlots.find(entry.substr(colon + 1, eq - colon - 1));
    if (slot == kSlots.end()) throw InvalidArgument("--bias: unknown slot in '" + entry + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(entry.substr(eq + 1), &used);
      if (used != entry.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidArgument("--bias: bad value in '" + entry + "'");
    }
    m.set(*c, slot->second, v);
  }
  return m;
}

json params_json(const ToyModel& m) {
  static constexpr const char* kSlot[] = {"dx", "dy", "dz", "dyaw", "dconf"};
  json j;
  for (Category c : kAllCategories) {
    json cls;
    for (std::size_t s = 0; s < ToyModel::kParamsPerClass; ++s)
      cls[kSlot[s]] = m.get(c, static_cast<ToyModel::Slot>(s));
    j[std::string(category_name(c))] = cls;
  }
  return j;
}

int cmd_adapt(const AdaptOptions& o, const CLI::App& sub, std::ostream& out) {
  o.loop.validate();
  const ToyModel teacher = parse_biases(o.biases);
  CalibSource calib(o.data / "calib");
  const MatchInputs in = load_match_inputs(o.data / "teacher", o.data / "det2d", calib, o.jobs);
  Scene scene;
  for (std::size_t i = 0; i < in.stems.size(); ++i) {
    scene.frames.push_back({in.stems[i], *in.calib[i], {}});
  }
  AdaptationData data{&scene, in.teacher, in.dets};
  const AdaptationResult r = run_adaptation(data, teacher, o.loop);
  prepare_out(o.out);
  write_text_file(o.out / "history.csv", r.history_csv());
  json j;
  j["steps"] = r.history.size();
  j["initial_loss"] = r.history.front().loss.total;
  j["final_loss"] = r.history.back().loss.total;
  j["student"] = params_json(r.student);
  j["teacher"] = params_json(r.teacher);
  write_text_file(o.out / "result.json", j.dump(2) + "\n");
  write_manifest(o.out, sub, {{{"data", o.data}}, {}});
  out << "loss " << r.history.front().loss.total << " -> " << r.history.back().loss.total << " in "
      << r.history.size() << " steps\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// losses

struct LossOptions {
  fs::path pseudo, pred, calib, out;
  LossWeights weights;
  double l_2d = 0.0, l_dmap = 0.0;
  int jobs = 1;
};

int cmd_losses(const LossOptions& o, const CLI::App& sub, std::ostream& out) {
  o.weights.validate();
  CalibSource calib(o.calib);
  const auto stems = list_stems(o.pseudo);
  const auto pseudo = load_labels(o.pseudo, stems, &calib, o.jobs);
  std::vector<LabelFile> preds;
  if (!o.pred.empty()) {
    require_stems(stems, list_stems(o.pred), o.pred);
    preds = load_labels(o.pred, stems, &calib, o.jobs);
  }
  double pc_sum = 0.0;
  std::size_t pc_used = 0, pc_skipped = 0;
  std::vector<double> l3d;
  std::vector<bool> mask;
  std::vector<std::vector<Box3D>> frames;
  for (std::size_t f = 0; f < stems.size(); ++f) {
    const Calibration& c = calib.get(stems[f]);
    std::vector<Box3D> teacher_3d, targets_3d;
    std::vector<Box2D> targets_2d;
    for (const LabelRecord& r : pseudo[f].records) {
      if (r.box3d) {
        teacher_3d.push_back(*r.box3d);
        if (!r.box2d) throw IoError(o.pseudo.string() + "/" + stems[f] + ".txt: matched line without a bbox");
        targets_2d.push_back(*r.box2d);
      } else {
        l3d.push_back(0.0);
        mask.push_back(false);
      }
    }
    std::vector<Box3D> student = teacher_3d;
    if (!o.pred.empty()) {
      student = preds[f].boxes3d();
      if (student.size() != teacher_3d.size()) {
        throw AlignmentError("frame " + stems[f] + ": " + std::to_string(student.size()) +
                             " predictions for " + std::to_string(teacher_3d.size()) +
                             " matched pseudo-labels");
      }
    }
    for (std::size_t i = 0; i < student.size(); ++i) {
      l3d.push_back(pose_l1(student[i], teacher_3d[i]));
      mask.push_back(true);
    }
    const ImageSize image{static_cast<double>(c.camera.image_width()),
                          static_cast<double>(c.camera.image_height())};
    const auto pc = projective_consistency_loss(student, targets_2d, c.plane, c.camera, o.weights, image);
    pc_sum += pc.value * static_cast<double>(pc.pairs_used);
    pc_used += pc.pairs_used;
    pc_skipped += pc.pairs_skipped;
    frames.push_back(std::move(student));
  }
  const double l_pc = pc_used > 0 ? pc_sum / static_cast<double>(pc_used) : 0.0;
  const CoplanarReport moc = coplanar_loss_report(frames);
  const LossReport r = overall_loss(o.l_2d, l3d, mask, o.l_dmap, l_pc, moc.value, o.weights);
  json j;
  j["l_2d"] = r.l_2d;
  j["l_3d"] = r.l_3d;
  j["l_dmap"] = r.l_dmap;
  j["l_pc"] = r.l_pc;
  j["l_moc"] = r.l_moc;
  j["total"] = r.total;
  j["mask_count"] = r.mask_count;
  j["pc_pairs"] = pc_used;
  j["pc_skipped"] = pc_skipped;
  j["coplanar_active_frames"] = moc.active_frames;
  prepare_out(o.out);
  write_text_file(o.out / "losses.json", j.dump(2) + "\n");
  Inputs inputs{{{"pseudo", o.pseudo}, {"calib", o.calib}}, {}};
  if (!o.pred.empty()) inputs.paths.emplace_back("pred", o.pred);
  write_manifest(o.out, sub, inputs);
  out << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Roadside monocular 3D pseudo-labeling and evaluation tools", "sim2road"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style configuration file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_version_flag("--version", SIM2ROAD_VERSION);
  int jobs = 1;
  app.add_option("-j,--jobs", jobs, "Worker threads for per-frame work")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  MatchOptions match;
  auto* match_cmd = app.add_subcommand("match", "Fuse teacher 3D boxes with 2D detections");
  match_cmd->add_option("--teacher", match.teacher, "Directory of teacher KITTI labels")->required();
  match_cmd->add_option("--det2d", match.det2d, "Directory of 2D detection labels")->required();
  match_cmd->add_option("--calib", match.calib, "Calibration file or per-frame directory")->required();
  match_cmd->add_option("--out", match.out, "Output directory")->required();
  add_match_flags(match_cmd, match.weights);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate 3D detections against ground truth");
  eval_cmd->add_option("--dets", eval.dets, "Directory of detections")->required();
  eval_cmd->add_option("--gt", eval.gt, "Directory of ground-truth labels")->required();
  eval_cmd->add_option("--calib", eval.calib, "Calibration file or per-frame directory")->required();
  eval_cmd->add_option("--out", eval.out, "Output directory")->required();
  add_eval_flags(eval_cmd, eval.eval, eval.ap_mode);

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate pseudo-labels over a threshold range");
  sweep_cmd->add_option("--teacher", sweep.match.teacher)->required();
  sweep_cmd->add_option("--det2d", sweep.match.det2d)->required();
  sweep_cmd->add_option("--gt", sweep.gt)->required();
  sweep_cmd->add_option("--calib", sweep.match.calib)->required();
  sweep_cmd->add_option("--out", sweep.match.out)->required();
  sweep_cmd->add_option("--param", sweep.param, "Swept parameter")->capture_default_str();
  sweep_cmd->add_option("--from", sweep.from)->capture_default_str();
  sweep_cmd->add_option("--to", sweep.to)->capture_default_str();
  sweep_cmd->add_option("--steps", sweep.steps)->capture_default_str();
  add_match_flags(sweep_cmd, sweep.match.weights);
  add_eval_flags(sweep_cmd, sweep.eval, sweep.ap_mode);

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Class, density and orientation statistics");
  stats_cmd->add_option("--labels", stats.labels)->required();
  stats_cmd->add_option("--calib", stats.calib, "Needed when labels carry 3D fields");
  stats_cmd->add_option("--out", stats.out)->required();

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic roadside dataset");
  auto& sc = synth.scene;
  synth_cmd->add_option("--seed", sc.seed)->capture_default_str();
  synth_cmd->add_option("--frames", sc.n_frames)->capture_default_str();
  synth_cmd->add_option("--min-objects", sc.min_objects)->capture_default_str();
  synth_cmd->add_option("--max-objects", sc.max_objects)->capture_default_str();
  synth_cmd->add_option("--loc-sigma", synth.loc_sigma, "Teacher x/y noise, meters")->capture_default_str();
  synth_cmd->add_option("--loc-sigma-z", synth.loc_sigma_z)->capture_default_str();
  synth_cmd->add_option("--yaw-sigma", sc.teacher_noise.yaw_sigma)->capture_default_str();
  synth_cmd->add_option("--size-sigma", sc.teacher_noise.size_sigma)->capture_default_str();
  synth_cmd->add_option("--drop-3d", sc.teacher_noise.drop_rate)->capture_default_str();
  synth_cmd->add_option("--fp-3d", sc.teacher_noise.false_positive_rate)->capture_default_str();
  synth_cmd->add_option("--jitter", sc.detector_noise.jitter_sigma)->capture_default_str();
  synth_cmd->add_option("--drop-2d", sc.detector_noise.drop_rate)->capture_default_str();
  synth_cmd->add_option("--fp-2d", sc.detector_noise.false_positive_rate)->capture_default_str();
  synth_cmd->add_option("--class-flip", sc.detector_noise.class_flip)->capture_default_str();
  synth_cmd->add_option("--out", synth.out)->required();

  AdaptOptions adapt;
  auto* adapt_cmd = app.add_subcommand("adapt", "Run the teacher-student adaptation loop");
  adapt_cmd->add_option("--data", adapt.data, "Directory with calib/, teacher/ and det2d/")->required();
  adapt_cmd->add_option("--out", adapt.out)->required();
  adapt_cmd->add_option("--steps", adapt.loop.steps)->capture_default_str();
  adapt_cmd->add_option("--lr", adapt.loop.learning_rate)->capture_default_str();
  adapt_cmd->add_option("--fd-epsilon", adapt.loop.fd_epsilon)->capture_default_str();
  adapt_cmd->add_option("--momentum", adapt.loop.ema.momentum)->capture_default_str();
  adapt_cmd->add_option("--ema-interval", adapt.loop.ema.update_interval)->capture_default_str();
  adapt_cmd->add_option("--bias", adapt.biases, "Initial teacher bias, CLASS:SLOT=VALUE");
  add_match_flags(adapt_cmd, adapt.loop.match);
  add_loss_flags(adapt_cmd, adapt.loop.loss);

  LossOptions losses;
  auto* losses_cmd = app.add_subcommand("losses", "Loss terms over a pseudo-label set");
  losses_cmd->add_option("--pseudo", losses.pseudo, "Output directory of 'match'")->required();
  losses_cmd->add_option("--pred", losses.pred, "Student predictions, one per matched line");
  losses_cmd->add_option("--calib", losses.calib)->required();
  losses_cmd->add_option("--out", losses.out)->required();
  losses_cmd->add_option("--l2d", losses.l_2d, "Externally computed 2D loss")->capture_default_str();
  losses_cmd->add_option("--ldmap", losses.l_dmap, "Externally computed depth-map loss")
      ->capture_default_str();
  add_loss_flags(losses_cmd, losses.weights);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << SIM2ROAD_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    match.jobs = eval.jobs = sweep.match.jobs = stats.jobs = adapt.jobs = losses.jobs = jobs;
    g_jobs = jobs;
    if (*match_cmd) return cmd_match(match, *match_cmd, out);
    if (*eval_cmd) return cmd_eval(eval, *eval_cmd, out);
    if (*sweep_cmd) return cmd_sweep(sweep, *sweep_cmd, out);
    if (*stats_cmd) return cmd_stats(stats, *stats_cmd, out);
    if (*synth_cmd) return cmd_synth(synth, *synth_cmd, out);
    if (*adapt_cmd) return cmd_adapt(adapt, *adapt_cmd, out);
    if (*losses_cmd) return cmd_losses(losses, *losses_cmd, out);
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    // Parse, calibration, I/O, alignment and generation failures.
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}

}  // namespace sim2road::cli
