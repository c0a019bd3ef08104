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
#include "sim2road/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "sim2road/geometry.hpp"

namespace sim2road {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  // Avoid "-0.000000" so equal inputs always print identically.
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace

const std::array<std::string_view, 10> kRawClasses = {
    "Car", "Truck", "Trailer", "Van", "Motorcycle",
    "Bus", "Pedestrian", "Bicycle", "Emergency_Vehicle", "Other"};

ClassMap ClassMap::standard() {
  ClassMap m;
  m.set("Car", Category::Car);
  m.set("Van", Category::Car);
  m.set("Truck", Category::BigVehicle);
  m.set("Trailer", Category::BigVehicle);
  m.set("Bus", Category::BigVehicle);
  m.set("Emergency_Vehicle", Category::BigVehicle);
  m.set("Pedestrian", Category::Pedestrian);
  m.set("Bicycle", Category::Cyclist);
  m.set("Motorcycle", Category::Cyclist);
  m.set("Other", Category::Ignore);
  m.set("Cyclist", Category::Cyclist);
  m.set("BigVehicle", Category::BigVehicle);
  m.set("DontCare", Category::Ignore);
  return m;
}

void ClassMap::set(std::string_view raw, Category category) { table_[lower(raw)] = category; }

Category ClassMap::map(std::string_view raw) const {
  const auto it = table_.find(lower(raw));
  return it == table_.end() ? Category::Ignore : it->second;
}

bool KittiLabelLine::is_2d_only() const {
  return dimensions[0] == kSentinel3D && dimensions[1] == kSentinel3D &&
         dimensions[2] == kSentinel3D && location[0] == kSentinel3D &&
         location[1] == kSentinel3D && location[2] == kSentinel3D && rotation_y == kSentinel3D;
}

KittiLabelLine parse_kitti_line(std::string_view text, const std::string& source,
                                std::size_t line_number) {
  const auto fields = split_ws(text);
  if (fields.size() != 15 && fields.size() != 16) {
    throw ParseError(source, line_number,
                     "expected 15 or 16 fields, got " + std::to_string(fields.size()));
  }
  std::array<double, 15> v{};
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto d = to_double(fields[i]);
    if (!d) {
      throw ParseError(source, line_number,
                       "field " + std::to_string(i + 1) + " is not a number: '" +
                           std::string(fields[i]) + "'");
    }
    v[i - 1] = *d;
  }
  KittiLabelLine line;
  line.type = std::string(fields[0]);
  line.truncated = v[0];
  if (v[1] != std::floor(v[1])) throw ParseError(source, line_number, "occluded must be an integer");
  line.occluded = static_cast<int>(v[1]);
  line.alpha = v[2];
  line.bbox = {v[3], v[4], v[5], v[6]};
  line.dimensions = {v[7], v[8], v[9]};
  line.location = {v[10], v[11], v[12]};
  line.rotation_y = v[13];
  if (fields.size() == 16) line.score = v[14];
  if (line.score && !(*line.score >= 0.0 && *line.score <= 1.0)) {
    throw ParseError(source, line_number, "score must lie in [0, 1]");
  }
  return line;
}

std::string format_kitti_line(const KittiLabelLine& l) {
  std::ostringstream os;
  os << l.type << ' ' << fmt("%.2f", l.truncated) << ' ' << l.occluded << ' '
     << fmt("%.9f", l.alpha);
  for (double b : l.bbox) os << ' ' << fmt("%.6f", b);
  for (double d : l.dimensions) os << ' ' << fmt("%.9f", d);
  for (double p : l.location) os << ' ' << fmt("%.9f", p);
  os << ' ' << fmt("%.9f", l.rotation_y);
  if (l.score) os << ' ' << fmt("%.6f", *l.score);
  return os.str();
}

Calibration parse_calib_text(std::string_view text, const std::string& source) {
  std::optional<std::vector<double>> k, e, size, plane;
  std::size_t line_number = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_number;
    if (blank(line)) continue;
    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw CalibrationError(source + ":" + std::to_string(line_number) + ": expected 'key: values'");
    }
    const auto key = split_ws(line.substr(0, colon));
    if (key.size() != 1) {
      throw CalibrationError(source + ":" + std::to_string(line_number) + ": malformed key");
    }
    std::vector<double> values;
    for (std::string_view f : split_ws(line.substr(colon + 1))) {
      const auto d = to_double(f);
      if (!d) {
        throw CalibrationError(source + ":" + std::to_string(line_number) + ": '" +
                               std::string(f) + "' is not a number");
      }
      values.push_back(*d);
    }
    auto expect = [&](std::size_t n) {
      if (values.size() != n) {
        throw CalibrationError(source + ":" + std::to_string(line_number) + ": key '" +
                               std::string(key[0]) + "' needs " + std::to_string(n) +
                               " values, got " + std::to_string(values.size()));
      }
    };
    if (key[0] == "K") {
      expect(9);
      k = values;
    } else if (key[0] == "E") {
      expect(16);
      e = values;
    } else if (key[0] == "image_size") {
      expect(2);
      size = values;
    } else if (key[0] == "plane") {
      expect(4);
      plane = values;
    } else {
      throw CalibrationError(source + ":" + std::to_string(line_number) + ": unknown key '" +
                             std::string(key[0]) + "'");
    }
  }
  if (!k) throw CalibrationError(source + ": missing key 'K'");
  if (!e) throw CalibrationError(source + ": missing key 'E'");

  Mat3 km;
  Mat4 em;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) km(r, c) = (*k)[static_cast<std::size_t>(3 * r + c)];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) em(r, c) = (*e)[static_cast<std::size_t>(4 * r + c)];
  int width = 1920, height = 1080;
  if (size) {
    if ((*size)[0] != std::floor((*size)[0]) || (*size)[1] != std::floor((*size)[1])) {
      throw CalibrationError(source + ": image_size must be integral");
    }
    width = static_cast<int>((*size)[0]);
    height = static_cast<int>((*size)[1]);
  }
  try {
    Calibration calib{CameraModel(km, em, width, height)};
    if (plane) {
      calib.plane = GroundPlane::from_normal(Vec3((*plane)[0], (*plane)[1], (*plane)[2]), (*plane)[3]);
    }
    return calib;
  } catch (const CalibrationError&) {
    throw;
  } catch (const Error& err) {
    throw CalibrationError(source + ": " + err.what());
  }
}

Calibration parse_calib(const std::filesystem::path& path) {
  return parse_calib_text(read_text_file(path), path.string());
}

std::string format_calib(const Calibration& calib) {
  std::ostringstream os;
  const auto& cam = calib.camera;
  os << "K:";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) os << ' ' << fmt("%.17g", cam.intrinsics()(r, c));
  os << "\nE:";
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) os << ' ' << fmt("%.17g", cam.extrinsics()(r, c));
  os << "\nimage_size: " << cam.image_width() << ' ' << cam.image_height() << "\nplane:";
  for (int i = 0; i < 3; ++i) os << ' ' << fmt("%.17g", calib.plane.normal(i));
  os << ' ' << fmt("%.17g", calib.plane.offset) << '\n';
  return os.str();
}

void write_calib(const Calibration& calib, const std::filesystem::path& path) {
  write_text_file(path, format_calib(calib));
}

double world_yaw_to_kitti(double yaw, const CameraModel& cam) {
  const Vec3 dir = cam.rotation() * Vec3(std::cos(yaw), std::sin(yaw), 0.0);
  return wrap_angle(std::atan2(-dir.z(), dir.x()));
}

double kitti_yaw_to_world(double rotation_y, const CameraModel& cam) {
  // Find the horizontal world direction whose camera image has heading
  // rotation_y in the camera x-z plane.
  const Mat3 r = cam.rotation();
  const double s = std::sin(rotation_y), c = std::cos(rotation_y);
  const double a0 = r(0, 0) * s + r(2, 0) * c;
  const double a1 = r(0, 1) * s + r(2, 1) * c;
  if (std::hypot(a0, a1) < 1e-12) {
    throw CalibrationError("camera optical axis is vertical; KITTI yaw is undefined");
  }
  Eigen::Vector2d dir(a1, -a0);
  const Vec3 cam_dir = r * Vec3(dir.x(), dir.y(), 0.0);
  if (cam_dir.x() * c - cam_dir.z() * s < 0.0) dir = -dir;
  return wrap_angle(std::atan2(dir.y(), dir.x()));
}

Box3D kitti_to_box(const KittiLabelLine& line, Category label, const CameraModel& cam) {
  Box3D box;
  box.label = label;
  box.height = line.dimensions[0];
  box.width = line.dimensions[1];
  box.length = line.dimensions[2];
  box.location = cam.camera_to_world(Vec3(line.location[0], line.location[1], line.location[2]));
  box.yaw = kitti_yaw_to_world(line.rotation_y, cam);
  box.confidence = line.score.value_or(1.0);
  return box;
}

KittiLabelLine box_to_kitti(const Box3D& box, const CameraModel& cam) {
  KittiLabelLine line;
  line.type = std::string(category_name(box.label));
  line.dimensions = {box.height, box.width, box.length};
  const Vec3 pc = cam.world_to_camera(box.location);
  line.location = {pc.x(), pc.y(), pc.z()};
  line.rotation_y = world_yaw_to_kitti(box.yaw, cam);
  line.alpha = wrap_angle(line.rotation_y - std::atan2(pc.x(), pc.z()));
  line.score = box.confidence;
  return line;
}

Category LabelRecord::label() const {
  if (box3d) return box3d->label;
  if (box2d) return box2d->label();
  return Category::Ignore;
}

double LabelRecord::confidence() const {
  if (box3d) return box3d->confidence;
  if (box2d) return box2d->confidence();
  return 1.0;
}

std::vector<Box3D> LabelFile::boxes3d() const {
  std::vector<Box3D> out;
  for (const auto& r : records)
    if (r.box3d) out.push_back(*r.box3d);
  return out;
}

std::vector<Box2D> LabelFile::boxes2d() const {
  std::vector<Box2D> out;
  for (const auto& r : records)
    if (r.box2d) out.push_back(*r.box2d);
  return out;
}

LabelFile parse_label_text(std::string_view text, const ClassMap& class_map,
                           const std::optional<Calibration>& calib, const std::string& source) {
  LabelFile out;
  std::size_t line_number = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_number;
    if (blank(raw)) continue;
    const KittiLabelLine line = parse_kitti_line(raw, source, line_number);
    const Category label = class_map.map(line.type);
    if (label == Category::Ignore) {
      ++out.ignored;
      continue;
    }
    LabelRecord rec;
    rec.type = line.type;
    rec.has_score = line.score.has_value();
    rec.truncated = line.truncated;
    rec.occluded = line.occluded;
    const double conf = line.score.value_or(1.0);
    const auto& bb = line.bbox;
    if (bb[0] < bb[2] && bb[1] < bb[3]) rec.box2d = Box2D(label, bb[0], bb[1], bb[2], bb[3], conf);
    if (!line.is_2d_only()) {
      if (!calib) throw CalibrationError(source + ": 3D labels need a calibration");
      try {
        Box3D box = kitti_to_box(line, label, calib->camera);
        box.validate();
        rec.box3d = box;
      } catch (const CalibrationError&) {
        throw;
      } catch (const Error& err) {
        throw ParseError(source, line_number, err.what());
      }
    } else if (!rec.box2d) {
      throw ParseError(source, line_number, "2D-only line without a valid bbox");
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

LabelFile parse_label_file(const std::filesystem::path& path, const ClassMap& class_map,
                           const std::optional<Calibration>& calib) {
  return parse_label_text(read_text_file(path), class_map, calib, path.string());
}

std::string format_label_text(const std::vector<LabelRecord>& records, const Calibration& calib) {
  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const LabelRecord& rec = records[i];
    if (rec.label() == Category::Ignore) {
      throw InvalidArgument("write_label_file: record " + std::to_string(i) +
                            " has class Ignore and cannot be written");
    }
    KittiLabelLine line;
    if (rec.box3d) {
      rec.box3d->validate();
      line = box_to_kitti(*rec.box3d, calib.camera);
    } else {
      line.type = std::string(category_name(rec.label()));
      line.dimensions = {kSentinel3D, kSentinel3D, kSentinel3D};
      line.location = {kSentinel3D, kSentinel3D, kSentinel3D};
      line.rotation_y = kSentinel3D;
      line.alpha = kSentinel3D;
    }
    if (!rec.type.empty()) line.type = rec.type;
    line.truncated = rec.truncated;
    line.occluded = rec.occluded;
    if (rec.box2d) {
      line.bbox = {rec.box2d->x_min(), rec.box2d->y_min(), rec.box2d->x_max(), rec.box2d->y_max()};
    } else if (rec.box3d && in_front_of_camera(*rec.box3d, calib.plane, calib.camera)) {
      const Box2D p = projected_aabb(*rec.box3d, calib.plane, calib.camera);
      line.bbox = {p.x_min(), p.y_min(), p.x_max(), p.y_max()};
    }
    if (rec.has_score) {
      line.score = rec.confidence();
    } else {
      line.score.reset();
    }
    out += format_kitti_line(line);
    out += '\n';
  }
  return out;
}

void write_label_file(const std::vector<LabelRecord>& records, const Calibration& calib,
                      const std::filesystem::path& path) {
  write_text_file(path, format_label_text(records, calib));
}

std::size_t yaw_bin(double yaw) {
  const double w = wrap_angle(yaw);
  const auto bin = static_cast<std::size_t>(
      std::floor((w + kPi) / (2.0 * kPi) * static_cast<double>(kYawBins)));
  return std::min(bin, kYawBins - 1);
}

DatasetStats dataset_stats(const std::vector<std::vector<Box3D>>& frames) {
  DatasetStats s;
  for (const auto& frame : frames) {
    ++s.labels_per_frame[frame.size()];
    for (const Box3D& b : frame) {
      ++s.class_counts[std::string(category_name(b.label))];
      ++s.yaw_histogram[yaw_bin(b.yaw)];
      ++s.total_labels;
    }
  }
  return s;
}

std::string DatasetStats::to_json() const {
  nlohmann::ordered_json j;
  j["class_counts"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : class_counts) j["class_counts"][k] = v;
  j["labels_per_frame"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : labels_per_frame) j["labels_per_frame"][std::to_string(k)] = v;
  j["yaw_histogram"] = {{"bins", kYawBins},
                        {"range", {-kPi, kPi}},
                        {"counts", std::vector<std::size_t>(yaw_histogram.begin(), yaw_histogram.end())}};
  j["total_labels"] = total_labels;
  return j.dump(2) + "\n";
}

std::string DatasetStats::class_counts_csv() const {
  std::string out = "class,count\n";
  for (const auto& [k, v] : class_counts) out += k + "," + std::to_string(v) + "\n";
  return out;
}

std::string DatasetStats::labels_per_frame_csv() const {
  std::string out = "labels,frames\n";
  for (const auto& [k, v] : labels_per_frame) {
    out += std::to_string(k) + "," + std::to_string(v) + "\n";
  }
  return out;
}

std::string DatasetStats::yaw_histogram_csv() const {
  std::string out = "bin,yaw_min,yaw_max,count\n";
  const double width = 2.0 * kPi / static_cast<double>(kYawBins);
  for (std::size_t i = 0; i < kYawBins; ++i) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%zu\n", i, -kPi + width * static_cast<double>(i),
                  -kPi + width * static_cast<double>(i + 1), yaw_histogram[i]);
    out += buf;
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace sim2road
