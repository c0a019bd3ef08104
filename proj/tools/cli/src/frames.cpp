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
#include "frames.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace sim2road::cli {

std::vector<std::string> list_stems(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      stems.push_back(entry.path().stem().string());
    }
  }
  if (stems.empty()) throw IoError("'" + dir.string() + "' contains no .txt label files");
  std::sort(stems.begin(), stems.end());
  return stems;
}

void require_stems(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                   const fs::path& actual_dir) {
  std::vector<std::string> missing;
  std::set_difference(expected.begin(), expected.end(), actual.begin(), actual.end(),
                      std::back_inserter(missing));
  if (missing.empty()) return;
  std::string msg = "frames missing from '" + actual_dir.string() + "':";
  const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg += " " + missing[i];
  if (shown < missing.size()) msg += " ... (" + std::to_string(missing.size()) + " total)";
  throw AlignmentError(msg);
}

CalibSource::CalibSource(fs::path path) : path_(std::move(path)) {
  if (!fs::exists(path_)) throw IoError("calibration '" + path_.string() + "' does not exist");
  per_frame_ = fs::is_directory(path_);
  if (!per_frame_) shared_ = parse_calib(path_);
}

const Calibration& CalibSource::get(const std::string& stem) {
  if (!per_frame_) return *shared_;
  std::lock_guard lock(mu_);
  auto it = cache_.find(stem);
  if (it == cache_.end()) {
    const fs::path file = path_ / (stem + ".txt");
    if (!fs::exists(file)) throw AlignmentError("no calibration for frame " + stem + " in '" + path_.string() + "'");
    it = cache_.emplace(stem, std::make_unique<Calibration>(parse_calib(file))).first;
  }
  return *it->second;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sim2road::cli
