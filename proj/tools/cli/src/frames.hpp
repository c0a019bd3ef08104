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
// Frame discovery and per-frame parallelism shared by the commands.
#pragma once

#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sim2road/errors.hpp"
#include "sim2road/io.hpp"

namespace sim2road::cli {

namespace fs = std::filesystem;

/// Inputs that do not line up across directories.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Sorted stems of the *.txt files in `dir`. Throws IoError when `dir` is
/// missing or holds no label files.
std::vector<std::string> list_stems(const fs::path& dir);

/// Throws AlignmentError listing the stems of `expected` absent from
/// `actual`.
void require_stems(const std::vector<std::string>& expected, const std::vector<std::string>& actual,
                   const fs::path& actual_dir);

/// A single calibration file shared by every frame, or a directory holding
/// <stem>.txt per frame.
class CalibSource {
 public:
  explicit CalibSource(fs::path path);
  const Calibration& get(const std::string& stem);

 private:
  fs::path path_;
  bool per_frame_;
  std::optional<Calibration> shared_;
  std::map<std::string, std::unique_ptr<Calibration>> cache_;
  std::mutex mu_;
};

/// Runs fn(0..n-1) on up to `jobs` threads and rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace sim2road::cli
