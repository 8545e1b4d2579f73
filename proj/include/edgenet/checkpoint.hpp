// Copyright 2026 The EdgeNet Lab Authors.
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

// Versioned text checkpoint container.
//
//   edgenet-checkpoint 1
//   meta <key> <value...>
//   tensor <name> <rows> <cols>
//   <rows*cols row-major values, %.17g, space separated>
//   end
//
// Writes go to "<path>.tmp" and are renamed into place, so an interrupted
// writer never leaves a truncated checkpoint behind.

#pragma once

#include "edgenet/decoder.hpp"
#include "edgenet/numgrad.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace edgenet {

inline constexpr int kCheckpointVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::pair<std::string, Matrix>> tensors;

  void set_meta(const std::string& key, const std::string& value);
  std::optional<std::string> get_meta(const std::string& key) const;
  const Matrix* find(const std::string& name) const;
  void put(const std::string& name, const Matrix& m);
};

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Model config goes into meta, every parameter into a "param.<name>" tensor.
void store_params(Checkpoint& ckpt, EdgeNetParams& params);
EdgeNetParams load_params(const Checkpoint& ckpt);

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace edgenet
