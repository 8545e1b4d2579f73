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

// Synthetic auction logs and their text file format.
//
// File layout (version 1):
//
//   edgenet-log 1 n <N> k <K> dx <dx> dy <dy> count <C> gamma <g_1> ... <g_K>
//   <y_1> ... <y_dy> | <bid> <pctr> <pcvr> <cpc> <x_1> ... <x_dx> | ...   (N groups)
//   ... C record lines ...
//
// Numbers are written with 17 significant digits so a read/write cycle is
// exact.

#pragma once

#include "edgenet/auction.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgenet {

inline constexpr int kLogSchemaVersion = 1;

struct SynthConfig {
  Dims dims;
  double bid_log_mean = 0.0;
  double bid_log_sigma = 0.5;
  double pctr_alpha = 2.0;
  double pctr_beta = 8.0;
  double pcvr_alpha = 2.0;
  double pcvr_beta = 18.0;
  double cpc_min = 1.0;
  double cpc_max = 5.0;
  // Loading of each ad feature on the standardized pctr (even features) or
  // pcvr (odd features); the rest is independent unit noise.
  double correlation = 0.8;
  int count = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct AuctionLog {
  int schema_version = kLogSchemaVersion;
  Dims dims;
  std::vector<double> slot_discounts;
  std::vector<AuctionInstance> instances;

  bool operator==(const AuctionLog&) const = default;
};

class LogParseError : public std::runtime_error {
 public:
  LogParseError(const std::string& msg, int line, const std::string& source = "")
      : std::runtime_error((source.empty() ? "line " : source + ":") + std::to_string(line) +
                           ": " + msg),
        detail_(msg),
        line_(line) {}
  int line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  int line_;
};

AuctionLog generate(const SynthConfig& cfg);

void write_log(const AuctionLog& log, const std::filesystem::path& path);
AuctionLog read_log(const std::filesystem::path& path);

std::string serialize_log(const AuctionLog& log);
AuctionLog parse_log(const std::string& text);

}  // namespace edgenet
