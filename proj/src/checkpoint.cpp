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

#include "edgenet/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace edgenet {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Checkpoint::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta)
    if (k == key) {
      v = value;
      return;
    }
  meta.emplace_back(key, value);
}

std::optional<std::string> Checkpoint::get_meta(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

const Matrix* Checkpoint::find(const std::string& name) const {
  for (const auto& [k, m] : tensors)
    if (k == name) return &m;
  return nullptr;
}

void Checkpoint::put(const std::string& name, const Matrix& m) {
  for (auto& [k, v] : tensors)
    if (k == name) {
      v = m;
      return;
    }
  tensors.emplace_back(name, m);
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    os << "edgenet-checkpoint " << kCheckpointVersion << "\n";
    for (const auto& [k, v] : ckpt.meta) {
      if (k.find_first_of(" \t\n") != std::string::npos || v.find('\n') != std::string::npos)
        throw std::invalid_argument("checkpoint meta key/value contains whitespace: " + k);
      os << "meta " << k << " " << v << "\n";
    }
    for (const auto& [name, m] : ckpt.tensors) {
      os << "tensor " << name << " " << m.rows() << " " << m.cols() << "\n";
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (i) os << ' ';
        os << format_double(m.data()[i]);
      }
      os << "\n";
    }
    os << "end\n";
    if (!os) throw std::runtime_error("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  Checkpoint ckpt;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
  };
  if (!std::getline(is, line)) fail("empty file");
  ++lineno;
  {
    std::istringstream hs(line);
    std::string magic;
    int version = 0;
    if (!(hs >> magic >> version) || magic != "edgenet-checkpoint") fail("not a checkpoint");
    if (version != kCheckpointVersion)
      fail("unsupported checkpoint version " + std::to_string(version));
  }
  bool ended = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line == "end") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "meta") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value[0] == ' ') value.erase(0, 1);
      ckpt.meta.emplace_back(key, value);
    } else if (kind == "tensor") {
      std::string name;
      Eigen::Index rows = -1, cols = -1;
      if (!(ls >> name >> rows >> cols) || rows < 0 || cols < 0) fail("bad tensor header");
      if (!std::getline(is, line)) fail("missing values for tensor " + name);
      ++lineno;
      Matrix m(rows, cols);
      const char* p = line.data();
      const char* end = line.data() + line.size();
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        while (p < end && *p == ' ') ++p;
        double v = 0.0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc()) fail("tensor " + name + ": expected " +
                                    std::to_string(m.size()) + " values");
        m.data()[i] = v;
        p = next;
      }
      while (p < end && *p == ' ') ++p;
      if (p != end) fail("tensor " + name + ": trailing data");
      ckpt.tensors.emplace_back(name, std::move(m));
    } else {
      fail("unknown record '" + kind + "'");
    }
  }
  if (!ended) fail("truncated checkpoint (missing 'end')");
  return ckpt;
}

namespace {

const char* kDimKeys[] = {"dx", "dy", "de", "dh", "dc", "layers", "heads", "ff", "da", "dm"};

int* dim_field(EdgeNetConfig& c, std::string_view key) {
  if (key == "dx") return &c.encoder.dx;
  if (key == "dy") return &c.encoder.dy;
  if (key == "de") return &c.encoder.de;
  if (key == "dh") return &c.encoder.dh;
  if (key == "dc") return &c.encoder.dc;
  if (key == "layers") return &c.encoder.layers;
  if (key == "heads") return &c.encoder.heads;
  if (key == "ff") return &c.encoder.ff;
  if (key == "da") return &c.decoder.da;
  if (key == "dm") return &c.decoder.dm;
  return nullptr;
}

}  // namespace

void store_params(Checkpoint& ckpt, EdgeNetParams& params) {
  EdgeNetConfig cfg = params.cfg;
  for (const char* key : kDimKeys)
    ckpt.set_meta(std::string("model.") + key, std::to_string(*dim_field(cfg, key)));
  params.visit([&](const std::string& name, ng::Tensor& t) { ckpt.put("param." + name, t.value); });
}

EdgeNetParams load_params(const Checkpoint& ckpt) {
  EdgeNetConfig cfg;
  for (const char* key : kDimKeys) {
    auto v = ckpt.get_meta(std::string("model.") + key);
    if (!v) throw FormatError(std::string("checkpoint lacks model.") + key);
    *dim_field(cfg, key) = std::stoi(*v);
  }
  EdgeNetParams params(cfg, 0);
  params.visit([&](const std::string& name, ng::Tensor& t) {
    const Matrix* m = ckpt.find("param." + name);
    if (m == nullptr) throw FormatError("checkpoint lacks parameter " + name);
    if (m->rows() != t.rows() || m->cols() != t.cols())
      throw FormatError("parameter " + name + " has the wrong shape");
    t.value = *m;
  });
  return params;
}

}  // namespace edgenet
