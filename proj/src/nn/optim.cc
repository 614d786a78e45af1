// src/nn/optim.cc

// Copyright 2026  The vqtts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "vqtts/nn/optim.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vqtts/base/error.h"
#include "vqtts/base/text.h"

namespace vqtts::nn {
namespace fs = std::filesystem;

namespace {

constexpr char kParamMagic[4] = {'V', 'Q', 'C', 'K'};
constexpr char kOptimMagic[4] = {'V', 'Q', 'O', 'P'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void Pod(const T &v) {
    Raw(&v, sizeof(T));
  }
  void Raw(const void *p, std::size_t n) {
    const auto *c = static_cast<const char *>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  void Doubles(const std::vector<double> &v) {
    Raw(v.data(), v.size() * sizeof(double));
  }
  void WriteTo(const fs::path &path) {
    Fnv1a h;
    h.Update(buf_.data(), buf_.size());
    Pod(h.digest());
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) Fail(ErrorCode::kIo, "cannot write " + tmp.string());
      out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
      if (!out) Fail(ErrorCode::kIo, "short write " + tmp.string());
    }
    fs::rename(tmp, path);
  }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(const fs::path &path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) Fail(ErrorCode::kCorruptCheckpoint, "missing " + path.string());
    buf_.assign(std::istreambuf_iterator<char>(in), {});
    if (buf_.size() < sizeof(std::uint64_t)) Corrupt("truncated");
    const std::size_t body = buf_.size() - sizeof(std::uint64_t);
    Fnv1a h;
    h.Update(buf_.data(), body);
    std::uint64_t stored;
    std::memcpy(&stored, buf_.data() + body, sizeof(stored));
    if (stored != h.digest()) Corrupt("checksum mismatch");
    end_ = body;
  }
  template <typename T>
  T Pod() {
    T v;
    Raw(&v, sizeof(T));
    return v;
  }
  void Raw(void *p, std::size_t n) {
    if (pos_ + n > end_) Corrupt("truncated");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  void Doubles(std::vector<double> &v) { Raw(v.data(), v.size() * sizeof(double)); }
  bool done() const { return pos_ == end_; }
  [[noreturn]] void Corrupt(const std::string &why) const {
    Fail(ErrorCode::kCorruptCheckpoint, path_.string() + ": " + why);
  }

 private:
  fs::path path_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

}  // namespace

Adam::Adam(const ParamStore &store, AdamOptions options)
    : store_(&store), options_(options) {
  for (const auto &[name, t] : store.params()) {
    m_.emplace_back(t.size(), 0.0);
    v_.emplace_back(t.size(), 0.0);
  }
}

double Adam::Step() {
  const auto &params = store_->params();
  double sq = 0.0;
  for (const auto &[name, t] : params) {
    for (double g : t.node().grad) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  double clip = 1.0;
  if (options_.clip_norm > 0.0 && norm > options_.clip_norm) {
    clip = options_.clip_norm / norm;
  }
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Node &node = params[p].second.node();
    if (node.grad.size() != node.size()) continue;
    auto &m = m_[p];
    auto &v = v_[p];
    for (std::size_t i = 0; i < node.size(); ++i) {
      const double g = node.grad[i] * clip;
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      node.value[i] -=
          options_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + options_.eps);
    }
  }
  return norm;
}

void Adam::Save(const fs::path &path) const {
  Writer w;
  w.Raw(kOptimMagic, 4);
  w.Pod(kVersion);
  w.Pod(steps_);
  w.Pod(static_cast<std::uint32_t>(m_.size()));
  for (std::size_t p = 0; p < m_.size(); ++p) {
    w.Pod(static_cast<std::uint64_t>(m_[p].size()));
    w.Doubles(m_[p]);
    w.Doubles(v_[p]);
  }
  w.WriteTo(path);
}

void Adam::Load(const fs::path &path) {
  Reader r(path);
  char magic[4];
  r.Raw(magic, 4);
  if (std::memcmp(magic, kOptimMagic, 4) != 0) r.Corrupt("bad magic");
  if (r.Pod<std::uint32_t>() != kVersion) r.Corrupt("unsupported version");
  steps_ = r.Pod<std::int64_t>();
  if (r.Pod<std::uint32_t>() != m_.size()) r.Corrupt("parameter count");
  for (std::size_t p = 0; p < m_.size(); ++p) {
    if (r.Pod<std::uint64_t>() != m_[p].size()) r.Corrupt("moment size");
    r.Doubles(m_[p]);
    r.Doubles(v_[p]);
  }
  if (!r.done()) r.Corrupt("trailing bytes");
}

void SaveCheckpoint(const fs::path &dir, const Config &config,
                    const ParamStore &store, const Adam *optimizer) {
  fs::create_directories(dir);
  config.Save(dir / "config.txt");
  Writer w;
  w.Raw(kParamMagic, 4);
  w.Pod(kVersion);
  w.Pod(static_cast<std::uint32_t>(store.params().size()));
  for (const auto &[name, t] : store.params()) {
    w.Pod(static_cast<std::uint32_t>(name.size()));
    w.Raw(name.data(), name.size());
    w.Pod(static_cast<std::uint32_t>(t.rows()));
    w.Pod(static_cast<std::uint32_t>(t.cols()));
    w.Raw(t.value().data(), t.size() * sizeof(double));
  }
  w.WriteTo(dir / "params.bin");
  if (optimizer != nullptr) optimizer->Save(dir / "optim.bin");
}

Config ReadCheckpointConfig(const fs::path &dir) {
  if (!fs::exists(dir / "config.txt")) {
    Fail(ErrorCode::kCorruptCheckpoint, "no config.txt in " + dir.string());
  }
  try {
    return Config::Load(dir / "config.txt");
  } catch (const Error &e) {
    Fail(ErrorCode::kCorruptCheckpoint, e.what());
  }
}

void LoadCheckpointParams(const fs::path &dir, ParamStore &store,
                          Adam *optimizer) {
  Reader r(dir / "params.bin");
  char magic[4];
  r.Raw(magic, 4);
  if (std::memcmp(magic, kParamMagic, 4) != 0) r.Corrupt("bad magic");
  if (r.Pod<std::uint32_t>() != kVersion) r.Corrupt("unsupported version");
  const auto count = r.Pod<std::uint32_t>();
  if (count != store.params().size()) r.Corrupt("parameter count differs");
  for (const auto &[name, t] : store.params()) {
    const auto len = r.Pod<std::uint32_t>();
    std::string stored(len, '\0');
    r.Raw(stored.data(), len);
    if (stored != name) r.Corrupt("expected " + name + ", found " + stored);
    const auto rows = r.Pod<std::uint32_t>();
    const auto cols = r.Pod<std::uint32_t>();
    if (rows != t.rows() || cols != t.cols()) r.Corrupt("shape of " + name);
    std::vector<double> values(t.size());
    r.Doubles(values);
    Tensor dst = t;
    std::copy(values.begin(), values.end(), dst.mutable_value().begin());
  }
  if (!r.done()) r.Corrupt("trailing bytes");
  if (optimizer != nullptr && fs::exists(dir / "optim.bin")) {
    optimizer->Load(dir / "optim.bin");
  }
}

std::int64_t CheckpointStep(const fs::path &dir) {
  const std::string name = dir.filename().string();
  if (name.rfind("step", 0) != 0) return -1;
  try {
    return std::stoll(name.substr(4));
  } catch (const std::exception &) {
    return -1;
  }
}

fs::path LatestCheckpoint(const fs::path &root) {
  fs::path best;
  std::int64_t best_step = -1;
  if (!fs::exists(root)) return best;
  for (const auto &entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::int64_t step = CheckpointStep(entry.path());
    if (step > best_step) {
      best_step = step;
      best = entry.path();
    }
  }
  return best;
}

}  // namespace vqtts::nn
