// src/pipeline/config.cc

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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "internal.h"
#include "vqtts/base/error.h"
#include "vqtts/pipeline/pipeline.h"

namespace vqtts::pipeline {
namespace fs = std::filesystem;

namespace {

fs::path Resolve(const fs::path &base, const std::string &value) {
  const fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

PipelineConfig PipelineConfig::FromConfig(const Config &c, const fs::path &base_dir) {
  PipelineConfig p;
  p.raw = c;
  const std::int64_t seed = c.GetInt("seed", 1);
  if (seed < 0) Fail(ErrorCode::kBadConfig, "seed must be non-negative");
  p.seed = static_cast<std::uint64_t>(seed);

  p.corpus = Resolve(base_dir, c.GetString("paths.corpus", "."));
  p.manifest = c.Has("paths.manifest") ? Resolve(base_dir, c.GetString("paths.manifest", ""))
                                       : p.corpus / "manifest.tsv";
  p.hyps = c.Has("paths.hyps") ? Resolve(base_dir, c.GetString("paths.hyps", ""))
                               : p.corpus / "hyp.tsv";
  if (c.Has("paths.speakers") && !c.GetString("paths.speakers", "").empty()) {
    p.speakers = Resolve(base_dir, c.GetString("paths.speakers", ""));
  }
  p.work = Resolve(base_dir, c.GetString("paths.work", "work"));
  p.store = c.Has("paths.store") ? Resolve(base_dir, c.GetString("paths.store", ""))
                                 : p.work / "store";
  p.ckpt = c.Has("paths.ckpt") ? Resolve(base_dir, c.GetString("paths.ckpt", ""))
                               : p.work / "ckpt";

  p.features = features::FeatureOptions::FromConfig(c.Section("features"));

  const Config q = c.Section("quantizer");
  p.quantizer.groups = q.GetInt("groups", p.quantizer.groups);
  p.quantizer.codebook_size = q.GetInt("codebook_size", p.quantizer.codebook_size);
  p.quantizer.proj_dim = q.GetInt("proj_dim", p.quantizer.proj_dim);
  p.quantizer.iterations = static_cast<int>(q.GetInt("iterations", p.quantizer.iterations));
  p.quantizer.max_frames = q.GetInt("max_frames", p.quantizer.max_frames);
  p.quantizer.seed = p.StageSeed("quantizer", 1);
  if (p.quantizer.groups == 0 || p.quantizer.codebook_size < 2 || p.quantizer.proj_dim == 0 ||
      p.quantizer.iterations < 1) {
    Fail(ErrorCode::kBadConfig, "quantizer needs groups >= 1, codebook_size >= 2, "
                                "proj_dim >= 1 and iterations >= 1");
  }

  const Config a = c.Section("align");
  p.min_sil_frames = static_cast<int>(a.GetInt("min_sil_frames", p.min_sil_frames));
  p.scorer.em_iterations = static_cast<int>(a.GetInt("em_iterations", p.scorer.em_iterations));
  p.scorer.var_floor = a.GetDouble("var_floor", p.scorer.var_floor);
  p.scorer.relative_var_floor = a.GetDouble("relative_var_floor", p.scorer.relative_var_floor);
  p.scorer.frame_hop_s = p.features.frame_hop_s();
  if (p.min_sil_frames < 1 || p.scorer.em_iterations < 1) {
    Fail(ErrorCode::kBadConfig, "align needs min_sil_frames >= 1 and em_iterations >= 1");
  }

  p.workers = static_cast<int>(c.GetInt("prepare.workers", 1));
  if (p.workers < 1) Fail(ErrorCode::kBadConfig, "prepare.workers must be >= 1");

  const Config s = c.Section("select");
  p.selection.budget1_s = s.GetDouble("budget1_s", p.selection.budget1_s);
  p.selection.budget2_s = s.GetDouble("budget2_s", p.selection.budget2_s);
  p.selection.cer_weight = s.GetDouble("cer_weight", p.selection.cer_weight);
  if (!(p.selection.budget1_s > 0) || !(p.selection.budget2_s > 0) ||
      p.selection.budget2_s > p.selection.budget1_s) {
    Fail(ErrorCode::kBadConfig, "budgets must satisfy 0 < budget2_s <= budget1_s");
  }

  p.sil_threshold = c.GetDouble("synth.sil_threshold", p.sil_threshold);
  if (!(p.sil_threshold >= 0.0 && p.sil_threshold <= 1.0)) {
    Fail(ErrorCode::kBadConfig, "synth.sil_threshold must lie in [0, 1]");
  }
  return p;
}

std::uint64_t PipelineConfig::StageSeed(const std::string &section, std::uint64_t offset) const {
  const std::string key = section + ".seed";
  if (raw.Has(key)) return static_cast<std::uint64_t>(raw.GetInt(key, 0));
  return seed + offset;
}

fs::path PipelineConfig::MarkerPath(const std::string &stage) const {
  if (stage == "prepare") return store / ".prepare_complete";
  return work / "markers" / (stage + ".done");
}

Config LoadConfig(const std::optional<fs::path> &path, fs::path *base_dir) {
  std::optional<fs::path> chosen = path;
  if (!chosen) {
    if (const char *env = std::getenv("VQTTS_CONFIG"); env && *env) chosen = fs::path(env);
  }
  if (!chosen) {
    if (base_dir) *base_dir = fs::current_path();
    return {};
  }
  const fs::path abs = fs::absolute(*chosen);
  if (!fs::exists(abs)) Fail(ErrorCode::kIo, "config file not found: " + abs.string());
  if (base_dir) *base_dir = abs.parent_path();
  return Config::Load(abs);
}

void RunStage(const std::string &stage, const std::function<void()> &fn) {
  try {
    fn();
  } catch (const StageError &) {
    throw;
  } catch (const std::exception &e) {
    throw StageError(stage, e.what());
  }
}

namespace internal {

std::string ReadMarker(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return std::string(Trim(s));
}

void WriteMarker(const fs::path &path, const std::string &hash) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) Fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out << hash << '\n';
    if (!out) Fail(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string ReadFileBytes(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void HashFile(Fnv1a &h, const fs::path &path) { h.Update(ReadFileBytes(path)); }

std::string SectionText(const Config &c, const std::string &section) {
  return "[" + section + "]\n" + c.Section(section).ToString();
}

std::string RequireMarker(const PipelineConfig &cfg, const std::string &stage) {
  const std::string hash = ReadMarker(cfg.MarkerPath(stage));
  if (hash.empty()) {
    Fail(ErrorCode::kInvalidArgument, stage + " has not completed; run it first");
  }
  return hash;
}

fs::path RequireCheckpoint(const fs::path &root, const std::string &stage) {
  const fs::path dir = nn::LatestCheckpoint(root);
  if (dir.empty()) {
    Fail(ErrorCode::kIo, "no checkpoint under " + root.string() + "; run " + stage + " first");
  }
  return dir;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nn::AdamOptions AdamFromConfig(const Config &section, nn::AdamOptions def) {
  def.lr = section.GetDouble("lr", def.lr);
  def.beta1 = section.GetDouble("beta1", def.beta1);
  def.beta2 = section.GetDouble("beta2", def.beta2);
  def.eps = section.GetDouble("eps", def.eps);
  def.clip_norm = section.GetDouble("clip_norm", def.clip_norm);
  if (!(def.lr > 0) || def.beta1 < 0 || def.beta1 >= 1 || def.beta2 < 0 || def.beta2 >= 1) {
    Fail(ErrorCode::kBadConfig, "optimizer needs lr > 0 and betas in [0, 1)");
  }
  return def;
}

}  // namespace internal
}  // namespace vqtts::pipeline
