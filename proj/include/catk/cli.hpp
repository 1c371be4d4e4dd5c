// Copyright 2026 The CATK Authors
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

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "catk/attribute_combiner.hpp"
#include "catk/attribute_discriminator.hpp"
#include "catk/attribute_parser.hpp"
#include "catk/contrastive_attention.hpp"
#include "catk/embedding.hpp"
#include "catk/error.hpp"
#include "catk/metrics.hpp"
#include "catk/objectives.hpp"
#include "catk/rng.hpp"
#include "catk/tensor.hpp"
#include "catk/tensor_io.hpp"

// Command-line surface: file ingestion, subcommand dispatch, JSON/JSONL
// emission, and the finite-difference gradient-check harness. Results go
// to standard output, diagnostics to standard error. Exit codes: 0 on
// success, 1 on validation errors, 2 on I/O errors.

namespace catk::cli {

struct Config {
  std::size_t embedding_dim = 32;
  ExtractorKind extractor = ExtractorKind::Identity;
  LossWeights weights{};
  std::uint64_t seed = 0;
  bool nce_standard = false;
  std::string lexicon_path;
};

inline ExtractorKind extractor_from_string(const std::string& name) {
  if (name == "identity") return ExtractorKind::Identity;
  if (name == "avgpool") return ExtractorKind::AveragePool;
  if (name == "projection") return ExtractorKind::SeededProjection;
  throw InvalidInput("unknown extractor kind: " + name);
}

namespace detail {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
  const std::string text = slurp_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(path, e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path, "cannot open for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.flush();
  if (!f.good()) throw IoError(path, "write failure");
}

inline LossWeights weights_from_json(const json& j) {
  LossWeights w;
  if (j.contains("lambda1")) w.lambda1 = j.at("lambda1").get<double>();
  if (j.contains("lambda2")) w.lambda2 = j.at("lambda2").get<double>();
  if (j.contains("lambda3")) w.lambda3 = j.at("lambda3").get<double>();
  if (j.contains("lambda4")) w.lambda4 = j.at("lambda4").get<double>();
  if (j.contains("gamma")) w.gamma = j.at("gamma").get<double>();
  w.validate();
  return w;
}

inline AdversarialScores scores_from_json(const json& j) {
  AdversarialScores s;
  s.d_fake_uncond = j.at("d_fake_uncond").get<double>();
  s.d_fake_cond = j.at("d_fake_cond").get<double>();
  s.d_real_uncond = j.at("d_real_uncond").get<double>();
  s.d_real_cond = j.at("d_real_cond").get<double>();
  s.validate();
  return s;
}

inline json tensor_rows(const Tensor& t) {
  const std::size_t cols = t.rank() == 2 ? t.shape()[1] : t.size();
  const std::size_t rows = t.size() / cols;
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(t[r * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

inline Tensor flat_vector(Tensor t) { return Tensor::vector(t.data()); }

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Elementwise |analytic - numeric| / max(|analytic|, |numeric|, 1e-3),
/// maximized over elements. The floor keeps near-zero components from
/// turning rounding noise into huge ratios.
inline double max_rel_err(const Tensor& analytic, const Tensor& numeric) {
  if (!analytic.same_shape(numeric))
    throw InvalidInput("gradient shapes differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-3});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

struct BatchDir {
  ContrastiveBatch batch;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;
};

/// Reads sextets <i>_v1_pos.catf ... <i>_v_ori2.catf for i = 0, 1, ...
/// plus an optional meta.json holding the image volume {"c","h","w"}
/// (default: c*h*w equals the feature length).
inline BatchDir read_batch_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError(dir, "not a directory");
  BatchDir out;
  for (std::size_t i = 0;; ++i) {
    const std::string stem = dir + "/" + std::to_string(i) + "_";
    if (!fs::exists(stem + "v1_pos.catf")) break;
    out.batch.sextets.push_back(AttendedSextet{
        flat_vector(read_tensor(stem + "v1_pos.catf")),
        flat_vector(read_tensor(stem + "v1_neg.catf")),
        flat_vector(read_tensor(stem + "v2_pos.catf")),
        flat_vector(read_tensor(stem + "v2_neg.catf")),
        flat_vector(read_tensor(stem + "v_ori1.catf")),
        flat_vector(read_tensor(stem + "v_ori2.catf"))});
  }
  if (out.batch.sextets.empty())
    throw InvalidInput("no sextets found in " + dir);
  out.batch.validate();
  out.c = 1;
  out.h = out.batch.sextets.front().dim();
  out.w = 1;
  const std::string meta_path = dir + "/meta.json";
  if (fs::exists(meta_path)) {
    const json meta = read_json_file(meta_path);
    try {
      if (meta.contains("c")) out.c = meta.at("c").get<std::size_t>();
      if (meta.contains("h")) out.h = meta.at("h").get<std::size_t>();
      if (meta.contains("w")) out.w = meta.at("w").get<std::size_t>();
    } catch (const json::exception& e) {
      throw InvalidInput(meta_path + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Attribute> attributes_from_jsonl(const std::string& path,
                                                    std::size_t line_index) {
  const std::string text = slurp_file(path);
  std::istringstream lines(text);
  std::string line;
  std::size_t idx = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (idx++ != line_index) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IoError(path, e.what());
    }
    std::vector<Attribute> attrs;
    try {
      for (const auto& joined : j.at("attributes")) {
        std::istringstream words(joined.get<std::string>());
        Attribute attr;
        std::string word;
        while (words >> word) attr.words.push_back(word);
        if (attr.words.empty())
          throw InvalidInput("empty attribute string in " + path);
        attrs.push_back(std::move(attr));
      }
    } catch (const json::exception& e) {
      throw InvalidInput(path + ": " + e.what());
    }
    return attrs;
  }
  throw InvalidInput("line index " + std::to_string(line_index) +
                     " out of range in " + path);
}

inline std::vector<std::size_t> indices_from_json(const json& j,
                                                  const char* key) {
  std::vector<std::size_t> out;
  for (const auto& v : j.at(key)) out.push_back(v.get<std::size_t>());
  return out;
}

}  // namespace detail

inline Config load_config(const std::string& path) {
  const detail::json j = detail::read_json_file(path);
  Config cfg;
  try {
    if (j.contains("embedding_dim"))
      cfg.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    if (j.contains("extractor"))
      cfg.extractor = extractor_from_string(j.at("extractor").get<std::string>());
    if (j.contains("weights"))
      cfg.weights = detail::weights_from_json(j.at("weights"));
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("nce_standard"))
      cfg.nce_standard = j.at("nce_standard").get<bool>();
    if (j.contains("lexicon"))
      cfg.lexicon_path = j.at("lexicon").get<std::string>();
  } catch (const detail::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  if (cfg.embedding_dim == 0)
    throw InvalidInput("embedding_dim must be at least 1");
  if (!cfg.lexicon_path.empty() && !std::filesystem::exists(cfg.lexicon_path))
    throw IoError(cfg.lexicon_path, "lexicon file not found");
  return cfg;
}

namespace detail {

struct ParseOpts {
  std::string lexicon;
  std::string input;
  bool pretagged = false;
  std::string config;
};

inline void run_parse(const ParseOpts& o, std::ostream& out) {
  std::string lex_path = o.lexicon;
  if (lex_path.empty() && !o.config.empty())
    lex_path = load_config(o.config).lexicon_path;
  std::optional<Lexicon> lex;
  if (!o.pretagged) {
    if (lex_path.empty())
      throw InvalidInput("parse requires --lexicon unless --pretagged is set");
    lex = Lexicon::load(lex_path);
  }
  const std::string text = slurp_file(o.input);
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tagged =
        o.pretagged ? parse_pretagged(line) : pos_tag(tokenize(line), *lex);
    json arr = json::array();
    for (const auto& attr : parse_attributes(tagged)) arr.push_back(attr.joined());
    json obj;
    obj["attributes"] = std::move(arr);
    out << obj.dump() << "\n";
  }
}

struct CombineOpts {
  std::int64_t m = 0;
  std::uint64_t seed = 0;
};

inline void run_combine(const CombineOpts& o, std::ostream& out) {
  if (o.m < 0) throw InvalidInput("attribute count must be non-negative");
  SeededRng rng(o.seed);
  const CombinationSplit split = combine(static_cast<std::size_t>(o.m), rng);
  json j;
  j["c1"] = split.c1;
  j["c2"] = split.c2;
  out << j.dump() << "\n";
}

struct AttentionOpts {
  std::string features;
  std::string s1;
  std::string s2;
  std::string attributes_path;
  std::int64_t line = 0;
  std::string split_path;
  std::int64_t embed_dim = 0;
  std::uint64_t embed_seed = 0;
  bool embed_seed_set = false;
  std::string orig;
  std::string edit1;
  std::string edit2;
  std::string out_batch;
  std::string extractor;
  std::uint64_t proj_seed = 0;
  std::int64_t proj_dim = 0;
  std::string out_spatial;
  std::string out_channel;
  std::string config;
};

inline void run_attention(const AttentionOpts& o, std::ostream& out) {
  Config cfg;
  if (!o.config.empty()) cfg = load_config(o.config);

  const ImageFeatures feats(read_tensor(o.features));

  std::optional<CombinationEmbedding> s1, s2;
  if (!o.s1.empty() || !o.s2.empty()) {
    if (o.s1.empty() || o.s2.empty())
      throw InvalidInput("--s1 and --s2 must be given together");
    s1.emplace(flat_vector(read_tensor(o.s1)));
    s2.emplace(flat_vector(read_tensor(o.s2)));
  } else if (!o.attributes_path.empty() || !o.split_path.empty()) {
    if (o.attributes_path.empty() || o.split_path.empty())
      throw InvalidInput("--attributes and --split must be given together");
    if (o.line < 0) throw InvalidInput("--line must be non-negative");
    const auto attrs = attributes_from_jsonl(o.attributes_path,
                                             static_cast<std::size_t>(o.line));
    const json sj = read_json_file(o.split_path);
    std::vector<std::size_t> c1, c2;
    try {
      c1 = indices_from_json(sj, "c1");
      c2 = indices_from_json(sj, "c2");
    } catch (const json::exception& e) {
      throw InvalidInput(o.split_path + ": " + e.what());
    }
    if (o.embed_dim < 0) throw InvalidInput("--embed-dim must be positive");
    const std::size_t dim = o.embed_dim > 0 ? static_cast<std::size_t>(o.embed_dim)
                                            : cfg.embedding_dim;
    const std::uint64_t seed = o.embed_seed_set ? o.embed_seed : cfg.seed;
    s1.emplace(combination_embedding(attrs, c1, dim, seed), c1);
    s2.emplace(combination_embedding(attrs, c2, dim, seed), c2);
  } else {
    throw InvalidInput("provide --s1/--s2 or --attributes/--split");
  }

  const AttentionMaps maps = cmam(feats, *s1, *s2);
  if (!o.out_spatial.empty()) write_tensor(maps.spatial, o.out_spatial);
  if (!o.out_channel.empty()) write_tensor(maps.channel, o.out_channel);

  json result;
  result["spatial"] = tensor_rows(maps.spatial);
  result["channel"] = tensor_rows(maps.channel);

  const bool want_batch = !o.out_batch.empty() || !o.orig.empty() ||
                          !o.edit1.empty() || !o.edit2.empty();
  if (want_batch) {
    if (o.out_batch.empty() || o.orig.empty() || o.edit1.empty() ||
        o.edit2.empty())
      throw InvalidInput(
          "--orig, --edit1, --edit2 and --out-batch must be given together");
    const Tensor img_orig = read_tensor(o.orig);
    const Tensor img_edit1 = read_tensor(o.edit1);
    const Tensor img_edit2 = read_tensor(o.edit2);

    FeatureExtractor ex;
    const ExtractorKind kind =
        o.extractor.empty() ? cfg.extractor : extractor_from_string(o.extractor);
    switch (kind) {
      case ExtractorKind::Identity:
        ex = FeatureExtractor::identity();
        break;
      case ExtractorKind::AveragePool:
        ex = FeatureExtractor::average_pool();
        break;
      case ExtractorKind::SeededProjection:
        if (o.proj_dim <= 0)
          throw InvalidInput(
              "--proj-dim must be at least 1 for the projection extractor");
        ex = FeatureExtractor::seeded_projection(
            o.proj_seed, static_cast<std::size_t>(o.proj_dim));
        break;
    }

    const AttendedSextet sextet =
        attended_sextet(img_orig, img_edit1, img_edit2, maps, ex);
    std::filesystem::create_directories(o.out_batch);
    write_tensor(sextet.v1_pos, o.out_batch + "/0_v1_pos.catf");
    write_tensor(sextet.v1_neg, o.out_batch + "/0_v1_neg.catf");
    write_tensor(sextet.v2_pos, o.out_batch + "/0_v2_pos.catf");
    write_tensor(sextet.v2_neg, o.out_batch + "/0_v2_neg.catf");
    write_tensor(sextet.v_ori1, o.out_batch + "/0_v_ori1.catf");
    write_tensor(sextet.v_ori2, o.out_batch + "/0_v_ori2.catf");
    json meta;
    meta["c"] = img_orig.shape()[0];
    meta["h"] = img_orig.shape()[1];
    meta["w"] = img_orig.shape()[2];
    write_text_file(o.out_batch + "/meta.json", meta.dump() + "\n");
    result["batch_dir"] = o.out_batch;
  }

  out << result.dump() << "\n";
}

struct LossesOpts {
  std::string batch;
  bool nce_standard = false;
  std::string config;
};

inline void run_losses(const LossesOpts& o, std::ostream& out) {
  bool nce = o.nce_standard;
  if (!o.config.empty()) nce = nce || load_config(o.config).nce_standard;
  const BatchDir b = read_batch_dir(o.batch);
  const double l_diff = contrastive_loss(b.batch, nce);
  double l_per = 0.0;
  for (const auto& s : b.batch.sextets)
    l_per += perceptual_loss(s.v1_neg, s.v2_neg, b.c, b.h, b.w);
  l_per /= static_cast<double>(b.batch.sextets.size());
  json j;
  j["l_diff"] = l_diff;
  j["l_per"] = l_per;
  out << j.dump() << "\n";
}

struct AttrLossOpts {
  std::string features;
  std::string s;
  std::int64_t label = -1;
};

inline void run_attr_loss(const AttrLossOpts& o, std::ostream& out) {
  if (o.label != 0 && o.label != 1)
    throw InvalidInput("--label must be 0 or 1");
  const Tensor features = read_tensor(o.features);
  const Tensor s = flat_vector(read_tensor(o.s));
  const double score = attribute_match_score(features, s);
  const MatchLabel label =
      o.label == 1 ? MatchLabel::kMatch : MatchLabel::kMismatch;
  const double loss = attr_loss({{score, label}});
  json j;
  j["l_attr"] = loss;
  j["score"] = score;
  out << j.dump() << "\n";
}

struct ObjectiveOpts {
  std::string config;
};

inline void run_objective(const ObjectiveOpts& o, std::ostream& out) {
  const json j = read_json_file(o.config);
  json result;
  try {
    const LossWeights w = j.contains("weights")
                              ? weights_from_json(j.at("weights"))
                              : LossWeights{};
    std::vector<AdversarialScores> scores;
    const json& adv = j.at("adversarial");
    if (adv.is_array()) {
      for (const auto& entry : adv) scores.push_back(scores_from_json(entry));
    } else {
      scores.push_back(scores_from_json(adv));
    }

    const double l_diff = j.value("l_diff", 0.0);
    const double l_per = j.value("l_per", 0.0);
    const double l_attr = j.value("l_attr", 0.0);

    double l_damsm = 0.0;
    if (j.contains("damsm")) {
      if (j.contains("l_damsm"))
        throw InvalidInput("provide either l_damsm or damsm, not both");
      const json& dj = j.at("damsm");
      DamsmInputs inputs{
          Tensor::vector(dj.at("r_scores").get<std::vector<double>>()),
          dj.at("matched_index").get<std::size_t>()};
      const double gamma = dj.value("gamma", w.gamma);
      const DamsmResult res = damsm(inputs, gamma);
      l_damsm = res.loss;
      result["damsm_probabilities"] = res.probabilities.data();
    } else {
      l_damsm = j.value("l_damsm", 0.0);
    }

    result["l_damsm"] = l_damsm;
    result["l_g"] = generator_loss(scores, l_diff, l_per, l_damsm, w);
    result["l_d"] = discriminator_loss(scores, l_attr, w);
  } catch (const json::exception& e) {
    throw InvalidInput(o.config + ": " + e.what());
  }
  out << result.dump() << "\n";
}

struct FidOpts {
  std::string a;
  std::string b;
};

inline void run_fid(const FidOpts& o, std::ostream& out) {
  const GaussianStats a = gaussian_stats(read_tensor(o.a));
  const GaussianStats b = gaussian_stats(read_tensor(o.b));
  json j;
  j["fid"] = fid(a, b);
  out << j.dump() << "\n";
}

struct LpipsOpts {
  std::string layers;
};

inline void run_lpips(const LpipsOpts& o, std::ostream& out) {
  namespace fs = std::filesystem;
  const json manifest = read_json_file(o.layers);
  if (!manifest.is_array() || manifest.empty())
    throw InvalidInput(o.layers + ": manifest must be a non-empty array");
  const fs::path base = fs::path(o.layers).parent_path();
  const auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return q.is_absolute() ? q.string() : (base / q).string();
  };
  std::vector<LpipsLayer> layers;
  try {
    for (const auto& entry : manifest) {
      layers.emplace_back(
          read_tensor(resolve(entry.at("v").get<std::string>())),
          read_tensor(resolve(entry.at("vhat").get<std::string>())),
          flat_vector(read_tensor(resolve(entry.at("weights").get<std::string>()))));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(o.layers + ": " + e.what());
  }
  json j;
  j["lpips"] = lpips(layers);
  out << j.dump() << "\n";
}

struct GradcheckOpts {
  std::string target;
  std::string fixture;
  double eps = 1e-5;
  double tol = 1e-4;
  bool nce_standard = false;
  std::string config;
};

inline void run_gradcheck(const GradcheckOpts& o, std::ostream& out) {
  if (!(o.eps > 0.0) || !(o.tol > 0.0))
    throw InvalidInput("--eps and --tol must be positive");
  bool nce = o.nce_standard;
  if (!o.config.empty()) nce = nce || load_config(o.config).nce_standard;

  json checked = json::object();
  double worst = 0.0;
  const auto record = [&](const std::string& name, const Tensor& analytic,
                          const Tensor& numeric) {
    const double err = max_rel_err(analytic, numeric);
    const double prev = checked.contains(name) ? checked[name].get<double>() : 0.0;
    checked[name] = std::max(prev, err);
    worst = std::max(worst, err);
  };

  if (o.target == "l_diff") {
    const ContrastiveBatch batch = read_batch_dir(o.fixture).batch;
    const ContrastiveGradients analytic = contrastive_loss_grad(batch, nce);
    using Role = Tensor AttendedSextet::*;
    const std::pair<const char*, Role> roles[] = {
        {"v1_pos", &AttendedSextet::v1_pos}, {"v1_neg", &AttendedSextet::v1_neg},
        {"v2_pos", &AttendedSextet::v2_pos}, {"v2_neg", &AttendedSextet::v2_neg},
        {"v_ori1", &AttendedSextet::v_ori1}, {"v_ori2", &AttendedSextet::v_ori2}};
    for (std::size_t a = 0; a < batch.sextets.size(); ++a) {
      for (const auto& [name, role] : roles) {
        const Tensor fd = finite_diff_grad(
            [&](const Tensor& t) {
              ContrastiveBatch probe = batch;
              probe.sextets[a].*role = t;
              return contrastive_loss(probe, nce);
            },
            batch.sextets[a].*role, o.eps);
        record(name, analytic.grads[a].*role, fd);
      }
    }
  } else if (o.target == "l_per") {
    const Tensor v1 = flat_vector(read_tensor(o.fixture + "/v1_neg.catf"));
    const Tensor v2 = flat_vector(read_tensor(o.fixture + "/v2_neg.catf"));
    std::size_t c = 1, h = v1.size(), w = 1;
    const std::string meta_path = o.fixture + "/meta.json";
    if (std::filesystem::exists(meta_path)) {
      const json meta = read_json_file(meta_path);
      try {
        if (meta.contains("c")) c = meta.at("c").get<std::size_t>();
        if (meta.contains("h")) h = meta.at("h").get<std::size_t>();
        if (meta.contains("w")) w = meta.at("w").get<std::size_t>();
      } catch (const json::exception& e) {
        throw InvalidInput(meta_path + ": " + e.what());
      }
    }
    const auto [g1, g2] = perceptual_loss_grad(v1, v2, c, h, w);
    record("v1_neg", g1,
           finite_diff_grad(
               [&](const Tensor& t) { return perceptual_loss(t, v2, c, h, w); },
               v1, o.eps));
    record("v2_neg", g2,
           finite_diff_grad(
               [&](const Tensor& t) { return perceptual_loss(v1, t, c, h, w); },
               v2, o.eps));
  } else if (o.target == "l_attr") {
    const Tensor features = read_tensor(o.fixture + "/features.catf");
    const Tensor s = flat_vector(read_tensor(o.fixture + "/s.catf"));
    MatchLabel label = MatchLabel::kMatch;
    const std::string meta_path = o.fixture + "/meta.json";
    if (std::filesystem::exists(meta_path)) {
      const json meta = read_json_file(meta_path);
      try {
        if (meta.contains("label"))
          label = meta.at("label").get<int>() == 1 ? MatchLabel::kMatch
                                                   : MatchLabel::kMismatch;
      } catch (const json::exception& e) {
        throw InvalidInput(meta_path + ": " + e.what());
      }
    }
    const AttrLossGradients analytic = attr_loss_grad(features, s, label);
    const auto value_of = [&](const Tensor& f, const Tensor& emb) {
      return attr_loss({{attribute_match_score(f, emb), label}});
    };
    record("s", analytic.grad_s,
           finite_diff_grad(
               [&](const Tensor& t) { return value_of(features, t); }, s, o.eps));
    record("features", analytic.grad_features,
           finite_diff_grad(
               [&](const Tensor& t) { return value_of(t, s); }, features, o.eps));
  } else {
    throw InvalidInput("unknown gradcheck target: " + o.target);
  }

  json j;
  j["checked"] = std::move(checked);
  j["eps"] = o.eps;
  j["max_rel_err"] = worst;
  j["pass"] = worst < o.tol;
  j["target"] = o.target;
  j["tol"] = o.tol;
  out << j.dump() << "\n";
}

}  // namespace detail

/// Runs one CLI invocation. `args` excludes the program name. Results are
/// written to `out`, diagnostics to `err`; the return value is the process
/// exit code (0 success, 1 validation error, 2 I/O error).
inline int run(const std::vector<std::string>& args, std::ostream& out_stream,
               std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream out;

  CLI::App app{"attribute-driven image editing toolkit"};
  app.name("catk");
  bool report = false;
  app.add_flag("--report", report, "emit a run report on standard error");
  app.require_subcommand(1);

  detail::ParseOpts po;
  CLI::App* parse_cmd =
      app.add_subcommand("parse", "extract attributes from caption sentences");
  parse_cmd->add_option("--lexicon", po.lexicon, "TSV lexicon (word<TAB>TAG)");
  parse_cmd->add_option("--in", po.input, "sentence file, one per line")
      ->required();
  parse_cmd->add_flag("--pretagged", po.pretagged,
                      "input tokens carry word_TAG tags");
  parse_cmd->add_option("--config", po.config, "JSON config for defaults");

  detail::CombineOpts co;
  CLI::App* combine_cmd =
      app.add_subcommand("combine", "draw a random attribute bipartition");
  combine_cmd->add_option("--m", co.m, "number of attributes")->required();
  combine_cmd->add_option("--seed", co.seed, "RNG seed")->required();

  detail::AttentionOpts ao;
  CLI::App* attention_cmd =
      app.add_subcommand("attention", "compute cross-modal attention maps");
  attention_cmd->add_option("--features", ao.features, "image features (d,p)")
      ->required();
  attention_cmd->add_option("--s1", ao.s1, "first combination embedding");
  attention_cmd->add_option("--s2", ao.s2, "second combination embedding");
  attention_cmd->add_option("--attributes", ao.attributes_path,
                            "JSONL output of the parse subcommand");
  attention_cmd->add_option("--line", ao.line, "JSONL line index (default 0)");
  attention_cmd->add_option("--split", ao.split_path,
                            "JSON output of the combine subcommand");
  attention_cmd->add_option("--embed-dim", ao.embed_dim,
                            "embedding dimension for derived embeddings");
  attention_cmd->add_option("--embed-seed", ao.embed_seed,
                            "seed for derived embeddings");
  attention_cmd->add_option("--orig", ao.orig, "original image (c,h,w)");
  attention_cmd->add_option("--edit1", ao.edit1, "first edited image");
  attention_cmd->add_option("--edit2", ao.edit2, "second edited image");
  attention_cmd->add_option("--out-batch", ao.out_batch,
                            "directory for the attended sextet");
  attention_cmd->add_option("--extractor", ao.extractor,
                            "identity|avgpool|projection");
  attention_cmd->add_option("--proj-seed", ao.proj_seed,
                            "projection extractor seed");
  attention_cmd->add_option("--proj-dim", ao.proj_dim,
                            "projection output dimension");
  attention_cmd->add_option("--out-spatial", ao.out_spatial,
                            "write the spatial map to this file");
  attention_cmd->add_option("--out-channel", ao.out_channel,
                            "write the channel map to this file");
  attention_cmd->add_option("--config", ao.config, "JSON config for defaults");

  detail::LossesOpts lo;
  CLI::App* losses_cmd =
      app.add_subcommand("losses", "contrastive and perceptual losses");
  losses_cmd->add_option("--batch", lo.batch, "sextet directory")->required();
  losses_cmd->add_flag("--nce-standard", lo.nce_standard,
                       "include the positive term in the denominator");
  losses_cmd->add_option("--config", lo.config, "JSON config for defaults");

  detail::AttrLossOpts alo;
  CLI::App* attr_cmd =
      app.add_subcommand("attr-loss", "attribute-level discriminator loss");
  attr_cmd->add_option("--features", alo.features, "image features (d,p)")
      ->required();
  attr_cmd->add_option("--s", alo.s, "attribute embedding (d)")->required();
  attr_cmd->add_option("--label", alo.label, "1 = matched, 0 = mismatched")
      ->required();

  detail::ObjectiveOpts oo;
  CLI::App* objective_cmd =
      app.add_subcommand("objective", "compose generator/discriminator losses");
  objective_cmd->add_option("--config", oo.config, "JSON component file")
      ->required();

  detail::FidOpts fo;
  CLI::App* fid_cmd =
      app.add_subcommand("fid", "Fréchet distance between two feature sets");
  fid_cmd->add_option("--a", fo.a, "feature set (n,d)")->required();
  fid_cmd->add_option("--b", fo.b, "feature set (n,d)")->required();

  detail::LpipsOpts lpo;
  CLI::App* lpips_cmd =
      app.add_subcommand("lpips", "perceptual distance over feature layers");
  lpips_cmd->add_option("--layers", lpo.layers, "layer manifest JSON")
      ->required();

  detail::GradcheckOpts go;
  CLI::App* gradcheck_cmd = app.add_subcommand(
      "gradcheck", "analytic gradients vs central finite differences");
  gradcheck_cmd->add_option("--target", go.target, "l_diff|l_per|l_attr")
      ->required();
  gradcheck_cmd->add_option("--fixture", go.fixture, "fixture directory")
      ->required();
  gradcheck_cmd->add_option("--eps", go.eps, "finite-difference step");
  gradcheck_cmd->add_option("--tol", go.tol, "relative error tolerance");
  gradcheck_cmd->add_flag("--nce-standard", go.nce_standard,
                          "include the positive term in the denominator");
  gradcheck_cmd->add_option("--config", go.config, "JSON config for defaults");

  int code = 0;
  std::string selected;
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    ao.embed_seed_set = attention_cmd->count("--embed-seed") > 0;
    if (*parse_cmd) {
      selected = "parse";
      detail::run_parse(po, out);
    } else if (*combine_cmd) {
      selected = "combine";
      detail::run_combine(co, out);
    } else if (*attention_cmd) {
      selected = "attention";
      detail::run_attention(ao, out);
    } else if (*losses_cmd) {
      selected = "losses";
      detail::run_losses(lo, out);
    } else if (*attr_cmd) {
      selected = "attr-loss";
      detail::run_attr_loss(alo, out);
    } else if (*objective_cmd) {
      selected = "objective";
      detail::run_objective(oo, out);
    } else if (*fid_cmd) {
      selected = "fid";
      detail::run_fid(fo, out);
    } else if (*lpips_cmd) {
      selected = "lpips";
      detail::run_lpips(lpo, out);
    } else if (*gradcheck_cmd) {
      selected = "gradcheck";
      detail::run_gradcheck(go, out);
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    code = 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    code = 2;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    code = 1;
  }

  out_stream << out.str();
  if (report) {
    std::string joined;
    for (const auto& a : args) {
      joined += a;
      joined.push_back('\n');
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
    detail::json r;
    r["inputs_digest"] = detail::hex64(fnv1a64(joined));
    r["outputs_digest"] = detail::hex64(fnv1a64(out.str()));
    r["subcommand"] = selected;
    r["wall_ms"] = wall_ms;
    err << r.dump() << "\n";
  }
  return code;
}

}  // namespace catk::cli
