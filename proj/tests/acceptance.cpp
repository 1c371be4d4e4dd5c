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
//
// Acceptance gate: one self-contained check per release criterion, one
// PASS/FAIL line each, nonzero exit if anything fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "catk/attribute_combiner.hpp"
#include "catk/attribute_discriminator.hpp"
#include "catk/attribute_parser.hpp"
#include "catk/cli.hpp"
#include "catk/contrastive_attention.hpp"
#include "catk/embedding.hpp"
#include "catk/metrics.hpp"
#include "catk/objectives.hpp"
#include "catk/rng.hpp"
#include "catk/tensor.hpp"
#include "catk/tensor_io.hpp"
#include "fid_oracle.hpp"
#include "fuzz_sentences.hpp"
#include "test_util.hpp"

namespace {

using catk::Tensor;
using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::string why;

  void expect(bool cond, const std::string& detail) {
    if (!cond && ok) {
      ok = false;
      why = detail;
    }
  }

  void near(double got, double want, double tol, const std::string& what) {
    if (std::abs(got - want) <= tol) return;
    std::ostringstream s;
    s.precision(17);
    s << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(false, s.str());
  }
};

const catk::Lexicon& lexicon() {
  static const catk::Lexicon lex =
      catk::Lexicon::load(testutil::data_file("lexicon.tsv"));
  return lex;
}

std::vector<std::string> parse_joined(const std::string& sentence) {
  const auto attrs =
      catk::parse_attributes(catk::pos_tag(catk::tokenize(sentence), lexicon()));
  std::vector<std::string> out;
  out.reserve(attrs.size());
  for (const auto& a : attrs) out.push_back(a.joined());
  return out;
}

// --- 1: the two reference sentences reproduce exactly, in under a second ---
void check_parser_goldens(Check& c) {
  const auto t0 = Clock::now();
  const auto row1 = parse_joined(
      "a grey bird with webbed feet, a short and blunt orange bill, grey "
      "head and wings and has white eyes, a white stripe behind its eyes "
      "and white belly and breast");
  const std::vector<std::string> want1 = {
      "grey bird",       "webbed feet", "short blunt orange bill",
      "grey head wings", "white eyes",  "white stripe eyes",
      "white belly breast"};
  c.expect(row1 == want1, "stacked-clause sentence parsed wrong");

  const auto row2 =
      parse_joined("the bird is black with a white belly and an orange bill");
  const std::vector<std::string> want2 = {"bird black", "white belly",
                                          "orange bill"};
  c.expect(row2 == want2, "is-with sentence parsed wrong");

  const double secs =
      std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(secs < 1.0, "reference parse took " + std::to_string(secs) + " s");
}

// --- 2: 200 fuzzed sentences keep every structural invariant ---
void check_parser_properties(Check& c) {
  testutil::SentenceFuzzer fuzz(424242);
  for (int i = 0; i < 200 && c.ok; ++i) {
    const std::string sentence = fuzz.next_sentence();
    const auto tagged = catk::pos_tag(catk::tokenize(sentence), lexicon());
    const auto attrs = catk::parse_attributes(tagged);
    const auto report = testutil::SentenceFuzzer::check(tagged, attrs);
    c.expect(report.subsequence, "word order broken for: " + sentence);
    c.expect(report.no_stop_words, "stop word leaked for: " + sentence);
    c.expect(report.no_bare_bird, "bare subject emitted for: " + sentence);
    c.expect(report.comma_bounded, "attribute crossed a comma in: " + sentence);
    c.expect(report.non_empty_attrs, "empty attribute for: " + sentence);
  }
}

// --- 3: random splits at m=4 hit all 7 partitions uniformly ---
void check_combiner_uniformity(Check& c) {
  constexpr std::size_t kDraws = 10000;
  constexpr std::size_t kM = 4;
  std::map<std::string, std::size_t> counts;
  for (std::size_t seed = 0; seed < kDraws; ++seed) {
    catk::SeededRng rng(seed);
    const catk::CombinationSplit split = catk::combine(kM, rng);

    c.expect(!split.c1.empty() && !split.c2.empty(), "empty side drawn");
    std::set<std::size_t> all(split.c1.begin(), split.c1.end());
    for (std::size_t i : split.c2) {
      c.expect(all.insert(i).second, "sides overlap");
    }
    c.expect(all.size() == kM && *all.begin() == 1 && *all.rbegin() == kM,
             "union is not 1..m");
    if (!c.ok) return;

    const catk::CombinationSplit key = catk::canonical(split);
    std::string name;
    for (std::size_t i : key.c1) name += std::to_string(i) + ",";
    ++counts[name];
  }
  c.expect(counts.size() == 7,
           "expected 7 distinct partitions, saw " +
               std::to_string(counts.size()));
  for (const auto& [name, n] : counts) {
    const double freq = static_cast<double>(n) / kDraws;
    c.expect(std::abs(freq - 1.0 / 7.0) <= 0.02,
             "partition {" + name + "} frequency " + std::to_string(freq));
  }
}

// --- 4: attention maps normalize and swap on 100 random fixtures ---
void check_attention_normalization(Check& c) {
  catk::SeededRng rng(20260817);
  for (int k = 0; k < 100 && c.ok; ++k) {
    const std::size_t d = 1 + rng.bounded(32);
    const std::size_t p = 1 + rng.bounded(64);
    const catk::ImageFeatures v(testutil::random_tensor({d, p}, rng));
    const Tensor s1 = testutil::random_unit_vector(d, rng);
    const Tensor s2 = testutil::random_unit_vector(d, rng);
    const catk::AttentionMaps maps =
        catk::cmam(v, catk::CombinationEmbedding(s1),
                   catk::CombinationEmbedding(s2));

    for (std::size_t j = 0; j < p; ++j) {
      const double sum = maps.spatial.at(0, j) + maps.spatial.at(1, j);
      c.expect(std::abs(sum - 1.0) <= 1e-9, "spatial column does not sum to 1");
      c.expect(maps.spatial.at(0, j) > 0.0 && maps.spatial.at(1, j) > 0.0,
               "spatial weight not positive");
    }
    for (std::size_t m = 0; m < d; ++m) {
      const double sum = maps.channel.at(0, m) + maps.channel.at(1, m);
      c.expect(std::abs(sum - 1.0) <= 1e-9, "channel column does not sum to 1");
    }

    const catk::AttentionMaps swapped =
        catk::cmam(v, catk::CombinationEmbedding(s2),
                   catk::CombinationEmbedding(s1));
    for (std::size_t j = 0; j < p; ++j) {
      c.expect(swapped.spatial.at(0, j) == maps.spatial.at(1, j) &&
                   swapped.spatial.at(1, j) == maps.spatial.at(0, j),
               "swap is not an exact spatial row exchange");
    }
    for (std::size_t m = 0; m < d; ++m) {
      c.expect(swapped.channel.at(0, m) == maps.channel.at(1, m) &&
                   swapped.channel.at(1, m) == maps.channel.at(0, m),
               "swap is not an exact channel row exchange");
    }
  }
}

// --- 5: analytic gradients match central differences, 20 fixtures each ---
constexpr double kEps = 1e-5;
constexpr double kTol = 1e-4;

double max_component_err(const Tensor& analytic, const Tensor& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, testutil::rel_err(analytic[i], numeric[i]));
  return worst;
}

void check_contrastive_grads(Check& c, catk::SeededRng& rng) {
  static const std::array<Tensor catk::AttendedSextet::*, 6> roles = {
      &catk::AttendedSextet::v1_pos, &catk::AttendedSextet::v1_neg,
      &catk::AttendedSextet::v2_pos, &catk::AttendedSextet::v2_neg,
      &catk::AttendedSextet::v_ori1, &catk::AttendedSextet::v_ori2};
  for (int k = 0; k < 20 && c.ok; ++k) {
    const bool nce = k % 2 == 1;
    const std::size_t n = 1 + rng.bounded(3);
    const std::size_t dim = 2 + rng.bounded(7);
    catk::ContrastiveBatch batch;
    for (std::size_t i = 0; i < n; ++i)
      batch.sextets.push_back({testutil::random_unit_vector(dim, rng),
                               testutil::random_unit_vector(dim, rng),
                               testutil::random_unit_vector(dim, rng),
                               testutil::random_unit_vector(dim, rng),
                               testutil::random_unit_vector(dim, rng),
                               testutil::random_unit_vector(dim, rng)});
    const catk::ContrastiveGradients analytic =
        catk::contrastive_loss_grad(batch, nce);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto role : roles) {
        const Tensor numeric = catk::finite_diff_grad(
            [&](const Tensor& t) {
              catk::ContrastiveBatch probe = batch;
              probe.sextets[i].*role = t;
              return catk::contrastive_loss(probe, nce);
            },
            batch.sextets[i].*role, kEps);
        const double err = max_component_err(analytic.grads[i].*role, numeric);
        c.expect(err < kTol, "contrastive gradient error " +
                                 std::to_string(err));
      }
      c.expect(catk::l2_norm(analytic.grads[i].v_ori2) == 0.0,
               "unmasked original picked up a gradient");
    }
  }
}

void check_perceptual_grads(Check& c, catk::SeededRng& rng) {
  for (int k = 0; k < 20 && c.ok; ++k) {
    const std::size_t ch = 1 + rng.bounded(2);
    const std::size_t h = 1 + rng.bounded(4);
    const std::size_t w = 1 + rng.bounded(4);
    const Tensor v1 = testutil::random_tensor({ch * h * w}, rng);
    const Tensor v2 = testutil::random_tensor({ch * h * w}, rng);
    const auto [g1, g2] = catk::perceptual_loss_grad(v1, v2, ch, h, w);
    const Tensor n1 = catk::finite_diff_grad(
        [&](const Tensor& t) { return catk::perceptual_loss(t, v2, ch, h, w); },
        v1, kEps);
    const Tensor n2 = catk::finite_diff_grad(
        [&](const Tensor& t) { return catk::perceptual_loss(v1, t, ch, h, w); },
        v2, kEps);
    c.expect(max_component_err(g1, n1) < kTol, "perceptual gradient (left)");
    c.expect(max_component_err(g2, n2) < kTol, "perceptual gradient (right)");
  }
}

void check_attr_grads(Check& c, catk::SeededRng& rng) {
  for (int k = 0; k < 20 && c.ok; ++k) {
    const std::size_t d = 1 + rng.bounded(4);
    const std::size_t p = 1 + rng.bounded(6);
    const Tensor features = testutil::random_tensor({d, p}, rng);
    const Tensor s = testutil::random_unit_vector(d, rng);
    const catk::MatchLabel label =
        k % 2 == 0 ? catk::MatchLabel::kMatch : catk::MatchLabel::kMismatch;
    const catk::AttrLossGradients analytic =
        catk::attr_loss_grad(features, s, label);
    const Tensor ns = catk::finite_diff_grad(
        [&](const Tensor& t) {
          return catk::attr_loss({{catk::attribute_match_score(features, t),
                                   label}});
        },
        s, kEps);
    const Tensor nf = catk::finite_diff_grad(
        [&](const Tensor& t) {
          return catk::attr_loss({{catk::attribute_match_score(t, s), label}});
        },
        features, kEps);
    c.expect(max_component_err(analytic.grad_s, ns) < kTol,
             "attribute gradient w.r.t. embedding");
    c.expect(max_component_err(analytic.grad_features, nf) < kTol,
             "attribute gradient w.r.t. features");
  }
}

void check_gradients(Check& c) {
  const auto t0 = Clock::now();
  catk::SeededRng rng(5);
  check_contrastive_grads(c, rng);
  check_perceptual_grads(c, rng);
  check_attr_grads(c, rng);
  const double secs =
      std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(secs < 30.0, "gradient suite took " + std::to_string(secs) + " s");
}

// --- 6: closed forms of the three component losses ---
void check_loss_closed_forms(Check& c) {
  const Tensor u = Tensor::vector({0.6, 0.8});
  catk::ContrastiveBatch batch;
  for (int i = 0; i < 3; ++i) batch.sextets.push_back({u, u, u, u, u, u});
  c.near(catk::contrastive_loss(batch), 2.0 * std::log(3.0), 1e-9,
         "equal-cosine batch of three");

  const Tensor v = Tensor::vector({1.0, -2.0, 3.0, -4.0});
  c.expect(catk::perceptual_loss(v, v, 1, 2, 2) == 0.0,
           "identical features must cost exactly zero");

  c.near(catk::attr_loss({{0.5, catk::MatchLabel::kMatch}}), std::log(2.0),
         1e-12, "score one half");
}

// --- 7: objective composition at the published operating point ---
void check_objective_composition(Check& c) {
  const catk::LossWeights w;
  const catk::AdversarialScores perfect_g{1.0, 1.0, 1.0, 1.0};
  const catk::AdversarialScores perfect_d{0.0, 0.0, 1.0, 1.0};

  c.near(catk::generator_loss(perfect_g, 1.0, 1.0, 1.0, w), 2.3, 1e-12,
         "generator objective at unit losses");
  c.near(catk::discriminator_loss(perfect_d, 1.0, w), 0.9, 1e-12,
         "discriminator objective at unit attribute loss");

  const double base_g = catk::generator_loss(perfect_g, 1.0, 1.0, 1.0, w);
  c.near(catk::generator_loss(perfect_g, 2.0, 1.0, 1.0, w) - base_g, w.lambda1,
         1e-12, "contrastive weight slope");
  c.near(catk::generator_loss(perfect_g, 1.0, 2.0, 1.0, w) - base_g, w.lambda2,
         1e-12, "perceptual weight slope");
  c.near(catk::generator_loss(perfect_g, 1.0, 1.0, 2.0, w) - base_g, w.lambda3,
         1e-12, "matching weight slope");
  c.near(catk::discriminator_loss(perfect_d, 2.0, w) -
             catk::discriminator_loss(perfect_d, 1.0, w),
         w.lambda4, 1e-12, "attribute weight slope");
}

// --- 8: distribution distance against closed forms and an Eigen oracle ---
void check_fid(Check& c) {
  catk::SeededRng rng(11);

  const catk::GaussianStats self =
      catk::gaussian_stats(testutil::random_tensor({12, 3}, rng));
  const double d_self = catk::fid(self, self);
  c.expect(d_self >= 0.0 && d_self < 1e-8, "self distance not within 1e-8");

  const catk::GaussianStats a1(Tensor::vector({0.0}),
                               Tensor({1, 1}, {2.0}));
  const catk::GaussianStats b1(Tensor::vector({1.0}),
                               Tensor({1, 1}, {2.0}));
  c.near(catk::fid(a1, b1), 1.0, 1e-6, "unit mean shift in one dimension");

  const catk::GaussianStats a2(Tensor::vector({0.0, 0.0}),
                               Tensor({2, 2}, {1.0, 0.0, 0.0, 4.0}));
  const catk::GaussianStats b2(Tensor::vector({1.0, 1.0}),
                               Tensor({2, 2}, {4.0, 0.0, 0.0, 16.0}));
  c.near(catk::fid(a2, b2), 7.0, 1e-6, "diagonal two-dimensional case");

  const catk::GaussianStats sym_a =
      catk::gaussian_stats(testutil::random_tensor({10, 3}, rng));
  const catk::GaussianStats sym_b =
      catk::gaussian_stats(testutil::random_tensor({10, 3}, rng));
  c.near(catk::fid(sym_a, sym_b), catk::fid(sym_b, sym_a), 1e-6, "symmetry");

  {
    const std::size_t n = 16, d = 4;
    const Tensor xa = testutil::random_tensor({n, d}, rng);
    const Tensor xb = testutil::random_tensor({n, d}, rng);
    Eigen::MatrixXd seed_mat(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        seed_mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            rng.symmetric();
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(seed_mat).householderQ();
    const Tensor ra = testutil::from_eigen(testutil::to_eigen(xa) * q);
    const Tensor rb = testutil::from_eigen(testutil::to_eigen(xb) * q);
    const double plain =
        catk::fid(catk::gaussian_stats(xa), catk::gaussian_stats(xb));
    const double rotated =
        catk::fid(catk::gaussian_stats(ra), catk::gaussian_stats(rb));
    c.near(rotated, plain, 1e-6, "orthogonal rotation invariance");
  }

  for (std::size_t d = 1; d <= 3 && c.ok; ++d) {
    for (int k = 0; k < 5; ++k) {
      const Tensor xa = testutil::random_tensor({d + 10, d}, rng);
      const Tensor xb = testutil::random_tensor({d + 10, d}, rng);
      const catk::GaussianStats sa = catk::gaussian_stats(xa);
      const catk::GaussianStats sb = catk::gaussian_stats(xb);
      const double got = catk::fid(sa, sb);
      const double want = testutil::oracle_fid(sa, sb);
      c.near(got, want, 1e-8, "independent oracle at d=" + std::to_string(d));
    }
  }
}

// --- 9: perceptual feature-space distance closed forms ---
void check_lpips(Check& c) {
  const Tensor feat({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
  const Tensor w = Tensor::vector({0.5, 2.0});
  c.expect(catk::lpips({catk::LpipsLayer(feat, feat, w)}) == 0.0,
           "identical stacks must be exactly zero");

  const catk::LpipsLayer crossed(Tensor({2, 1, 1}, {1.0, 0.0}),
                                 Tensor({2, 1, 1}, {0.0, 1.0}),
                                 Tensor::vector({1.0, 1.0}));
  c.near(catk::lpips({crossed}), 2.0, 1e-12, "orthogonal unit features");
}

// --- 10: tensor container round trips and corruption detection ---
void check_tensor_io(Check& c) {
  catk::SeededRng rng(13);
  const std::vector<std::vector<std::size_t>> shapes = {
      {64}, {8, 8}, {4, 4, 4}, {2, 4, 8, 1}};
  testutil::TempDir dir("acceptance_catf");
  for (const auto& shape : shapes) {
    Tensor t = testutil::random_tensor(shape, rng);
    {
      std::vector<double> data = t.data();
      data[0] = -0.0;
      if (data.size() > 2) {
        data[1] = 1e-300;
        data[2] = -std::numeric_limits<double>::max();
      }
      t = Tensor(shape, std::move(data));
    }
    const std::string bytes = catk::encode_catf(t);
    const Tensor back = catk::decode_catf(bytes, "mem");
    c.expect(back.shape() == t.shape() && catk::encode_catf(back) == bytes,
             "in-memory round trip is not bit-exact");

    const std::string path = dir.file("t.catf");
    catk::write_tensor(t, path);
    c.expect(testutil::read_file(path) == bytes,
             "file payload differs from the in-memory encoding");
    const Tensor reread = catk::read_tensor(path);
    c.expect(reread.data() == t.data(), "file round trip is not bit-exact");
  }

  const std::string good = catk::encode_catf(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  const auto expect_offset = [&c](std::string bytes, std::size_t at,
                                  char value, std::size_t want_offset,
                                  const std::string& what) {
    bytes[at] = value;
    try {
      catk::decode_catf(bytes, "mem");
      c.expect(false, what + " was accepted");
    } catch (const catk::IoError& e) {
      c.expect(e.offset() == want_offset,
               what + " reported offset " + std::to_string(e.offset()));
    }
  };
  expect_offset(good, 0, 'X', 0, "bad magic");
  expect_offset(good, 4, 9, 4, "unsupported version");
  expect_offset(good, 8, 0, 8, "zero rank");
  expect_offset(good, 9, 0, 9, "zero dimension");
  try {
    catk::decode_catf(good.substr(0, good.size() - 5), "mem");
    c.expect(false, "truncated payload was accepted");
  } catch (const catk::IoError&) {
  }
}

// --- 11: the CLI pipeline is byte-identical across repeated runs ---
std::string run_pipeline(const std::string& root) {
  namespace fs = std::filesystem;
  std::string transcript;
  const auto run = [&transcript](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = catk::cli::run(args, out, err);
    if (rc != 0)
      throw std::runtime_error("pipeline step failed: " + err.str());
    transcript += out.str();
    return out.str();
  };

  const std::string sentences = root + "/sentences.txt";
  const std::string attrs = root + "/attrs.jsonl";
  const std::string split = root + "/split.json";
  const std::string batch = root + "/batch";

  const std::string parsed = run(
      {"parse", "--lexicon", testutil::data_file("lexicon.tsv"), "--in",
       sentences});
  testutil::write_file(attrs, parsed);

  const std::string split_json = run({"combine", "--m", "3", "--seed", "7"});
  testutil::write_file(split, split_json);

  run({"attention", "--features", root + "/features.catf", "--attributes",
       attrs, "--split", split, "--embed-dim", "8", "--embed-seed", "5",
       "--orig", root + "/orig.catf", "--edit1", root + "/edit1.catf",
       "--edit2", root + "/edit2.catf", "--out-batch", batch, "--extractor",
       "identity"});

  const std::string losses_json = run({"losses", "--batch", batch});
  const nlohmann::json losses = nlohmann::json::parse(losses_json);

  const nlohmann::json objective = {
      {"adversarial",
       {{"d_fake_uncond", 0.5},
        {"d_fake_cond", 0.5},
        {"d_real_uncond", 0.5},
        {"d_real_cond", 0.5}}},
      {"l_diff", losses.at("l_diff")},
      {"l_per", losses.at("l_per")},
      {"damsm", {{"r_scores", {1.0, 0.0, 0.0}}, {"matched_index", 0}}},
      {"l_attr", 0.25}};
  testutil::write_file(root + "/objective.json", objective.dump());
  run({"objective", "--config", root + "/objective.json"});

  transcript += testutil::read_file(batch + "/0_v1_pos.catf");
  transcript += testutil::read_file(batch + "/0_v_ori1.catf");
  return transcript;
}

void check_cli_determinism(Check& c) {
  testutil::TempDir dir("acceptance_pipeline");
  const std::string root = dir.file("fixture");
  std::filesystem::create_directories(root);
  testutil::write_file(
      root + "/sentences.txt",
      "the bird is black with a white belly and an orange bill\n");

  catk::SeededRng rng(17);
  catk::write_tensor(testutil::random_tensor({8, 4}, rng),
                     root + "/features.catf");
  for (const char* name : {"orig", "edit1", "edit2"}) {
    std::vector<double> img(4);
    for (double& x : img) x = 0.5 + 2.0 * rng.unit();
    catk::write_tensor(Tensor({1, 2, 2}, std::move(img)),
                       root + "/" + name + ".catf");
  }

  try {
    const std::string first = run_pipeline(root);
    const std::string second = run_pipeline(root);
    c.expect(!first.empty(), "pipeline produced no output");
    c.expect(first == second, "repeated runs differ");
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
}

struct Criterion {
  int id;
  const char* what;
  void (*fn)(Check&);
};

constexpr std::array<Criterion, 11> kCriteria = {{
    {1, "reference sentences reproduce exactly in under a second",
     check_parser_goldens},
    {2, "200 fuzzed sentences keep every parser invariant",
     check_parser_properties},
    {3, "10000 random draws cover all 7 four-way partitions uniformly",
     check_combiner_uniformity},
    {4, "attention maps normalize and swap on 100 random fixtures",
     check_attention_normalization},
    {5, "analytic gradients match finite differences on 20 fixtures per loss",
     check_gradients},
    {6, "component losses hit their closed forms", check_loss_closed_forms},
    {7, "objectives compose exactly at the default weights",
     check_objective_composition},
    {8, "distribution distance matches closed forms and an independent oracle",
     check_fid},
    {9, "feature-space perceptual distance hits its closed forms", check_lpips},
    {10, "tensor files round trip bit-exact and reject corruption",
     check_tensor_io},
    {11, "the CLI pipeline is byte-identical across repeated runs",
     check_cli_determinism},
}};

}  // namespace

int main() {
  int failures = 0;
  for (const Criterion& criterion : kCriteria) {
    Check check;
    const auto t0 = Clock::now();
    try {
      criterion.fn(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(Clock::now() - t0).count();
    if (check.ok) {
      std::printf("PASS %2d  %s (%.2f s)\n", criterion.id, criterion.what,
                  secs);
    } else {
      std::printf("FAIL %2d  %s — %s\n", criterion.id, criterion.what,
                  check.why.c_str());
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
