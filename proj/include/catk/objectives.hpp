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

#include <cmath>
#include <cstddef>
#include <vector>

#include "catk/error.hpp"
#include "catk/tensor.hpp"

// Composite generator and discriminator objectives: hinge-free adversarial
// log terms on conditional and unconditional scores, weighted auxiliary
// losses, and a softmax-based image-text matching loss.

namespace catk {

/// Weights of the auxiliary loss terms and the matching-loss temperature.
struct LossWeights {
  double lambda1 = 0.7;  // contrastive
  double lambda2 = 0.6;  // perceptual
  double lambda3 = 1.0;  // image-text matching
  double lambda4 = 0.9;  // attribute
  double gamma = 5.0;    // matching softmax sharpness

  void validate() const {
    for (double v : {lambda1, lambda2, lambda3, lambda4, gamma})
      if (!std::isfinite(v) || v < 0.0)
        throw InvalidInput("loss weights must be finite and non-negative");
  }
};

/// Discriminator probabilities for one generated/real image pair.
struct AdversarialScores {
  double d_fake_uncond = 0.0;
  double d_fake_cond = 0.0;
  double d_real_uncond = 0.0;
  double d_real_cond = 0.0;

  void validate() const {
    for (double v : {d_fake_uncond, d_fake_cond, d_real_uncond, d_real_cond})
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw InvalidInput("adversarial scores must lie in [0, 1]");
  }
};

/// Similarity scores of one image against a pool of sentences, with the
/// index of the matching sentence.
struct DamsmInputs {
  Tensor r_scores;  // (M)
  std::size_t matched_index = 0;

  void validate() const {
    if (r_scores.rank() != 1)
      throw InvalidInput("matching scores must be rank 1");
    if (matched_index >= r_scores.size())
      throw InvalidInput("matched index out of range");
  }
};

struct DamsmResult {
  Tensor probabilities;  // (M), sums to 1
  double loss = 0.0;
};

namespace detail {

// Guards both log(0) and the downstream 1-score singularity while keeping
// log(1) exactly zero.
inline double safe_log(double x) { return std::log(std::max(x, 1e-12)); }

}  // namespace detail

/// probabilities = softmax(gamma * r_scores); loss = -log p[matched].
inline DamsmResult damsm(const DamsmInputs& in, double gamma = 5.0) {
  in.validate();
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw InvalidInput("gamma must be finite and non-negative");
  std::vector<double> scaled(in.r_scores.size());
  for (std::size_t i = 0; i < scaled.size(); ++i)
    scaled[i] = gamma * in.r_scores[i];
  Tensor probs = softmax(Tensor::vector(std::move(scaled)), 0);
  const double loss = -detail::safe_log(probs[in.matched_index]);
  return DamsmResult{std::move(probs), loss};
}

/// L_G = -1/2 log D(fake) - 1/2 log D(fake, text)
///       + l1 * contrastive + l2 * perceptual + l3 * matching
inline double generator_loss(const AdversarialScores& adv, double l_diff,
                             double l_per, double l_damsm,
                             const LossWeights& w = LossWeights{}) {
  adv.validate();
  w.validate();
  for (double v : {l_diff, l_per, l_damsm})
    if (!std::isfinite(v)) throw InvalidInput("loss terms must be finite");
  return -0.5 * detail::safe_log(adv.d_fake_uncond) -
         0.5 * detail::safe_log(adv.d_fake_cond) + w.lambda1 * l_diff +
         w.lambda2 * l_per + w.lambda3 * l_damsm;
}

/// L_D = -1/2 log D(real) - 1/2 log(1 - D(fake))
///       -1/2 log D(real, text) - 1/2 log(1 - D(fake, text)) + l4 * attribute
inline double discriminator_loss(const AdversarialScores& adv, double l_attr,
                                 const LossWeights& w = LossWeights{}) {
  adv.validate();
  w.validate();
  if (!std::isfinite(l_attr)) throw InvalidInput("loss terms must be finite");
  return -0.5 * detail::safe_log(adv.d_real_uncond) -
         0.5 * detail::safe_log(1.0 - adv.d_fake_uncond) -
         0.5 * detail::safe_log(adv.d_real_cond) -
         0.5 * detail::safe_log(1.0 - adv.d_fake_cond) + w.lambda4 * l_attr;
}

/// Arithmetic-mean batched variants over several score sets.
inline double generator_loss(const std::vector<AdversarialScores>& batch,
                             double l_diff, double l_per, double l_damsm,
                             const LossWeights& w = LossWeights{}) {
  if (batch.empty()) throw InvalidInput("score batch is empty");
  double acc = 0.0;
  for (const auto& adv : batch)
    acc += generator_loss(adv, l_diff, l_per, l_damsm, w);
  return acc / static_cast<double>(batch.size());
}

inline double discriminator_loss(const std::vector<AdversarialScores>& batch,
                                 double l_attr,
                                 const LossWeights& w = LossWeights{}) {
  if (batch.empty()) throw InvalidInput("score batch is empty");
  double acc = 0.0;
  for (const auto& adv : batch) acc += discriminator_loss(adv, l_attr, w);
  return acc / static_cast<double>(batch.size());
}

}  // namespace catk
