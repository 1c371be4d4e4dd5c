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
#include <utility>
#include <vector>

#include "catk/error.hpp"
#include "catk/tensor.hpp"

// Attribute-level discrimination: an attribute embedding attends over the
// spatial positions of an image feature map, the attended pooled feature is
// scored against the embedding, and a binary cross-entropy on that score
// tells real attribute-image pairs from mismatched ones.

namespace catk {

/// Softmax attention of an attribute embedding over spatial positions,
/// plus the resulting attention-pooled feature.
struct AttributeCorrelation {
  Tensor weights;  // (p), sums to 1
  Tensor pooled;   // (d)
};

enum class MatchLabel { kMismatch = 0, kMatch = 1 };

/// weights = softmax_i(s . v_:,i), pooled = sum_i weights[i] * v_:,i.
inline AttributeCorrelation attribute_region_correlation(const Tensor& features,
                                                         const Tensor& s) {
  if (features.rank() != 2) throw InvalidInput("features must be rank 2");
  if (s.rank() != 1) throw InvalidInput("attribute embedding must be rank 1");
  const std::size_t d = features.shape()[0];
  const std::size_t p = features.shape()[1];
  if (s.size() != d)
    throw InvalidInput("embedding dimension does not match feature channels");

  std::vector<double> logits(p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t m = 0; m < d; ++m) logits[i] += s[m] * features[m * p + i];
  Tensor weights = softmax(Tensor::vector(std::move(logits)), 0);

  std::vector<double> pooled(d, 0.0);
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t i = 0; i < p; ++i)
      pooled[m] += weights[i] * features[m * p + i];

  return AttributeCorrelation{std::move(weights),
                              Tensor::vector(std::move(pooled))};
}

/// Logistic match score sigma(s . pooled) in (0, 1).
inline double attribute_match_score(const Tensor& s,
                                    const AttributeCorrelation& corr) {
  if (s.rank() != 1 || s.size() != corr.pooled.size())
    throw InvalidInput("embedding and pooled feature lengths differ");
  const double z = dot(s, corr.pooled);
  return 1.0 / (1.0 + std::exp(-z));
}

inline double attribute_match_score(const Tensor& features, const Tensor& s) {
  return attribute_match_score(s, attribute_region_correlation(features, s));
}

/// Summed binary cross-entropy over (score, label) pairs. Scores are
/// clamped to [1e-12, 1 - 1e-12] before the logs.
inline double attr_loss(const std::vector<std::pair<double, MatchLabel>>& pairs) {
  if (pairs.empty()) throw InvalidInput("attr loss requires at least one pair");
  double total = 0.0;
  for (const auto& [score, label] : pairs) {
    if (!std::isfinite(score) || score < 0.0 || score > 1.0)
      throw InvalidInput("match score must lie in [0, 1]");
    const double q = std::min(std::max(score, 1e-12), 1.0 - 1e-12);
    total -= label == MatchLabel::kMatch ? std::log(q) : std::log(1.0 - q);
  }
  return total;
}

/// Single-pair attribute loss evaluated from raw inputs, with analytic
/// gradients with respect to the embedding and the feature map.
struct AttrLossGradients {
  double value = 0.0;
  double score = 0.0;
  Tensor grad_s;
  Tensor grad_features;
};

inline AttrLossGradients attr_loss_grad(const Tensor& features, const Tensor& s,
                                        MatchLabel label) {
  const AttributeCorrelation corr = attribute_region_correlation(features, s);
  const std::size_t d = features.shape()[0];
  const std::size_t p = features.shape()[1];

  // a_i = s . v_:,i so z = sum_i w_i a_i with w = softmax(a).
  std::vector<double> a(p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t m = 0; m < d; ++m) a[i] += s[m] * features[m * p + i];
  double z = 0.0;
  for (std::size_t i = 0; i < p; ++i) z += corr.weights[i] * a[i];

  const double score = 1.0 / (1.0 + std::exp(-z));
  if (score <= 1e-12 || score >= 1.0 - 1e-12)
    throw InvalidInput("degenerate fixture: match score saturates the clamp");

  const double y = label == MatchLabel::kMatch ? 1.0 : 0.0;
  const double value = -(y * std::log(score) + (1.0 - y) * std::log(1.0 - score));
  const double dz = score - y;

  // dz/ds = pooled + sum_i w_i (a_i - z) v_:,i
  std::vector<double> gs(d);
  for (std::size_t m = 0; m < d; ++m) {
    double acc = corr.pooled[m];
    for (std::size_t i = 0; i < p; ++i)
      acc += corr.weights[i] * (a[i] - z) * features[m * p + i];
    gs[m] = dz * acc;
  }

  // dz/dv_:,i = w_i (1 + a_i - z) s
  std::vector<double> gv(d * p);
  for (std::size_t i = 0; i < p; ++i) {
    const double coeff = corr.weights[i] * (1.0 + a[i] - z);
    for (std::size_t m = 0; m < d; ++m) gv[m * p + i] = dz * coeff * s[m];
  }

  return AttrLossGradients{value, score, Tensor::vector(std::move(gs)),
                           Tensor({d, p}, std::move(gv))};
}

}  // namespace catk
