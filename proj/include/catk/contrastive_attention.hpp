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
#include <string>
#include <utility>
#include <vector>

#include "catk/embedding.hpp"
#include "catk/error.hpp"
#include "catk/tensor.hpp"

// Cross-modal attention between an image feature map and two attribute
// combination embeddings. The two combinations compete through a two-way
// softmax, once per spatial position (spatial map) and once per channel
// over spatially averaged descriptors (channel map). The spatial maps mask
// the original and edited images into six attended views whose features
// feed the contrastive loss; the perceptual loss penalizes disagreement
// between the two cross-masked edits.

namespace catk {

/// CNN-style feature map laid out as (d channels, p = h*w positions).
struct ImageFeatures {
  Tensor v;
  std::size_t h = 0;
  std::size_t w = 0;

  ImageFeatures(Tensor features, std::size_t height, std::size_t width)
      : v(std::move(features)), h(height), w(width) {
    if (v.rank() != 2) throw InvalidInput("image features must be rank 2");
    if (h == 0 || w == 0 || v.shape()[1] != h * w)
      throw InvalidInput("spatial dims do not match feature positions");
  }

  /// Interprets a (d, p) tensor as a p-by-1 spatial layout.
  explicit ImageFeatures(Tensor features) : v(std::move(features)) {
    if (v.rank() != 2) throw InvalidInput("image features must be rank 2");
    h = v.shape()[1];
    w = 1;
  }

  std::size_t channels() const { return v.shape()[0]; }
  std::size_t positions() const { return v.shape()[1]; }
};

/// Embedding of one attribute combination, paired with the attribute
/// indices it was built from.
struct CombinationEmbedding {
  Tensor s;
  std::vector<std::size_t> source_indices;

  explicit CombinationEmbedding(Tensor embedding,
                                std::vector<std::size_t> indices = {})
      : s(std::move(embedding)), source_indices(std::move(indices)) {
    if (s.rank() != 1) throw InvalidInput("combination embedding must be rank 1");
    if (l2_norm(s) == 0.0) throw InvalidInput("degenerate vector");
  }

  std::size_t dim() const { return s.size(); }
};

/// Per-position and per-channel attention; row j belongs to combination j.
/// Columns are probability pairs: spatial(0,i) + spatial(1,i) == 1.
struct AttentionMaps {
  Tensor spatial;  // (2, p)
  Tensor channel;  // (2, d)
};

/// The six attended feature vectors: each edited image masked by its own
/// and by the other combination's map, and the original masked by both.
struct AttendedSextet {
  Tensor v1_pos;
  Tensor v1_neg;
  Tensor v2_pos;
  Tensor v2_neg;
  Tensor v_ori1;
  Tensor v_ori2;

  std::size_t dim() const { return v1_pos.size(); }

  void validate() const {
    const std::size_t n = v1_pos.size();
    if (v1_neg.size() != n || v2_pos.size() != n || v2_neg.size() != n ||
        v_ori1.size() != n || v_ori2.size() != n)
      throw InvalidInput("attended sextet vectors must have equal lengths");
  }
};

struct ContrastiveBatch {
  std::vector<AttendedSextet> sextets;

  void validate() const {
    if (sextets.empty()) throw InvalidInput("contrastive batch is empty");
    const std::size_t n = sextets.front().dim();
    for (const auto& s : sextets) {
      s.validate();
      if (s.dim() != n)
        throw InvalidInput("contrastive batch has mixed vector lengths");
    }
  }
};

namespace detail {

// Unclamped cosine; keeps the loss smooth for gradient work.
inline double raw_cosine(const Tensor& a, const Tensor& b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw InvalidInput("degenerate vector");
  return dot(a, b) / (na * nb);
}

// d cos(x, y) / dx = y/(|x||y|) - cos * x/|x|^2, accumulated into gx.
inline void add_cosine_grad_x(std::vector<double>& gx, double coeff,
                              const Tensor& x, const Tensor& y) {
  const double nx = l2_norm(x);
  const double ny = l2_norm(y);
  const double c = dot(x, y) / (nx * ny);
  for (std::size_t i = 0; i < x.size(); ++i)
    gx[i] += coeff * (y[i] / (nx * ny) - c * x[i] / (nx * nx));
}

}  // namespace detail

/// Builds both attention maps for two combinations competing over an image.
/// spatial(j, i) = exp(s_j . v_:,i) / sum_k exp(s_k . v_:,i)
/// channel(j, m) = exp(s_j[m] u_m) / sum_k exp(s_k[m] u_m),  u_m = mean_i v_m,i
inline AttentionMaps cmam(const ImageFeatures& v, const CombinationEmbedding& s1,
                          const CombinationEmbedding& s2) {
  const std::size_t d = v.channels();
  const std::size_t p = v.positions();
  if (s1.dim() != d || s2.dim() != d)
    throw InvalidInput("embedding dimension does not match feature channels");

  std::vector<double> spatial(2 * p);
  for (std::size_t i = 0; i < p; ++i) {
    double l1 = 0.0, l2 = 0.0;
    for (std::size_t m = 0; m < d; ++m) {
      const double vm = v.v[m * p + i];
      l1 += s1.s[m] * vm;
      l2 += s2.s[m] * vm;
    }
    const double hi = std::max(l1, l2);
    const double e1 = std::exp(l1 - hi);
    const double e2 = std::exp(l2 - hi);
    spatial[i] = e1 / (e1 + e2);
    spatial[p + i] = e2 / (e1 + e2);
  }

  std::vector<double> channel(2 * d);
  for (std::size_t m = 0; m < d; ++m) {
    double u = 0.0;
    for (std::size_t i = 0; i < p; ++i) u += v.v[m * p + i];
    u /= static_cast<double>(p);
    const double l1 = s1.s[m] * u;
    const double l2 = s2.s[m] * u;
    const double hi = std::max(l1, l2);
    const double e1 = std::exp(l1 - hi);
    const double e2 = std::exp(l2 - hi);
    channel[m] = e1 / (e1 + e2);
    channel[d + m] = e2 / (e1 + e2);
  }

  return AttentionMaps{Tensor({2, p}, std::move(spatial)),
                       Tensor({2, d}, std::move(channel))};
}

/// Applies one spatial attention row as a broadcast mask over a (c,h,w)
/// image.
inline Tensor apply_spatial_mask(const Tensor& image, const AttentionMaps& maps,
                                 std::size_t which) {
  if (image.rank() != 3) throw InvalidInput("image must have shape (c,h,w)");
  const std::size_t h = image.shape()[1];
  const std::size_t w = image.shape()[2];
  const std::size_t p = maps.spatial.shape()[1];
  if (p != h * w)
    throw InvalidInput("attention positions do not match image area");
  if (which > 1) throw InvalidInput("map index must be 0 or 1");
  std::vector<double> mask(p);
  for (std::size_t i = 0; i < p; ++i) mask[i] = maps.spatial[which * p + i];
  return hadamard(image, Tensor({1, h, w}, std::move(mask)), true);
}

/// Masks the original and both edited images by the two spatial maps and
/// extracts features from each view:
///   v1_pos = f(edit1 * C1)   v1_neg = f(edit1 * C2)
///   v2_pos = f(edit2 * C2)   v2_neg = f(edit2 * C1)
///   v_ori1 = f(orig  * C1)   v_ori2 = f(orig  * C2)
inline AttendedSextet attended_sextet(const Tensor& i_orig, const Tensor& i_edit1,
                                      const Tensor& i_edit2,
                                      const AttentionMaps& maps,
                                      const FeatureExtractor& extractor) {
  if (!i_orig.same_shape(i_edit1) || !i_orig.same_shape(i_edit2))
    throw InvalidInput("original and edited images must share one shape");
  AttendedSextet out{
      extractor.extract(apply_spatial_mask(i_edit1, maps, 0)),
      extractor.extract(apply_spatial_mask(i_edit1, maps, 1)),
      extractor.extract(apply_spatial_mask(i_edit2, maps, 1)),
      extractor.extract(apply_spatial_mask(i_edit2, maps, 0)),
      extractor.extract(apply_spatial_mask(i_orig, maps, 0)),
      extractor.extract(apply_spatial_mask(i_orig, maps, 1)),
  };
  out.validate();
  return out;
}

inline Tensor extract_features(const Tensor& image,
                               const FeatureExtractor& extractor) {
  return extractor.extract(image);
}

/// Contrastive loss over the attended features, averaged over anchors:
/// for each anchor a,
///   -log[ exp(cos(v1_neg_a, v_ori1_a)) / sum_p exp(cos(v2_pos_p, v_ori1_a)) ]
///   -log[ exp(cos(v2_neg_a, v_ori1_a)) / sum_p exp(cos(v1_pos_p, v_ori1_a)) ]
/// As printed the denominator omits the numerator term; `nce_standard`
/// adds it for the conventional InfoNCE form.
inline double contrastive_loss(const ContrastiveBatch& batch,
                               bool nce_standard = false) {
  batch.validate();
  const std::size_t n = batch.sextets.size();
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const auto& anchor = batch.sextets[a];
    const double c1n = detail::raw_cosine(anchor.v1_neg, anchor.v_ori1);
    const double c2n = detail::raw_cosine(anchor.v2_neg, anchor.v_ori1);
    double d1 = nce_standard ? std::exp(c1n) : 0.0;
    double d2 = nce_standard ? std::exp(c2n) : 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      d1 += std::exp(detail::raw_cosine(batch.sextets[p].v2_pos, anchor.v_ori1));
      d2 += std::exp(detail::raw_cosine(batch.sextets[p].v1_pos, anchor.v_ori1));
    }
    total += -c1n + std::log(d1);
    total += -c2n + std::log(d2);
  }
  return total / static_cast<double>(n);
}

/// Gradients of contrastive_loss with respect to every feature vector of
/// every sextet, in batch order. v_ori2 never enters the loss, so its
/// gradient is identically zero.
struct ContrastiveGradients {
  double value = 0.0;
  std::vector<AttendedSextet> grads;
};

inline ContrastiveGradients contrastive_loss_grad(const ContrastiveBatch& batch,
                                                  bool nce_standard = false) {
  batch.validate();
  const std::size_t n = batch.sextets.size();
  const std::size_t dim = batch.sextets.front().dim();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<std::vector<double>> g_v1pos(n, std::vector<double>(dim, 0.0));
  auto g_v1neg = g_v1pos, g_v2pos = g_v1pos, g_v2neg = g_v1pos,
       g_ori1 = g_v1pos, g_ori2 = g_v1pos;

  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const auto& anchor = batch.sextets[a];
    const double c1n = detail::raw_cosine(anchor.v1_neg, anchor.v_ori1);
    const double c2n = detail::raw_cosine(anchor.v2_neg, anchor.v_ori1);

    std::vector<double> e_a(n), e_b(n);
    double d1 = nce_standard ? std::exp(c1n) : 0.0;
    double d2 = nce_standard ? std::exp(c2n) : 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      e_a[p] = std::exp(detail::raw_cosine(batch.sextets[p].v2_pos, anchor.v_ori1));
      e_b[p] = std::exp(detail::raw_cosine(batch.sextets[p].v1_pos, anchor.v_ori1));
      d1 += e_a[p];
      d2 += e_b[p];
    }
    total += -c1n + std::log(d1) - c2n + std::log(d2);

    // dL/dcos terms, all scaled by the 1/N anchor average.
    const double w_c1n = inv_n * (-1.0 + (nce_standard ? std::exp(c1n) / d1 : 0.0));
    const double w_c2n = inv_n * (-1.0 + (nce_standard ? std::exp(c2n) / d2 : 0.0));

    detail::add_cosine_grad_x(g_v1neg[a], w_c1n, anchor.v1_neg, anchor.v_ori1);
    detail::add_cosine_grad_x(g_ori1[a], w_c1n, anchor.v_ori1, anchor.v1_neg);
    detail::add_cosine_grad_x(g_v2neg[a], w_c2n, anchor.v2_neg, anchor.v_ori1);
    detail::add_cosine_grad_x(g_ori1[a], w_c2n, anchor.v_ori1, anchor.v2_neg);

    for (std::size_t p = 0; p < n; ++p) {
      const double w_a = inv_n * e_a[p] / d1;
      const double w_b = inv_n * e_b[p] / d2;
      detail::add_cosine_grad_x(g_v2pos[p], w_a, batch.sextets[p].v2_pos,
                                anchor.v_ori1);
      detail::add_cosine_grad_x(g_ori1[a], w_a, anchor.v_ori1,
                                batch.sextets[p].v2_pos);
      detail::add_cosine_grad_x(g_v1pos[p], w_b, batch.sextets[p].v1_pos,
                                anchor.v_ori1);
      detail::add_cosine_grad_x(g_ori1[a], w_b, anchor.v_ori1,
                                batch.sextets[p].v1_pos);
    }
  }

  ContrastiveGradients out;
  out.value = total * inv_n;
  out.grads.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    out.grads.push_back(AttendedSextet{
        Tensor::vector(std::move(g_v1pos[a])), Tensor::vector(std::move(g_v1neg[a])),
        Tensor::vector(std::move(g_v2pos[a])), Tensor::vector(std::move(g_v2neg[a])),
        Tensor::vector(std::move(g_ori1[a])), Tensor::vector(std::move(g_ori2[a]))});
  }
  return out;
}

/// Background-preservation loss: mean squared difference of the two
/// cross-masked edit features, normalized by the image volume c*h*w.
inline double perceptual_loss(const Tensor& v1_neg, const Tensor& v2_neg,
                              std::size_t c, std::size_t h, std::size_t w) {
  if (v1_neg.size() != v2_neg.size())
    throw InvalidInput("perceptual loss requires equal lengths");
  if (c == 0 || h == 0 || w == 0)
    throw InvalidInput("image volume must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < v1_neg.size(); ++i) {
    const double diff = v1_neg[i] - v2_neg[i];
    acc += diff * diff;
  }
  return acc / static_cast<double>(c * h * w);
}

/// Gradient of perceptual_loss with respect to (v1_neg, v2_neg).
inline std::pair<Tensor, Tensor> perceptual_loss_grad(const Tensor& v1_neg,
                                                      const Tensor& v2_neg,
                                                      std::size_t c,
                                                      std::size_t h,
                                                      std::size_t w) {
  if (v1_neg.size() != v2_neg.size())
    throw InvalidInput("perceptual loss requires equal lengths");
  if (c == 0 || h == 0 || w == 0)
    throw InvalidInput("image volume must be positive");
  const double scale = 2.0 / static_cast<double>(c * h * w);
  std::vector<double> g1(v1_neg.size()), g2(v2_neg.size());
  for (std::size_t i = 0; i < v1_neg.size(); ++i) {
    const double diff = v1_neg[i] - v2_neg[i];
    g1[i] = scale * diff;
    g2[i] = -scale * diff;
  }
  return {Tensor::vector(std::move(g1)), Tensor::vector(std::move(g2))};
}

}  // namespace catk
