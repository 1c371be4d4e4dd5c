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

#include <cstdint>
#include <string>
#include <vector>

#include "catk/attribute_parser.hpp"
#include "catk/error.hpp"
#include "catk/rng.hpp"
#include "catk/tensor.hpp"

// Deterministic stand-ins for the pretrained encoders: a word-keyed
// pseudorandom embedding replaces the text encoder, and a configurable
// extractor replaces the image CNN. Same inputs and seeds give identical
// features on every platform.

namespace catk {

/// Pseudorandom word vector; component k is keyed_unit(seed, fnv1a64(word), k).
inline Tensor word_vector(const std::string& word, std::size_t dim,
                          std::uint64_t seed) {
  if (dim == 0) throw InvalidInput("embedding dimension must be positive");
  const std::uint64_t key = fnv1a64(word);
  std::vector<double> v(dim);
  for (std::size_t k = 0; k < dim; ++k) v[k] = keyed_unit(seed, key, k);
  return Tensor::vector(std::move(v));
}

/// Embedding of an attribute combination: the mean of the word vectors of
/// every word in the selected attributes. `indices` are 1-based positions
/// into `attributes`.
inline Tensor combination_embedding(const std::vector<Attribute>& attributes,
                                    const std::vector<std::size_t>& indices,
                                    std::size_t dim, std::uint64_t seed) {
  if (indices.empty()) throw InvalidInput("empty attribute combination");
  std::vector<double> acc(dim, 0.0);
  std::size_t words = 0;
  for (std::size_t idx : indices) {
    if (idx == 0 || idx > attributes.size())
      throw InvalidInput("attribute index " + std::to_string(idx) +
                         " out of range");
    for (const std::string& w : attributes[idx - 1].words) {
      const Tensor wv = word_vector(w, dim, seed);
      for (std::size_t k = 0; k < dim; ++k) acc[k] += wv[k];
      ++words;
    }
  }
  if (words == 0) throw InvalidInput("attribute combination has no words");
  for (double& v : acc) v /= static_cast<double>(words);
  return Tensor::vector(std::move(acc));
}

enum class ExtractorKind { Identity, AveragePool, SeededProjection };

/// Deterministic feature extractor applied to (masked) images.
///   Identity          flattens the image;
///   AveragePool       per-channel spatial mean for (c,h,w) input, global
///                     mean otherwise;
///   SeededProjection  fixed pseudorandom linear map to `out_dim` values,
///                     entry (r, k) = keyed_unit(seed, r, k).
struct FeatureExtractor {
  ExtractorKind kind = ExtractorKind::Identity;
  std::uint64_t seed = 0;
  std::size_t out_dim = 0;

  static FeatureExtractor identity() { return {}; }
  static FeatureExtractor average_pool() {
    return {ExtractorKind::AveragePool, 0, 0};
  }
  static FeatureExtractor seeded_projection(std::uint64_t seed,
                                            std::size_t out_dim) {
    if (out_dim == 0)
      throw InvalidInput("projection output dimension must be positive");
    return {ExtractorKind::SeededProjection, seed, out_dim};
  }

  Tensor extract(const Tensor& image) const {
    switch (kind) {
      case ExtractorKind::Identity:
        return Tensor::vector(image.data());
      case ExtractorKind::AveragePool: {
        if (image.rank() == 3) {
          const std::size_t channels = image.shape()[0];
          const std::size_t plane = image.shape()[1] * image.shape()[2];
          std::vector<double> out(channels, 0.0);
          for (std::size_t c = 0; c < channels; ++c) {
            for (std::size_t i = 0; i < plane; ++i)
              out[c] += image[c * plane + i];
            out[c] /= static_cast<double>(plane);
          }
          return Tensor::vector(std::move(out));
        }
        double mean = 0.0;
        for (std::size_t i = 0; i < image.size(); ++i) mean += image[i];
        return Tensor::vector({mean / static_cast<double>(image.size())});
      }
      case ExtractorKind::SeededProjection: {
        std::vector<double> out(out_dim, 0.0);
        for (std::size_t r = 0; r < out_dim; ++r) {
          double acc = 0.0;
          for (std::size_t k = 0; k < image.size(); ++k)
            acc += keyed_unit(seed, r, k) * image[k];
          out[r] = acc;
        }
        return Tensor::vector(std::move(out));
      }
    }
    throw InvalidInput("unknown extractor kind");
  }
};

/// Deterministic seeded feature vector, used by fixtures and tests.
inline Tensor random_vector(std::size_t dim, SeededRng& rng) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.symmetric();
  return Tensor::vector(std::move(v));
}

}  // namespace catk
