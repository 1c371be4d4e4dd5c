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

// Distribution-level and perceptual evaluation metrics over raw feature
// sets: Fréchet distance between Gaussian fits, with the matrix square
// root taken by symmetric eigendecomposition, and a layer-weighted
// perceptual distance over channel-normalized feature maps.

namespace catk {

/// Gaussian fit of a feature set: mean and symmetrized covariance.
struct GaussianStats {
  Tensor mu;     // (d)
  Tensor sigma;  // (d,d)

  GaussianStats(Tensor mean, Tensor covariance)
      : mu(std::move(mean)), sigma(std::move(covariance)) {
    if (mu.rank() != 1) throw InvalidInput("mean must be rank 1");
    if (sigma.rank() != 2 || sigma.shape()[0] != sigma.shape()[1])
      throw InvalidInput("covariance must be square");
    const std::size_t d = mu.size();
    if (sigma.shape()[0] != d)
      throw InvalidInput("mean and covariance dimensions differ");
    double scale = 1.0;
    for (std::size_t i = 0; i < sigma.size(); ++i)
      scale = std::max(scale, std::abs(sigma[i]));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j)
        if (std::abs(sigma[i * d + j] - sigma[j * d + i]) > 1e-10 * scale)
          throw InvalidInput("covariance asymmetric beyond tolerance");
  }

  std::size_t dim() const { return mu.size(); }
};

/// One layer of paired feature maps plus its per-channel weights.
struct LpipsLayer {
  Tensor v;        // (c,h,w)
  Tensor v_hat;    // (c,h,w)
  Tensor weights;  // (c)

  LpipsLayer(Tensor features, Tensor features_hat, Tensor channel_weights)
      : v(std::move(features)),
        v_hat(std::move(features_hat)),
        weights(std::move(channel_weights)) {
    if (v.rank() != 3 || !v.same_shape(v_hat))
      throw InvalidInput("layer features must be rank 3 with equal shapes");
    if (weights.rank() != 1 || weights.size() != v.shape()[0])
      throw InvalidInput("weights must have one entry per channel");
  }
};

namespace detail {

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the column-eigenvector matrix, unsorted, with
/// a = V diag(values) V^T.
struct SymmetricEigen {
  std::vector<double> values;
  std::vector<double> vectors;  // row-major (d,d), column k is eigenvector k
};

inline SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double scale = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(a[i]));
  if (scale == 0.0) return {std::vector<double>(n, 0.0), std::move(v)};

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (std::sqrt(off) <= 1e-14 * scale) {
      SymmetricEigen out;
      out.values.resize(n);
      for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];
      out.vectors = std::move(v);
      return out;
    }

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        double t;
        if (std::abs(tau) > 1e150) {
          t = 1.0 / (2.0 * tau);
        } else {
          t = (tau >= 0.0 ? 1.0 : -1.0) /
              (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        a[p * n + p] -= t * apq;
        a[q * n + q] += t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[p * n + k] = a[k * n + p];
          a[k * n + q] = s * akp + c * akq;
          a[q * n + k] = a[k * n + q];
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  throw InvalidInput("eigendecomposition failed to converge");
}

}  // namespace detail

/// Sample mean and unbiased covariance (divisor n-1) of row-wise features.
inline GaussianStats gaussian_stats(const Tensor& features) {
  if (features.rank() != 2) throw InvalidInput("features must be rank 2");
  const std::size_t n = features.shape()[0];
  const std::size_t d = features.shape()[1];
  if (n < 2) throw InvalidInput("insufficient samples");

  std::vector<double> mu(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) mu[j] += features[r * d + j];
  for (std::size_t j = 0; j < d; ++j) mu[j] /= static_cast<double>(n);

  std::vector<double> sigma(d * d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = features[r * d + i] - mu[i];
      for (std::size_t j = i; j < d; ++j)
        sigma[i * d + j] += xi * (features[r * d + j] - mu[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      const double val = sigma[i * d + j] / static_cast<double>(n - 1);
      sigma[i * d + j] = val;
      sigma[j * d + i] = val;
    }

  return GaussianStats(Tensor::vector(std::move(mu)),
                       Tensor({d, d}, std::move(sigma)));
}

/// Symmetric PSD square root by eigendecomposition; negative eigenvalues
/// are clipped to 0 before the root.
inline Tensor matrix_sqrt_psd(const Tensor& a) {
  if (a.rank() != 2 || a.shape()[0] != a.shape()[1])
    throw InvalidInput("matrix must be square");
  const std::size_t d = a.shape()[0];

  double scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    scale = std::max(scale, std::abs(a[i]));
  std::vector<double> sym(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(a[i * d + j] - a[j * d + i]) > 1e-10 * scale)
        throw InvalidInput("matrix asymmetric beyond tolerance");
      sym[i * d + j] = 0.5 * (a[i * d + j] + a[j * d + i]);
    }

  detail::SymmetricEigen eig = detail::jacobi_eigen(std::move(sym), d);
  std::vector<double> roots(d);
  for (std::size_t k = 0; k < d; ++k)
    roots[k] = std::sqrt(std::max(eig.values[k], 0.0));

  // V diag(roots) V^T, symmetrized against rounding.
  std::vector<double> out(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        acc += eig.vectors[i * d + k] * roots[k] * eig.vectors[j * d + k];
      out[i * d + j] = acc;
      out[j * d + i] = acc;
    }
  return Tensor({d, d}, std::move(out));
}

/// Fréchet distance between two Gaussian fits:
///   ||mu_a - mu_b||^2 + Tr(Sigma_a + Sigma_b - 2 (Sigma_a^1/2 Sigma_b
///   Sigma_a^1/2)^1/2)
/// Tiny negative results (>= -1e-8) are clipped to 0.
inline double fid(const GaussianStats& a, const GaussianStats& b) {
  const std::size_t d = a.dim();
  if (b.dim() != d) throw InvalidInput("dimension mismatch");

  double mean_term = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = a.mu[i] - b.mu[i];
    mean_term += diff * diff;
  }

  const Tensor root_a = matrix_sqrt_psd(a.sigma);
  std::vector<double> inner(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double rb = 0.0;
        for (std::size_t m = 0; m < d; ++m)
          rb += b.sigma[k * d + m] * root_a[m * d + j];
        acc += root_a[i * d + k] * rb;
      }
      inner[i * d + j] = acc;
    }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double avg = 0.5 * (inner[i * d + j] + inner[j * d + i]);
      inner[i * d + j] = avg;
      inner[j * d + i] = avg;
    }
  const Tensor cross_root = matrix_sqrt_psd(Tensor({d, d}, std::move(inner)));

  double trace_term = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    trace_term +=
        a.sigma[i * d + i] + b.sigma[i * d + i] - 2.0 * cross_root[i * d + i];

  const double result = mean_term + trace_term;
  if (result < -1e-8)
    throw InvalidInput("fid is negative beyond tolerance; inputs are not PSD");
  return std::max(result, 0.0);
}

/// Layer-weighted perceptual distance over channel-unit-normalized
/// features: per layer, (1/(h*w)) * sum_{h,w} ||w ⊙ (v - v_hat)||^2,
/// summed over layers.
inline double lpips(const std::vector<LpipsLayer>& layers) {
  if (layers.empty()) throw InvalidInput("lpips requires at least one layer");
  double total = 0.0;
  for (const auto& layer : layers) {
    const std::size_t c = layer.v.shape()[0];
    const std::size_t h = layer.v.shape()[1];
    const std::size_t w = layer.v.shape()[2];
    const std::size_t p = h * w;
    double layer_acc = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      double norm_v = 0.0, norm_vh = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double x = layer.v[ch * p + i];
        const double y = layer.v_hat[ch * p + i];
        norm_v += x * x;
        norm_vh += y * y;
      }
      if (norm_v == 0.0 || norm_vh == 0.0)
        throw InvalidInput("degenerate feature");
      norm_v = std::sqrt(norm_v);
      norm_vh = std::sqrt(norm_vh);
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double diff = layer.v[ch * p + i] / norm_v -
                            layer.v_hat[ch * p + i] / norm_vh;
        const double weighted = layer.weights[ch] * diff;
        layer_acc += weighted * weighted;
      }
    }
    total += layer_acc / static_cast<double>(p);
  }
  return total;
}

}  // namespace catk
