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
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "catk/error.hpp"

namespace catk {

/// Dense row-major tensor of 64-bit reals with an explicit shape.
/// Values are checked to be finite on construction; operations treat
/// tensors as immutable and return new values.
class Tensor {
 public:
  Tensor(std::vector<std::size_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.empty()) throw InvalidInput("tensor rank must be at least 1");
    std::size_t n = 1;
    for (std::size_t d : shape_) {
      if (d == 0) throw InvalidInput("tensor dimensions must be positive");
      n *= d;
    }
    if (n != data_.size())
      throw InvalidInput("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape product " + std::to_string(n));
    for (double v : data_)
      if (!std::isfinite(v))
        throw InvalidInput("tensor holds a non-finite value");
  }

  static Tensor zeros(std::vector<std::size_t> shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
  }

  static Tensor vector(std::vector<double> data) {
    const std::size_t n = data.size();
    return Tensor({n}, std::move(data));
  }

  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> data) {
    return Tensor({rows, cols}, std::move(data));
  }

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  const std::vector<double>& data() const noexcept { return data_; }

  double operator[](std::size_t flat) const { return data_[flat]; }

  double at(std::size_t i) const { return data_[check_flat({i})]; }
  double at(std::size_t i, std::size_t j) const {
    return data_[check_flat({i, j})];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[check_flat({i, j, k})];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

 private:
  std::size_t check_flat(std::initializer_list<std::size_t> idx) const {
    if (idx.size() != shape_.size())
      throw InvalidInput("index rank does not match tensor rank");
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (std::size_t i : idx) {
      if (i >= shape_[axis]) throw InvalidInput("tensor index out of range");
      flat = flat * shape_[axis] + i;
      ++axis;
    }
    return flat;
  }

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

inline double dot(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size())
    throw InvalidInput("dot product requires equal lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double l2_norm(const Tensor& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * a[i];
  return std::sqrt(acc);
}

/// Normalized exponential along one axis, computed with max-subtraction.
/// Slices along `axis` sum to 1.
inline Tensor softmax(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank())
    throw InvalidInput("softmax axis " + std::to_string(axis) +
                       " out of range for rank " + std::to_string(x.rank()));
  const auto& shape = x.shape();
  const std::size_t n = shape[axis];
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];

  std::vector<double> out(x.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < inner; ++r) {
      const std::size_t base = o * n * inner + r;
      double hi = x[base];
      for (std::size_t k = 1; k < n; ++k)
        hi = std::max(hi, x[base + k * inner]);
      double denom = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double e = std::exp(x[base + k * inner] - hi);
        out[base + k * inner] = e;
        denom += e;
      }
      for (std::size_t k = 0; k < n; ++k) out[base + k * inner] /= denom;
    }
  }
  return Tensor(shape, std::move(out));
}

/// Cosine similarity of two equal-length vectors. Rejects zero-norm inputs.
inline double cosine_sim(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size())
    throw InvalidInput("cosine similarity requires equal lengths");
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw InvalidInput("degenerate vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

/// Elementwise product. With `broadcast` set, `b` may have a singleton
/// leading (channel) dimension that is replicated across the channels of
/// `a`, e.g. (c,h,w) * (1,h,w).
inline Tensor hadamard(const Tensor& a, const Tensor& b,
                       bool broadcast = false) {
  if (a.same_shape(b)) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return Tensor(a.shape(), std::move(out));
  }
  if (broadcast && b.rank() == a.rank() && b.shape()[0] == 1) {
    bool tail_ok = true;
    for (std::size_t d = 1; d < a.rank(); ++d)
      tail_ok = tail_ok && a.shape()[d] == b.shape()[d];
    if (tail_ok) {
      const std::size_t channels = a.shape()[0];
      const std::size_t plane = b.size();
      std::vector<double> out(a.size());
      for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t i = 0; i < plane; ++i)
          out[c * plane + i] = a[c * plane + i] * b[i];
      return Tensor(a.shape(), std::move(out));
    }
  }
  throw InvalidInput("hadamard shapes are incompatible");
}

/// Central-difference gradient of a scalar function, one element at a time:
/// (f(x + eps e_i) - f(x - eps e_i)) / (2 eps).
inline Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f,
                               const Tensor& x, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("finite difference step must be positive");
  std::vector<double> bumped = x.data();
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = bumped[i];
    bumped[i] = saved + eps;
    const double up = f(Tensor(x.shape(), bumped));
    bumped[i] = saved - eps;
    const double down = f(Tensor(x.shape(), bumped));
    bumped[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw InvalidInput("function evaluated to a non-finite value");
    grad[i] = (up - down) / (2.0 * eps);
  }
  return Tensor(x.shape(), std::move(grad));
}

}  // namespace catk
