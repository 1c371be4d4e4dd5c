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

#include <Eigen/Dense>

#include "catk/metrics.hpp"
#include "catk/tensor.hpp"

namespace testutil {

/// Independent reference implementations built on Eigen, used to
/// cross-check the self-contained linear algebra in the library.

inline Eigen::MatrixXd to_eigen(const catk::Tensor& t) {
  const std::size_t r = t.shape()[0];
  const std::size_t c = t.rank() == 2 ? t.shape()[1] : 1;
  Eigen::MatrixXd m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          t[i * c + j];
  return m;
}

inline catk::Tensor from_eigen(const Eigen::MatrixXd& m) {
  std::vector<double> data(static_cast<std::size_t>(m.rows() * m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      data[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  return catk::Tensor({static_cast<std::size_t>(m.rows()),
                       static_cast<std::size_t>(m.cols())},
                      std::move(data));
}

inline Eigen::MatrixXd oracle_sqrt_psd(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

inline double oracle_fid(const catk::GaussianStats& a,
                         const catk::GaussianStats& b) {
  const Eigen::MatrixXd mu_a = to_eigen(a.mu);
  const Eigen::MatrixXd mu_b = to_eigen(b.mu);
  const Eigen::MatrixXd sig_a = to_eigen(a.sigma);
  const Eigen::MatrixXd sig_b = to_eigen(b.sigma);
  const Eigen::MatrixXd root_a = oracle_sqrt_psd(sig_a);
  Eigen::MatrixXd inner = root_a * sig_b * root_a;
  inner = 0.5 * (inner + inner.transpose()).eval();
  const Eigen::MatrixXd cross = oracle_sqrt_psd(inner);
  const double mean_term = (mu_a - mu_b).squaredNorm();
  const double trace_term =
      sig_a.trace() + sig_b.trace() - 2.0 * cross.trace();
  return mean_term + trace_term;
}

/// Sample covariance with the n-1 divisor, straight from Eigen ops.
inline catk::GaussianStats oracle_gaussian_stats(const catk::Tensor& rows) {
  const Eigen::MatrixXd x = to_eigen(rows);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) /
                              static_cast<double>(x.rows() - 1);
  std::vector<double> mu(static_cast<std::size_t>(mean.size()));
  for (Eigen::Index j = 0; j < mean.size(); ++j)
    mu[static_cast<std::size_t>(j)] = mean(j);
  return catk::GaussianStats(
      catk::Tensor::vector(std::move(mu)),
      from_eigen(0.5 * (cov + cov.transpose())));
}

}  // namespace testutil
