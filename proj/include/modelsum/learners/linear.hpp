// Copyright 2026 The modelsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Ordinary least squares and logistic regression (IRLS) on a treatment-coded
// design matrix: intercept, numeric features as-is, one indicator per
// non-reference level of each categorical feature.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modelsum/learner.hpp"

namespace modelsum::learners {

class DesignEncoder {
 public:
  explicit DesignEncoder(const std::vector<FeatureInfo>& features) {
    width_ = 1;
    for (const auto& f : features) {
      offsets_.push_back(width_);
      categorical_.push_back(f.kind == ColumnKind::categorical);
      width_ += f.kind == ColumnKind::categorical ? (f.levels.empty() ? 0 : f.levels.size() - 1)
                                                  : 1;
    }
  }

  std::size_t width() const { return width_; }

  template <typename RowAt>
  Eigen::MatrixXd encode(std::span<const std::span<const double>> columns, std::size_t n,
                         RowAt row_at) const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(width_));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const std::size_t r = row_at(i);
      x(ii, 0) = 1.0;
      for (std::size_t j = 0; j < columns.size(); ++j) {
        const double v = columns[j][r];
        if (!categorical_[j]) {
          x(ii, static_cast<Eigen::Index>(offsets_[j])) = v;
        } else if (v >= 1.0) {
          x(ii, static_cast<Eigen::Index>(offsets_[j] + static_cast<std::size_t>(v) - 1)) = 1.0;
        }
      }
    }
    return x;
  }

 private:
  std::size_t width_ = 1;
  std::vector<std::size_t> offsets_;
  std::vector<bool> categorical_;
};

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(DesignEncoder encoder, Eigen::VectorXd coef, bool logistic)
      : encoder_(std::move(encoder)), coef_(std::move(coef)), logistic_(logistic) {}

  void predict(std::span<const std::span<const double>> columns, std::size_t n_rows,
               std::span<double> out) const override {
    Eigen::MatrixXd x = encoder_.encode(columns, n_rows, [](std::size_t i) { return i; });
    // Row-wise dot products in column order, so a row's output does not
    // depend on how many rows share the batch.
    for (std::size_t i = 0; i < n_rows; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      double e = 0.0;
      for (Eigen::Index j = 0; j < x.cols(); ++j) e += x(r, j) * coef_(j);
      if (!logistic_) {
        out[i] = e;
      } else {
        const double p = 1.0 / (1.0 + std::exp(-e));
        out[2 * i + positive_] = p;
        out[2 * i + (1 - positive_)] = 1.0 - p;
      }
    }
  }

  void set_positive(std::uint32_t positive) { positive_ = positive; }
  const Eigen::VectorXd& coefficients() const { return coef_; }

 private:
  DesignEncoder encoder_;
  Eigen::VectorXd coef_;
  bool logistic_;
  std::uint32_t positive_ = 0;
};

inline constexpr double kRidgeFallback = 1e-8;

inline std::shared_ptr<const Predictor> fit_linear(const TrainingData& data,
                                                   std::vector<std::string>& warnings) {
  if (data.type != TaskType::regression) throw Error("linear requires a regression task");
  DesignEncoder enc(data.features);
  Eigen::MatrixXd x = enc.encode(data.x, data.n(), [&](std::size_t i) { return data.rows[i]; });
  Eigen::Map<const Eigen::VectorXd> y(data.y.data(), static_cast<Eigen::Index>(data.n()));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::VectorXd coef;
  if (qr.rank() == x.cols()) {
    coef = qr.solve(y);
  } else {
    warnings.push_back("linear: rank-deficient design (rank " + std::to_string(qr.rank()) +
                       " of " + std::to_string(x.cols()) + "), using ridge penalty 1e-8");
    Eigen::MatrixXd xtx = x.transpose() * x;
    for (Eigen::Index j = 1; j < xtx.cols(); ++j) xtx(j, j) += kRidgeFallback;
    coef = xtx.ldlt().solve(x.transpose() * y);
  }
  return std::make_shared<LinearPredictor>(std::move(enc), std::move(coef), false);
}

inline std::shared_ptr<const Predictor> fit_logistic(const TrainingData& data,
                                                     const LearnerSpec& spec,
                                                     std::vector<std::string>& warnings) {
  if (data.type != TaskType::binary_classification) {
    throw Error("logistic requires a binary classification task");
  }
  const auto max_iter = spec.get_int("max_iter");
  const double tol = spec.get_double("tol");
  if (max_iter < 1) throw UsageError("max_iter must be at least 1");

  DesignEncoder enc(data.features);
  Eigen::MatrixXd x = enc.encode(data.x, data.n(), [&](std::size_t i) { return data.rows[i]; });
  const Eigen::Index n = x.rows();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = data.y[static_cast<std::size_t>(i)] == data.positive ? 1.0 : 0.0;
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  bool converged = false;
  for (std::int64_t iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd w(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mu = std::clamp(1.0 / (1.0 + std::exp(-eta(i))), 1e-10, 1.0 - 1e-10);
      w(i) = mu * (1.0 - mu);
      z(i) = eta(i) + (y(i) - mu) / w(i);
    }
    Eigen::MatrixXd xtwx = x.transpose() * w.asDiagonal() * x;
    Eigen::VectorXd xtwz = x.transpose() * w.asDiagonal() * z;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtwx);
    Eigen::VectorXd next;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
        ldlt.rcond() > 1e-14) {
      next = ldlt.solve(xtwz);
    } else {
      for (Eigen::Index j = 0; j < xtwx.cols(); ++j) xtwx(j, j) += kRidgeFallback;
      next = xtwx.ldlt().solve(xtwz);
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = std::move(next);
    if (change < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    warnings.push_back("logistic: no convergence after " + std::to_string(max_iter) +
                       " iterations (possible separation)");
  }
  auto pred = std::make_shared<LinearPredictor>(std::move(enc), std::move(beta), true);
  pred->set_positive(data.positive);
  return pred;
}

}  // namespace modelsum::learners
