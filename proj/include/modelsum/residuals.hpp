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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "modelsum/learner.hpp"
#include "modelsum/metrics.hpp"
#include "modelsum/resampling.hpp"

namespace modelsum {

/// Sample quantile with linear interpolation between order statistics
/// (h = (n - 1) q). `sorted` must be ascending and nonempty.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct FiveNumberSummary {
  double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
  std::array<double, 5> values() const { return {min, q25, median, q75, max}; }
};

inline FiveNumberSummary five_number_summary(std::vector<double> v) {
  if (v.empty()) throw Error("cannot summarize an empty residual vector");
  std::sort(v.begin(), v.end());
  return {v.front(), quantile_sorted(v, 0.25), quantile_sorted(v, 0.5), quantile_sorted(v, 0.75),
          v.back()};
}

using Residuals = std::variant<std::vector<double>, ConfusionMatrix>;

/// Regression: y - yhat. Probabilistic classification: p - onehot(y), only
/// the positive-class component for binary tasks, all class components
/// (row-major) for multiclass. Label-only classification: confusion matrix.
inline Residuals residuals(const Prediction& prediction, const Truth& truth,
                           const std::vector<std::string>& class_levels = {}) {
  const std::size_t n = truth.size();
  if (prediction.size() != n) throw Error("prediction/truth length mismatch");
  std::vector<double> r;
  if (truth.type == TaskType::regression) {
    r.reserve(n);
    for (std::size_t i = 0; i < n; ++i) r.push_back(truth.response[i] - prediction.response[i]);
    return r;
  }
  if (!prediction.has_probabilities()) {
    std::vector<std::string> levels = class_levels;
    if (levels.empty()) {
      for (std::size_t c = 0; c < truth.n_classes; ++c) levels.push_back(std::to_string(c));
    }
    return confusion(prediction.labels, truth.labels, std::move(levels));
  }
  if (truth.type == TaskType::binary_classification) {
    r.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      r.push_back(prediction.probability(i, truth.positive) -
                  (truth.labels[i] == truth.positive ? 1.0 : 0.0));
    }
    return r;
  }
  r.reserve(n * truth.n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < truth.n_classes; ++c) {
      r.push_back(prediction.probability(i, c) - (truth.labels[i] == c ? 1.0 : 0.0));
    }
  }
  return r;
}

struct ResidualSummary {
  enum class Kind { regression, probability, confusion };
  Kind kind = Kind::regression;
  std::optional<FiveNumberSummary> quantiles;
  std::optional<ConfusionMatrix> confusion;
  std::size_t n_residuals = 0;
};

/// Pools held-out residuals over all iterations, then summarizes them.
inline ResidualSummary summarize_residuals(const ResampleResult& rr) {
  ResidualSummary out;
  std::vector<double> pooled;
  std::vector<std::string> levels;
  if (rr.task.is_classification()) levels = rr.task.class_levels();
  for (const auto& it : rr.iterations) {
    Truth truth = truth_for(rr.task, it.prediction.row_ids);
    Residuals r = residuals(it.prediction, truth, levels);
    if (auto* cm = std::get_if<ConfusionMatrix>(&r)) {
      out.kind = ResidualSummary::Kind::confusion;
      if (out.confusion) {
        *out.confusion += *cm;
      } else {
        out.confusion = std::move(*cm);
      }
    } else {
      auto& v = std::get<std::vector<double>>(r);
      out.kind = rr.task.is_classification() ? ResidualSummary::Kind::probability
                                             : ResidualSummary::Kind::regression;
      pooled.insert(pooled.end(), v.begin(), v.end());
    }
  }
  if (out.kind == ResidualSummary::Kind::confusion) {
    out.n_residuals = out.confusion->total();
  } else {
    out.n_residuals = pooled.size();
    out.quantiles = five_number_summary(std::move(pooled));
  }
  return out;
}

}  // namespace modelsum
