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

// Model complexity from ALE main effects: sparsity (number of features with a
// non-flat effect) and interaction strength (share of prediction variance
// the additive ALE main-effect model fails to explain).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "modelsum/effects.hpp"
#include "modelsum/frame.hpp"
#include "modelsum/metrics.hpp"

namespace modelsum {

inline constexpr double kSparsityRelativeEps = 1e-5;

/// Features whose ALE range exceeds relative_eps * prediction_range.
inline std::size_t sparsity(std::span<const EffectCurve> ale_curves, double prediction_range,
                            double relative_eps = kSparsityRelativeEps) {
  if (!(prediction_range > 0.0)) return 0;
  const double eps = relative_eps * prediction_range;
  std::size_t count = 0;
  for (const auto& c : ale_curves) {
    if (c.degenerate || c.values.empty()) continue;
    auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
    if (*hi - *lo > eps) ++count;
  }
  return count;
}

inline double value_range(std::span<const double> v) {
  if (v.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

/// Per-row values of feature `curve.feature` in the grid's encoding
/// (level positions in grid order for categorical features).
inline std::vector<double> grid_encoded_values(const Frame& frame, const EffectCurve& curve) {
  const Column& col = frame.column(curve.feature);
  std::vector<double> out(col.values().begin(), col.values().end());
  if (col.is_categorical()) {
    std::vector<double> pos(col.n_levels(), -1.0);
    for (std::size_t l = 0; l < col.n_levels(); ++l) {
      auto it = std::find(curve.grid.labels.begin(), curve.grid.labels.end(), col.levels()[l]);
      if (it != curve.grid.labels.end()) pos[l] = static_cast<double>(it - curve.grid.labels.begin());
    }
    for (auto& v : out) {
      v = pos[static_cast<std::size_t>(v)];
      if (v < 0) throw Error("row level missing from grid of " + curve.feature);
    }
  }
  return out;
}

/// IAS = sum (f - f_main)^2 / sum (f - f0)^2 over the rows of `frame`, where
/// f0 is the mean prediction and f_main = f0 + sum_j (ALE_j(x_j) - mean ALE_j)
/// with ALE_j evaluated per row by ale_value_at. Constant predictions give 0.
inline double interaction_strength(std::span<const double> predictions, const Frame& frame,
                                   std::span<const EffectCurve> ale_curves) {
  const std::size_t n = predictions.size();
  if (n != frame.n_rows()) throw Error("prediction count does not match frame rows");
  if (n == 0) return 0.0;
  double f0 = 0.0;
  for (double f : predictions) f0 += f;
  f0 /= static_cast<double>(n);
  std::vector<double> main(n, f0);
  for (const auto& curve : ale_curves) {
    if (curve.degenerate) continue;
    auto x = grid_encoded_values(frame, curve);
    std::vector<double> effect(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      effect[i] = ale_value_at(curve, x[i]);
      mean += effect[i];
    }
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) main[i] += effect[i] - mean;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (predictions[i] - main[i]) * (predictions[i] - main[i]);
    den += (predictions[i] - f0) * (predictions[i] - f0);
  }
  if (den == 0.0) return 0.0;
  return num / den;
}

struct ComplexityRecord {
  int fold = 0;
  std::size_t sparsity = 0;
  double interaction_strength = 0.0;
};

struct ComplexitySummary {
  MeanSd sparsity;
  MeanSd interaction_strength;
  std::vector<std::string> notes;
};

inline ComplexitySummary aggregate_complexity(std::span<const ComplexityRecord> records) {
  std::vector<double> s, ias;
  for (const auto& r : records) {
    s.push_back(static_cast<double>(r.sparsity));
    ias.push_back(r.interaction_strength);
  }
  ComplexitySummary out{mean_sd(s), mean_sd(ias), {}};
  if (records.size() == 1) out.notes.push_back("single iteration: sd reported as 0");
  for (const auto& r : records) {
    if (r.interaction_strength > 1.0) {
      out.notes.push_back("iteration " + std::to_string(r.fold + 1) +
                          ": interaction_strength exceeds 1");
    }
  }
  return out;
}

}  // namespace modelsum
