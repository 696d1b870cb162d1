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

// Shared test helpers: random generators, hand-written models, and
// reference implementations written independently of the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "modelsum/effects.hpp"
#include "modelsum/frame.hpp"
#include "modelsum/learner.hpp"
#include "modelsum/task.hpp"

namespace testing_support {

using namespace modelsum;

using Gen = std::mt19937_64;

inline double unif(Gen& g, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::size_t pick(Gen& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

/// Values on a coarse lattice so ties are common.
inline std::vector<double> tied_values(Gen& g, std::size_t n, std::size_t distinct) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(pick(g, 0, distinct - 1)) / static_cast<double>(distinct);
  return v;
}

/// A model defined by a plain function of one row of feature values
/// (categorical features arrive as level codes). Classification functions
/// return the probability of class 1 of two.
class FunctionPredictor final : public Predictor {
 public:
  FunctionPredictor(std::function<double(const std::vector<double>&)> f, bool binary)
      : f_(std::move(f)), binary_(binary) {}

  void predict(std::span<const std::span<const double>> columns, std::size_t n_rows,
               std::span<double> out) const override {
    std::vector<double> row(columns.size());
    for (std::size_t i = 0; i < n_rows; ++i) {
      for (std::size_t j = 0; j < columns.size(); ++j) row[j] = columns[j][i];
      const double v = f_(row);
      if (binary_) {
        out[2 * i] = 1.0 - v;
        out[2 * i + 1] = v;
      } else {
        out[i] = v;
      }
    }
  }

 private:
  std::function<double(const std::vector<double>&)> f_;
  bool binary_;
};

inline std::vector<FeatureInfo> feature_infos(const Frame& frame, const std::vector<std::string>& names) {
  std::vector<FeatureInfo> out;
  for (const auto& n : names) {
    const Column& c = frame.column(n);
    out.push_back(FeatureInfo{n, c.kind(), c.levels()});
  }
  return out;
}

inline FittedModel regression_model(const Frame& frame, const std::vector<std::string>& features,
                                    std::function<double(const std::vector<double>&)> f) {
  return FittedModel(make_learner("featureless"), TaskType::regression, PredictType::response,
                     feature_infos(frame, features), {},
                     std::make_shared<FunctionPredictor>(std::move(f), false));
}

inline FittedModel binary_model(const Frame& frame, const std::vector<std::string>& features,
                                std::vector<std::string> classes,
                                std::function<double(const std::vector<double>&)> p1) {
  return FittedModel(make_learner("featureless"), TaskType::binary_classification,
                     PredictType::probability, feature_infos(frame, features), std::move(classes),
                     std::make_shared<FunctionPredictor>(std::move(p1), true));
}

inline std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

// ---------------------------------------------------------------------------
// Reference implementations.

/// AUC by enumerating every (positive, negative) pair.
inline double oracle_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

/// Single-row prediction of output `cls` for row `i` with feature `f` set to `value`.
inline double predict_one(const FittedModel& model, const Frame& frame, std::size_t i,
                          const std::string& f, std::optional<double> value, std::size_t cls) {
  std::vector<Column> cols;
  for (const auto& c : frame.columns()) {
    std::vector<double> v = {c.values()[i]};
    if (c.name() == f && value) v[0] = *value;
    cols.push_back(c.with_values(std::move(v)));
  }
  Frame one(std::move(cols));
  Prediction p = model.predict(one, {0});
  return p.output(0, cls);
}

/// PDP by predicting each row separately and summing left to right.
inline std::vector<double> oracle_pdp(const FittedModel& model, const Frame& frame,
                                      const std::string& f, const std::vector<double>& grid,
                                      std::size_t cls = 0) {
  std::vector<double> out;
  for (double g : grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i < frame.n_rows(); ++i) sum += predict_one(model, frame, i, f, g, cls);
    out.push_back(sum / static_cast<double>(frame.n_rows()));
  }
  return out;
}

/// Numeric ALE straight from the definition: interval k = (z_{k-1}, z_k]
/// (the first also takes z_0), mean finite difference per interval,
/// cumulative sum, then centering with interval counts on the upper points.
/// An interval without rows borrows the rows of the closest interval that
/// has some, searching downwards first.
inline std::vector<double> oracle_ale(const FittedModel& model, const Frame& frame,
                                      const std::string& f, const std::vector<double>& z,
                                      std::size_t cls = 0) {
  const auto& x = frame.column(f).values();
  const std::size_t K = z.size();
  auto members = [&](std::size_t k) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < frame.n_rows(); ++i) {
      if ((x[i] > z[k - 1] && x[i] <= z[k]) || (k == 1 && x[i] == z[0])) rows.push_back(i);
    }
    return rows;
  };
  std::vector<double> effect(K, 0.0), count(K, 0.0);
  for (std::size_t k = 1; k < K; ++k) {
    auto rows = members(k);
    count[k] = static_cast<double>(rows.size());
    for (std::size_t d = 1; rows.empty() && d < K; ++d) {
      if (k > d) rows = members(k - d);
      if (rows.empty() && k + d < K) rows = members(k + d);
    }
    double diff = 0.0;
    for (auto i : rows) {
      diff += predict_one(model, frame, i, f, z[k], cls) - predict_one(model, frame, i, f, z[k - 1], cls);
    }
    effect[k] = effect[k - 1] + diff / static_cast<double>(rows.size());
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    num += count[k] * effect[k];
    den += count[k];
  }
  for (auto& e : effect) e -= num / den;
  return effect;
}

/// Quantile with R's type-7 definition: 1-based position 1 + (n - 1) p.
inline double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = 1.0 + (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo - 1] + (pos - static_cast<double>(lo)) * (v[hi - 1] - v[lo - 1]);
}

inline double oracle_sample_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Least-squares slope of y on x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace testing_support
