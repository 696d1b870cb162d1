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

// Permutation feature importance and PDP-based importance.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelsum/effects.hpp"
#include "modelsum/error.hpp"
#include "modelsum/learner.hpp"
#include "modelsum/metrics.hpp"
#include "modelsum/parallel.hpp"
#include "modelsum/random.hpp"
#include "modelsum/resampling.hpp"

namespace modelsum {

inline constexpr std::size_t kDefaultPermutations = 5;

/// Loss measure behind `pfi.<loss>`: ce for classification, mse for regression.
inline std::string default_pfi_loss(TaskType t) { return t == TaskType::regression ? "mse" : "ce"; }

/// Mean increase of `loss` over `repetitions` shuffles of each feature column,
/// in the model's feature order. Shuffle (feature j, repetition r) uses the
/// seed derive_seed(seed, {j, r}).
inline std::vector<double> pfi(const FittedModel& model, const Frame& frame, const Truth& truth,
                               const Measure& loss, std::size_t repetitions, std::uint64_t seed) {
  if (loss.direction != Direction::minimize) {
    throw UsageError("pfi needs a loss (a measure to minimize), got " + loss.id);
  }
  if (repetitions < 1) throw UsageError("pfi needs at least one repetition");
  const std::size_t n = frame.n_rows();
  if (n == 0) throw Error("pfi needs at least one row");
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;

  BoundColumns bound = model.bind(frame);
  const double base = evaluate_measure(loss, model.predict(bound, ids), truth);
  std::vector<std::span<const double>> cols = bound.columns;
  std::vector<double> buffer(n);
  std::vector<double> out(cols.size(), 0.0);
  BoundColumns permuted;
  permuted.n_rows = n;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const std::span<const double> original = bound.columns[j];
    double total = 0.0;
    for (std::size_t r = 0; r < repetitions; ++r) {
      Rng rng = make_rng(derive_seed(seed, {j, r}));
      auto perm = permutation(n, rng);
      for (std::size_t i = 0; i < n; ++i) buffer[i] = original[perm[i]];
      permuted.columns = cols;
      permuted.columns[j] = buffer;
      total += evaluate_measure(loss, model.predict(permuted, ids), truth) - base;
    }
    out[j] = total / static_cast<double>(repetitions);
  }
  return out;
}

/// Sample sd of the PDP values (numeric) or range / 4 (categorical).
inline double pdp_importance(const EffectCurve& curve) {
  const auto& v = curve.values;
  if (curve.degenerate || v.size() < 2) return 0.0;
  if (curve.grid.kind == ColumnKind::categorical) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / 4.0;
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct ImportanceValue {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> per_fold;
};

struct ImportanceRow {
  std::string feature;
  /// One entry per measure id, in table order.
  std::vector<ImportanceValue> values;
};

struct ImportanceTable {
  std::vector<std::string> measure_ids;
  std::vector<ImportanceRow> rows;
  std::size_t n_features = 0;
};

/// `per_fold[m][f]` holds the fold values of measure m for feature f.
/// Rows are sorted by the first measure's mean (descending, NaN last, ties
/// by feature name) and truncated to `n_important`.
inline ImportanceTable build_importance_table(
    std::vector<std::string> measure_ids, const std::vector<std::string>& features,
    const std::vector<std::vector<std::vector<double>>>& per_fold, std::size_t n_important) {
  if (n_important < 1) throw UsageError("n_important must be at least 1");
  if (per_fold.size() != measure_ids.size()) throw Error("importance values/measures mismatch");
  ImportanceTable t;
  t.measure_ids = std::move(measure_ids);
  t.n_features = features.size();
  for (std::size_t f = 0; f < features.size(); ++f) {
    ImportanceRow row;
    row.feature = features[f];
    for (std::size_t m = 0; m < per_fold.size(); ++m) {
      ImportanceValue v;
      v.per_fold = per_fold[m].at(f);
      MeanSd ms = mean_sd(v.per_fold);
      v.mean = ms.mean;
      v.sd = ms.sd;
      row.values.push_back(std::move(v));
    }
    t.rows.push_back(std::move(row));
  }
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const ImportanceRow& a, const ImportanceRow& b) {
    if (a.values.empty()) return a.feature < b.feature;
    const double x = a.values[0].mean, y = b.values[0].mean;
    if (std::isnan(x) != std::isnan(y)) return std::isnan(y);
    if (!std::isnan(x) && x != y) return x > y;
    return a.feature < b.feature;
  });
  if (t.rows.size() > n_important) t.rows.resize(n_important);
  return t;
}

struct ImportanceOptions {
  std::size_t grid_size = kDefaultGridSize;
  std::size_t repetitions = kDefaultPermutations;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Importance ids are `pdp` or `pfi.<loss>`. Computed per iteration on the
/// held-out rows with that iteration's model; PDP importance is averaged
/// over the modeled classes.
inline ImportanceTable importance_table(const ResampleResult& rr,
                                        const std::vector<std::string>& measure_ids,
                                        std::size_t n_important,
                                        const ImportanceOptions& options = {}) {
  if (!rr.models_stored) throw Error("importance needs a resample result with stored models");
  const Task& task = rr.task;
  const auto& features = task.feature_names;
  const std::size_t folds = rr.iterations.size();
  std::vector<std::vector<std::vector<double>>> values(
      measure_ids.size(),
      std::vector<std::vector<double>>(features.size(), std::vector<double>(folds, 0.0)));
  std::vector<EffectGrid> grids;
  for (const auto& f : features) grids.push_back(build_grid(task, f, options.grid_size));
  const auto classes = effect_classes(task);

  parallel_for(folds, options.workers, [&](std::size_t i) {
    const auto& it = rr.iterations[i];
    Frame test = task.frame->rows(it.test);
    Truth truth = truth_for(task, it.test);
    for (std::size_t m = 0; m < measure_ids.size(); ++m) {
      const std::string& id = measure_ids[m];
      if (id == "pdp") {
        for (std::size_t f = 0; f < features.size(); ++f) {
          double s = 0.0;
          for (const auto& c : classes) s += pdp_importance(pdp(*it.model, test, grids[f], c));
          values[m][f][i] = s / static_cast<double>(classes.size());
        }
      } else if (id.starts_with("pfi.")) {
        auto v = pfi(*it.model, test, truth, measure_by_id(id.substr(4)), options.repetitions,
                     derive_seed(options.seed, {i}));
        for (std::size_t f = 0; f < features.size(); ++f) values[m][f][i] = v[f];
      } else {
        throw UsageError("unknown importance measure " + id);
      }
    }
  });
  return build_importance_table(measure_ids, features, values, n_important);
}

}  // namespace modelsum
