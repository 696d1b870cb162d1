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

// Partial dependence (PDP) and accumulated local effect (ALE) curves.
//
// A grid is built once per feature from the full task data and shared by all
// folds, so fold curves can be averaged pointwise.
//
// ALE on a numeric grid g_0 < ... < g_{G-1}: a row with value x belongs to
// interval k (1 <= k < G) when g_{k-1} < x <= g_k; rows at g_0 belong to
// interval 1. The local effect of interval k is the mean over its rows of
// f(x, g_k) - f(x, g_{k-1}); the curve at g_k is the sum of local effects up
// to k, minus the count-weighted mean of the curve, where grid point g_k
// carries the count of interval k and g_0 carries none. Categorical features
// follow the declared level order: rows are grouped by their own level, the
// local effect of level k is f(x, level k) - f(x, level k-1) averaged over
// rows of level k, and each level carries its own row count. An interval
// (or level) without rows takes its local effect from the rows of the
// nearest non-empty one, the lower on ties, and the curve is flagged.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modelsum/error.hpp"
#include "modelsum/learner.hpp"
#include "modelsum/task.hpp"

namespace modelsum {

enum class EffectMethod { pdp, ale };

inline std::string_view to_string(EffectMethod m) { return m == EffectMethod::pdp ? "pdp" : "ale"; }

inline constexpr std::size_t kDefaultGridSize = 20;

struct EffectGrid {
  std::string feature;
  ColumnKind kind = ColumnKind::numeric;
  /// Numeric grid values, or level codes 0..L-1 for categorical features.
  std::vector<double> points;
  /// Level names (categorical only).
  std::vector<std::string> labels;
  bool degenerate = false;

  std::size_t size() const { return points.size(); }
  friend bool operator==(const EffectGrid&, const EffectGrid&) = default;
};

/// Numeric: `grid_size` equidistant points from the observed minimum to the
/// maximum, or the sorted distinct values when there are fewer of those.
/// Categorical: all levels in declared order.
inline EffectGrid build_grid(const Column& column, std::size_t grid_size = kDefaultGridSize) {
  if (grid_size < 2) throw UsageError("grid size must be at least 2");
  EffectGrid g;
  g.feature = column.name();
  g.kind = column.kind();
  if (column.is_categorical()) {
    for (std::size_t l = 0; l < column.n_levels(); ++l) g.points.push_back(static_cast<double>(l));
    g.labels = column.levels();
    g.degenerate = g.points.size() < 2;
    return g;
  }
  std::vector<double> distinct(column.values().begin(), column.values().end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.empty()) throw Error("cannot build a grid for an empty column");
  if (distinct.size() <= grid_size) {
    g.points = std::move(distinct);
  } else {
    const double lo = distinct.front();
    const double hi = distinct.back();
    const double step = (hi - lo) / static_cast<double>(grid_size - 1);
    for (std::size_t k = 0; k < grid_size; ++k) {
      g.points.push_back(k + 1 == grid_size ? hi : lo + step * static_cast<double>(k));
    }
    g.points.erase(std::unique(g.points.begin(), g.points.end()), g.points.end());
  }
  g.degenerate = g.points.size() < 2;
  return g;
}

inline EffectGrid build_grid(const Task& task, std::string_view feature,
                             std::size_t grid_size = kDefaultGridSize) {
  return build_grid(task.frame->column(feature), grid_size);
}

/// The model output an effect curve describes.
struct EffectClass {
  std::size_t index = 0;
  std::string label;
};

/// Binary: the positive class. Multiclass: every class (one vs. all).
/// Regression: the single pseudo-class `response`.
inline std::vector<EffectClass> effect_classes(const Task& task) {
  switch (task.type) {
    case TaskType::regression: return {{0, "response"}};
    case TaskType::binary_classification: return {{task.positive_index(), *task.positive_class}};
    case TaskType::multiclass_classification: {
      std::vector<EffectClass> out;
      const auto& levels = task.class_levels();
      for (std::size_t c = 0; c < levels.size(); ++c) out.push_back({c, levels[c]});
      return out;
    }
  }
  return {};
}

struct EffectCurve {
  std::string feature;
  EffectMethod method = EffectMethod::pdp;
  EffectClass cls;
  /// Resampling iteration, or -1 for a cross-fold aggregate.
  int fold = -1;
  EffectGrid grid;
  std::vector<double> values;
  /// ALE: rows per grid point (see header comment). Empty for PDP.
  std::vector<double> counts;
  /// Aggregates only: pointwise sd over the folds used.
  std::vector<double> sd;
  std::size_t folds_used = 0;
  bool degenerate = false;
  bool empty_intervals = false;
};

namespace detail {

inline std::size_t model_feature_index(const FittedModel& model, std::string_view feature) {
  const auto& f = model.features();
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j].name == feature) return j;
  }
  throw Error("model does not use feature " + std::string(feature));
}

/// Grid points as values of the model's encoding (level codes are re-mapped
/// by name for categorical features).
inline std::vector<double> model_grid_points(const FittedModel& model, std::size_t j,
                                             const EffectGrid& grid) {
  const FeatureInfo& info = model.features()[j];
  if (info.kind != grid.kind) throw Error("grid kind does not match feature " + grid.feature);
  if (grid.kind == ColumnKind::numeric) return grid.points;
  std::vector<double> out;
  for (const auto& label : grid.labels) {
    auto it = std::find(info.levels.begin(), info.levels.end(), label);
    if (it == info.levels.end()) throw Error("grid level " + label + " unknown to model");
    out.push_back(static_cast<double>(it - info.levels.begin()));
  }
  return out;
}

/// Interval index k in [1, G-1] for numeric value x.
inline std::size_t ale_interval(std::span<const double> points, double x) {
  auto it = std::lower_bound(points.begin(), points.end(), x);
  auto k = static_cast<std::size_t>(it - points.begin());
  return std::clamp<std::size_t>(k, 1, points.size() - 1);
}

/// Position of a categorical row value in the grid's level order.
/// Nearest group with rows, the lower one on ties.
inline std::size_t nearest_nonempty(const std::vector<double>& counts, std::size_t k) {
  for (std::size_t d = 1; d < counts.size(); ++d) {
    if (k >= d && counts[k - d] > 0.0) return k - d;
    if (k + d < counts.size() && counts[k + d] > 0.0) return k + d;
  }
  throw Error("ale: no interval has rows");
}

inline std::vector<std::size_t> level_positions(std::span<const double> model_codes,
                                                std::span<const double> grid_codes) {
  std::size_t max_code = 0;
  for (double c : grid_codes) max_code = std::max(max_code, static_cast<std::size_t>(c));
  std::vector<std::size_t> pos_of(max_code + 1, SIZE_MAX);
  for (std::size_t k = 0; k < grid_codes.size(); ++k) pos_of[static_cast<std::size_t>(grid_codes[k])] = k;
  std::vector<std::size_t> out(model_codes.size());
  for (std::size_t i = 0; i < model_codes.size(); ++i) {
    const auto c = static_cast<std::size_t>(model_codes[i]);
    if (c >= pos_of.size() || pos_of[c] == SIZE_MAX) throw Error("row level missing from grid");
    out[i] = pos_of[c];
  }
  return out;
}

}  // namespace detail

/// Mean model output over all rows with the feature set to each grid value.
/// Rows are summed left to right, then divided by the row count.
inline EffectCurve pdp(const FittedModel& model, const Frame& frame, const EffectGrid& grid,
                       const EffectClass& cls = {}) {
  if (frame.n_rows() == 0) throw Error("pdp needs at least one row");
  EffectCurve curve;
  curve.feature = grid.feature;
  curve.method = EffectMethod::pdp;
  curve.cls = cls;
  curve.grid = grid;
  curve.degenerate = grid.degenerate;

  const std::size_t j = detail::model_feature_index(model, grid.feature);
  const auto points = detail::model_grid_points(model, j, grid);
  BoundColumns bound = model.bind(frame);
  std::vector<std::span<const double>> cols = bound.columns;
  const std::size_t n = frame.n_rows();
  std::vector<double> buffer(n);
  cols[j] = buffer;
  for (double g : points) {
    std::fill(buffer.begin(), buffer.end(), g);
    auto out = model.scores(cols, n, cls.index);
    double sum = 0.0;
    for (double v : out) sum += v;
    curve.values.push_back(sum / static_cast<double>(n));
  }
  return curve;
}

/// Centered accumulated local effects on `grid` (see file comment).
inline EffectCurve ale(const FittedModel& model, const Frame& frame, const EffectGrid& grid,
                       const EffectClass& cls = {}) {
  EffectCurve curve;
  curve.feature = grid.feature;
  curve.method = EffectMethod::ale;
  curve.cls = cls;
  curve.grid = grid;
  const std::size_t G = grid.size();
  curve.values.assign(G, 0.0);
  curve.counts.assign(G, 0.0);
  const std::size_t n = frame.n_rows();
  if (grid.degenerate || n == 0) {
    curve.degenerate = true;
    return curve;
  }

  const std::size_t j = detail::model_feature_index(model, grid.feature);
  const auto points = detail::model_grid_points(model, j, grid);
  BoundColumns bound = model.bind(frame);
  std::vector<std::span<const double>> cols = bound.columns;
  const std::span<const double> x = bound.columns[j];

  // Group k of each row: interval index (numeric) or level position
  // (categorical). Group 0 exists only for categorical features and needs
  // no difference.
  std::vector<std::size_t> group(n);
  if (grid.kind == ColumnKind::numeric) {
    for (std::size_t i = 0; i < n; ++i) group[i] = detail::ale_interval(points, x[i]);
  } else {
    group = detail::level_positions(x, points);
  }
  std::vector<double> lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = group[i];
    upper[i] = points[k];
    lower[i] = points[k == 0 ? 0 : k - 1];
  }
  cols[j] = upper;
  const auto f_upper = model.scores(cols, n, cls.index);
  cols[j] = lower;
  const auto f_lower = model.scores(cols, n, cls.index);

  std::vector<double> local(G, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    curve.counts[group[i]] += 1.0;
    local[group[i]] += f_upper[i] - f_lower[i];
  }
  double acc = 0.0;
  for (std::size_t k = 1; k < G; ++k) {
    if (curve.counts[k] > 0.0) {
      acc += local[k] / curve.counts[k];
    } else {
      curve.empty_intervals = true;
      const std::size_t donor = detail::nearest_nonempty(curve.counts, k);
      std::vector<std::vector<double>> sub(cols.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (group[i] != donor) continue;
        for (std::size_t c = 0; c < cols.size(); ++c) sub[c].push_back(bound.columns[c][i]);
      }
      const std::size_t m = sub[j].size();
      std::vector<std::span<const double>> sub_cols(sub.begin(), sub.end());
      std::fill(sub[j].begin(), sub[j].end(), points[k]);
      const auto up = model.scores(sub_cols, m, cls.index);
      std::fill(sub[j].begin(), sub[j].end(), points[k - 1]);
      const auto down = model.scores(sub_cols, m, cls.index);
      double diff = 0.0;
      for (std::size_t i = 0; i < m; ++i) diff += up[i] - down[i];
      acc += diff / static_cast<double>(m);
    }
    curve.values[k] = acc;
  }
  double weighted = 0.0, total = 0.0;
  for (std::size_t k = 0; k < G; ++k) {
    weighted += curve.counts[k] * curve.values[k];
    total += curve.counts[k];
  }
  const double center = weighted / total;
  for (double& v : curve.values) v -= center;
  return curve;
}

/// ALE main effect at a row value: linear interpolation inside the row's
/// interval for numeric features, the level's value for categorical ones.
/// `x` uses the grid's own encoding (level codes in grid order).
inline double ale_value_at(const EffectCurve& curve, double x) {
  const auto& pts = curve.grid.points;
  if (curve.degenerate || pts.size() < 2) return 0.0;
  if (curve.grid.kind == ColumnKind::categorical) {
    return curve.values[static_cast<std::size_t>(x)];
  }
  const std::size_t k = detail::ale_interval(pts, x);
  const double t = std::clamp((x - pts[k - 1]) / (pts[k] - pts[k - 1]), 0.0, 1.0);
  return curve.values[k - 1] + t * (curve.values[k] - curve.values[k - 1]);
}

/// Pointwise mean and sd of fold curves sharing one grid, method and class.
/// Degenerate fold curves are left out.
inline EffectCurve aggregate_effects(std::span<const EffectCurve> curves) {
  if (curves.empty()) throw Error("no curves to aggregate");
  const EffectCurve& first = curves.front();
  for (const auto& c : curves) {
    if (c.feature != first.feature || c.method != first.method || c.cls.index != first.cls.index ||
        c.grid.points != first.grid.points || c.grid.labels != first.grid.labels) {
      throw Error("cannot aggregate effect curves with mismatched grids");
    }
  }
  EffectCurve agg;
  agg.feature = first.feature;
  agg.method = first.method;
  agg.cls = first.cls;
  agg.fold = -1;
  agg.grid = first.grid;
  const std::size_t G = first.grid.size();
  agg.values.assign(G, 0.0);
  agg.sd.assign(G, 0.0);
  if (first.method == EffectMethod::ale) agg.counts.assign(G, 0.0);

  // Accumulate in fold-id order so the result is independent of input order.
  std::vector<const EffectCurve*> used;
  for (const auto& c : curves) {
    if (!c.degenerate) used.push_back(&c);
    if (c.empty_intervals) agg.empty_intervals = true;
  }
  std::sort(used.begin(), used.end(),
            [](const EffectCurve* a, const EffectCurve* b) { return a->fold < b->fold; });
  agg.folds_used = used.size();
  if (used.empty()) {
    agg.degenerate = true;
    return agg;
  }
  const double m = static_cast<double>(used.size());
  for (std::size_t k = 0; k < G; ++k) {
    double sum = 0.0;
    for (const auto* c : used) sum += c->values[k];
    const double mean = sum / m;
    double ss = 0.0;
    for (const auto* c : used) ss += (c->values[k] - mean) * (c->values[k] - mean);
    agg.values[k] = mean;
    agg.sd[k] = used.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
    if (!agg.counts.empty()) {
      for (const auto* c : used) agg.counts[k] += c->counts[k];
    }
  }
  return agg;
}

}  // namespace modelsum
