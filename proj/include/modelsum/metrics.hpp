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

// Performance measures, confusion matrices and resampling aggregation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelsum/error.hpp"
#include "modelsum/learner.hpp"
#include "modelsum/resampling.hpp"
#include "modelsum/task.hpp"

namespace modelsum {

enum class Direction { minimize, maximize };
enum class Needs { probabilities, hard_labels, response };
enum class MeasureTasks { binary, classification, regression };
enum class Aggregation { macro, micro };

inline std::string_view to_string(Aggregation a) { return a == Aggregation::macro ? "macro" : "micro"; }

struct Measure {
  std::string id;
  Direction direction;
  MeasureTasks tasks;
  Needs needs;
  bool supports_micro = true;

  bool applies_to(TaskType t) const {
    switch (tasks) {
      case MeasureTasks::binary: return t == TaskType::binary_classification;
      case MeasureTasks::classification: return t != TaskType::regression;
      case MeasureTasks::regression: return t == TaskType::regression;
    }
    return false;
  }
};

inline const std::vector<Measure>& measure_catalog() {
  using D = Direction;
  using T = MeasureTasks;
  using N = Needs;
  static const std::vector<Measure> catalog = {
      {"auc", D::maximize, T::binary, N::probabilities, true},
      {"fbeta", D::maximize, T::binary, N::hard_labels, true},
      {"bbrier", D::minimize, T::binary, N::probabilities, true},
      {"mcc", D::maximize, T::binary, N::hard_labels, true},
      {"acc", D::maximize, T::classification, N::hard_labels, true},
      {"ce", D::minimize, T::classification, N::hard_labels, true},
      {"mbrier", D::minimize, T::classification, N::probabilities, true},
      {"rmse", D::minimize, T::regression, N::response, true},
      {"mse", D::minimize, T::regression, N::response, true},
      {"mae", D::minimize, T::regression, N::response, true},
      {"rsq", D::maximize, T::regression, N::response, true},
      {"medae", D::minimize, T::regression, N::response, true},
  };
  return catalog;
}

inline const Measure& measure_by_id(std::string_view id) {
  for (const auto& m : measure_catalog()) {
    if (m.id == id) return m;
  }
  throw UsageError("unknown measure " + std::string(id));
}

inline std::vector<Measure> default_measures(TaskType t) {
  std::vector<std::string_view> ids;
  switch (t) {
    case TaskType::binary_classification: ids = {"auc", "fbeta", "bbrier", "mcc"}; break;
    case TaskType::multiclass_classification: ids = {"acc", "ce", "mbrier"}; break;
    case TaskType::regression: ids = {"rmse", "mae", "rsq", "medae"}; break;
  }
  std::vector<Measure> out;
  for (auto id : ids) out.push_back(measure_by_id(id));
  return out;
}

/// Level-ordered counts; rows are the true class, columns the prediction.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> levels)
      : levels_(std::move(levels)), counts_(levels_.size() * levels_.size(), 0) {}

  const std::vector<std::string>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * levels_.size() + predicted];
  }
  std::uint64_t& at(std::size_t truth, std::size_t predicted) {
    return counts_[truth * levels_.size() + predicted];
  }
  std::uint64_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    if (o.levels_ != levels_) throw Error("cannot add confusion matrices with different levels");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
    return *this;
  }
  friend ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) { return a += b; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> levels_;
  std::vector<std::uint64_t> counts_;
};

inline ConfusionMatrix confusion(std::span<const std::uint32_t> predicted,
                                 std::span<const std::uint32_t> truth,
                                 std::vector<std::string> levels) {
  if (predicted.size() != truth.size()) throw Error("prediction/truth length mismatch");
  ConfusionMatrix cm(std::move(levels));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= cm.size() || predicted[i] >= cm.size()) throw Error("label out of range");
    ++cm.at(truth[i], predicted[i]);
  }
  return cm;
}

/// Binary counts with respect to the positive class.
struct BinaryCounts {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

inline BinaryCounts binary_counts(std::span<const std::uint32_t> predicted,
                                  std::span<const std::uint32_t> truth, std::uint32_t positive) {
  BinaryCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == positive;
    const bool t = truth[i] == positive;
    if (p && t) c.tp += 1;
    else if (p) c.fp += 1;
    else if (t) c.fn += 1;
    else c.tn += 1;
  }
  return c;
}

namespace measures {

/// Mann-Whitney AUC: share of (positive, negative) pairs ranked correctly,
/// ties counted one half. Computed from midranks in O(n log n).
inline double auc(std::span<const double> scores, std::span<const bool> is_positive) {
  const std::size_t n = scores.size();
  if (is_positive.size() != n) throw Error("auc: length mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;  // sum of midranks of positives, ranks doubled to stay integral
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double twice_midrank = static_cast<double>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) {
      if (is_positive[order[k]]) {
        rank_sum += twice_midrank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw UndefinedMeasure("auc undefined: only one class present");
  const double u = rank_sum / 2.0 - n_pos * (n_pos + 1.0) / 2.0;
  return u / (n_pos * n_neg);
}

inline double fbeta(const BinaryCounts& c, double beta = 1.0) {
  const double precision_den = c.tp + c.fp;
  const double recall_den = c.tp + c.fn;
  if (precision_den == 0.0 || recall_den == 0.0) {
    throw UndefinedMeasure("fbeta undefined: no predicted or no true positives");
  }
  const double p = c.tp / precision_den;
  const double r = c.tp / recall_den;
  if (p + r == 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

/// Returns 0 when a marginal is empty; `degenerate` reports that case.
inline double mcc(const BinaryCounts& c, bool* degenerate = nullptr) {
  const double den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn);
  if (degenerate) *degenerate = den == 0.0;
  if (den == 0.0) return 0.0;
  return (c.tp * c.tn - c.fp * c.fn) / std::sqrt(den);
}

inline double bbrier(std::span<const double> p_positive, std::span<const bool> is_positive) {
  double s = 0.0;
  for (std::size_t i = 0; i < p_positive.size(); ++i) {
    const double d = p_positive[i] - (is_positive[i] ? 1.0 : 0.0);
    s += d * d;
  }
  return s / static_cast<double>(p_positive.size());
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace measures

inline bool mcc_degenerate(const Prediction& prediction, const Truth& truth) {
  bool deg = false;
  measures::mcc(binary_counts(prediction.labels, truth.labels, truth.positive), &deg);
  return deg;
}

inline double evaluate_measure(const Measure& m, const Prediction& prediction, const Truth& truth) {
  if (!m.applies_to(truth.type)) {
    throw Error("measure " + m.id + " does not apply to " + std::string(to_string(truth.type)) +
                " tasks");
  }
  if (prediction.size() != truth.size()) throw Error("prediction/truth length mismatch");
  if (prediction.size() == 0) throw UndefinedMeasure(m.id + " undefined on zero rows");
  if (m.needs == Needs::probabilities && !prediction.has_probabilities()) {
    throw Error("measure " + m.id + " needs probability predictions");
  }
  const std::size_t n = truth.size();
  const double nd = static_cast<double>(n);

  if (truth.type == TaskType::regression) {
    const auto& y = truth.response;
    const auto& f = prediction.response;
    if (m.id == "rmse" || m.id == "mse") {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (y[i] - f[i]) * (y[i] - f[i]);
      return m.id == "mse" ? s / nd : std::sqrt(s / nd);
    }
    if (m.id == "mae") {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::abs(y[i] - f[i]);
      return s / nd;
    }
    if (m.id == "medae") {
      std::vector<double> e(n);
      for (std::size_t i = 0; i < n; ++i) e[i] = std::abs(y[i] - f[i]);
      return measures::median(std::move(e));
    }
    if (m.id == "rsq") {
      double mean = 0.0;
      for (double v : y) mean += v;
      mean /= nd;
      double sse = 0.0, sst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sse += (y[i] - f[i]) * (y[i] - f[i]);
        sst += (y[i] - mean) * (y[i] - mean);
      }
      if (sst == 0.0) throw UndefinedMeasure("rsq undefined: constant truth");
      return 1.0 - sse / sst;
    }
  }

  const auto& labels = truth.labels;
  if (m.id == "acc" || m.id == "ce") {
    double correct = 0.0;
    for (std::size_t i = 0; i < n; ++i) correct += prediction.labels[i] == labels[i];
    return m.id == "acc" ? correct / nd : 1.0 - correct / nd;
  }
  if (m.id == "mbrier") {
    const std::size_t k = prediction.n_classes;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        const double d = prediction.probability(i, c) - (labels[i] == c ? 1.0 : 0.0);
        s += d * d;
      }
    }
    return s / nd;
  }
  if (m.id == "auc" || m.id == "bbrier") {
    std::unique_ptr<bool[]> is_pos(new bool[n]);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      is_pos[i] = labels[i] == truth.positive;
      p[i] = prediction.probability(i, truth.positive);
    }
    std::span<const bool> pos(is_pos.get(), n);
    return m.id == "auc" ? measures::auc(p, pos) : measures::bbrier(p, pos);
  }
  const BinaryCounts c = binary_counts(prediction.labels, labels, truth.positive);
  if (m.id == "fbeta") return measures::fbeta(c);
  if (m.id == "mcc") return measures::mcc(c);
  throw Error("measure " + m.id + " not implemented");
}

struct AggregatedMeasure {
  std::string id;
  Direction direction = Direction::maximize;
  Aggregation mode = Aggregation::macro;
  /// NaN when no fold was scorable.
  double mean = std::numeric_limits<double>::quiet_NaN();
  /// Sample sd across folds (macro only).
  std::optional<double> sd;
  /// Per-fold values, NaN where the measure was undefined (macro only).
  std::vector<double> per_fold;
  std::vector<std::string> notes;
};

/// Pools held-out predictions of all iterations in iteration order.
inline std::pair<Prediction, Truth> pooled_predictions(const ResampleResult& rr) {
  Prediction pooled;
  pooled.type = rr.task.type;
  std::vector<std::size_t> rows;
  for (const auto& it : rr.iterations) {
    const Prediction& p = it.prediction;
    pooled.n_classes = p.n_classes;
    pooled.row_ids.insert(pooled.row_ids.end(), p.row_ids.begin(), p.row_ids.end());
    pooled.response.insert(pooled.response.end(), p.response.begin(), p.response.end());
    pooled.prob.insert(pooled.prob.end(), p.prob.begin(), p.prob.end());
    pooled.labels.insert(pooled.labels.end(), p.labels.begin(), p.labels.end());
  }
  Truth t = truth_for(rr.task, pooled.row_ids);
  return {std::move(pooled), std::move(t)};
}

/// Mean and sample sd (n - 1); a single value has sd 0 by convention.
struct MeanSd {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
};

inline MeanSd mean_sd(std::span<const double> values) {
  MeanSd r;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++r.n;
  }
  if (r.n == 0) return r;
  r.mean = sum / static_cast<double>(r.n);
  // Identical values report themselves with sd 0 rather than rounding noise.
  const double* first = nullptr;
  bool constant = true;
  for (const double& v : values) {
    if (std::isnan(v)) continue;
    if (!first) first = &v;
    constant &= v == *first;
  }
  if (constant) {
    r.mean = *first;
    r.sd = 0.0;
    return r;
  }
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) ss += (v - r.mean) * (v - r.mean);
  }
  r.sd = std::sqrt(ss / static_cast<double>(r.n - 1));
  return r;
}

inline AggregatedMeasure aggregate(const Measure& m, const ResampleResult& rr, Aggregation mode) {
  AggregatedMeasure out;
  out.id = m.id;
  out.direction = m.direction;
  out.mode = mode;
  if (mode == Aggregation::micro) {
    if (!m.supports_micro) throw UsageError("measure " + m.id + " does not support micro aggregation");
    auto [pred, truth] = pooled_predictions(rr);
    try {
      out.mean = evaluate_measure(m, pred, truth);
    } catch (const UndefinedMeasure& e) {
      out.notes.push_back(e.what());
    }
    if (m.id == "mcc" && mcc_degenerate(pred, truth)) {
      out.notes.push_back("mcc: zero denominator, reported as 0");
    }
    return out;
  }
  for (std::size_t i = 0; i < rr.iterations.size(); ++i) {
    const auto& it = rr.iterations[i];
    Truth truth = truth_for(rr.task, it.prediction.row_ids);
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      v = evaluate_measure(m, it.prediction, truth);
      if (m.id == "mcc" && mcc_degenerate(it.prediction, truth)) {
        out.notes.push_back("iteration " + std::to_string(i + 1) +
                            ": mcc zero denominator, reported as 0");
      }
    } catch (const UndefinedMeasure& e) {
      out.notes.push_back("iteration " + std::to_string(i + 1) + " excluded: " + e.what());
    }
    out.per_fold.push_back(v);
  }
  MeanSd ms = mean_sd(out.per_fold);
  out.mean = ms.mean;
  if (ms.n > 0) out.sd = ms.sd;
  if (ms.n == 1) out.notes.push_back("single scored iteration: sd reported as 0");
  return out;
}

}  // namespace modelsum
