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

// Group fairness gaps over a protected attribute.
//
//   dp   = gap in P(yhat = pos)
//   eod  = (gap in TPR + gap in FPR) / 2
//   cuae = (gap in PPV + gap in NPV) / 2
//   reg_mse_gap = gap in MSE (regression)
//
// A gap is the largest absolute pairwise difference among the groups whose
// rate is defined, which is |a - b| for two groups. A composite whose rate
// is undefined for all but one group drops that term and averages the rest.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelsum/error.hpp"
#include "modelsum/learner.hpp"
#include "modelsum/metrics.hpp"
#include "modelsum/task.hpp"

namespace modelsum {

/// Probability threshold used to turn positive-class probabilities into labels.
inline constexpr double kFairnessThreshold = 0.5;

inline const std::vector<std::string>& fairness_measure_ids() {
  static const std::vector<std::string> ids = {"dp", "eod", "cuae", "reg_mse_gap"};
  return ids;
}

inline std::vector<std::string> default_fairness_measures(TaskType t) {
  if (t == TaskType::regression) return {"reg_mse_gap"};
  return {"dp", "cuae", "eod"};
}

struct FairnessValue {
  double value = std::numeric_limits<double>::quiet_NaN();
  /// Some group had an empty denominator for one of the rates.
  bool renormalized = false;
  bool defined() const { return !std::isnan(value); }
};

namespace detail {

struct Rate {
  double num = 0, den = 0;
};

/// Max pairwise absolute gap over defined rates; nullopt if fewer than two.
/// The gap between the extreme rates is formed by cross-multiplication so
/// it is rounded once.
inline std::optional<double> max_gap(const std::vector<Rate>& rates, bool& skipped) {
  const Rate* lo = nullptr;
  const Rate* hi = nullptr;
  std::size_t defined = 0;
  for (const auto& r : rates) {
    if (r.den == 0) {
      skipped = true;
      continue;
    }
    ++defined;
    if (!lo || r.num * lo->den < lo->num * r.den) lo = &r;
    if (!hi || r.num * hi->den > hi->num * r.den) hi = &r;
  }
  if (defined < 2) return std::nullopt;
  return (hi->num * lo->den - lo->num * hi->den) / (hi->den * lo->den);
}

inline FairnessValue composite(std::optional<double> a, std::optional<double> b, bool skipped) {
  FairnessValue out;
  out.renormalized = skipped;
  if (a && b) {
    out.value = (*a + *b) / 2.0;
  } else if (a || b) {
    out.value = a ? *a : *b;
    out.renormalized = true;
  }
  return out;
}

}  // namespace detail

/// Classification gaps from hard labels. `groups` holds group codes in
/// [0, n_groups). Fewer than two groups present gives an undefined value.
inline FairnessValue fairness_measure(std::string_view id, std::span<const std::uint32_t> predicted,
                                      std::span<const std::uint32_t> truth,
                                      std::span<const std::uint32_t> groups, std::size_t n_groups,
                                      std::uint32_t positive) {
  if (predicted.size() != truth.size() || truth.size() != groups.size()) {
    throw Error("fairness inputs have different lengths");
  }
  std::vector<detail::Rate> pos_rate(n_groups), tpr(n_groups), fpr(n_groups), ppv(n_groups),
      npv(n_groups);
  std::vector<std::size_t> members(n_groups, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto g = groups[i];
    if (g >= n_groups) throw Error("group code out of range");
    ++members[g];
    const bool p = predicted[i] == positive;
    const bool t = truth[i] == positive;
    pos_rate[g].num += p;
    pos_rate[g].den += 1;
    if (t) {
      tpr[g].num += p;
      tpr[g].den += 1;
    } else {
      fpr[g].num += p;
      fpr[g].den += 1;
    }
    if (p) {
      ppv[g].num += t;
      ppv[g].den += 1;
    } else {
      npv[g].num += !t;
      npv[g].den += 1;
    }
  }
  // Absent groups take no part in any comparison.
  auto present = [&](std::vector<detail::Rate> rates) {
    std::vector<detail::Rate> out;
    for (std::size_t g = 0; g < n_groups; ++g) {
      if (members[g] > 0) out.push_back(rates[g]);
    }
    return out;
  };
  const auto n_present = std::count_if(members.begin(), members.end(), [](auto m) { return m > 0; });
  if (n_present < 2) return {};
  bool skipped = false;
  if (id == "dp") {
    FairnessValue out;
    out.value = *detail::max_gap(present(pos_rate), skipped);
    return out;
  }
  if (id == "eod") {
    auto a = detail::max_gap(present(tpr), skipped);
    auto b = detail::max_gap(present(fpr), skipped);
    return detail::composite(a, b, skipped);
  }
  if (id == "cuae") {
    auto a = detail::max_gap(present(ppv), skipped);
    auto b = detail::max_gap(present(npv), skipped);
    return detail::composite(a, b, skipped);
  }
  throw UsageError("unknown classification fairness measure " + std::string(id));
}

/// reg_mse_gap from regression predictions.
inline FairnessValue regression_fairness(std::span<const double> predicted,
                                         std::span<const double> truth,
                                         std::span<const std::uint32_t> groups,
                                         std::size_t n_groups) {
  std::vector<detail::Rate> mse(n_groups);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = truth[i] - predicted[i];
    mse[groups[i]].num += e * e;
    mse[groups[i]].den += 1;
  }
  bool skipped = false;
  auto gap = detail::max_gap(mse, skipped);
  FairnessValue out;
  if (gap) out.value = *gap;
  return out;
}

/// Evaluates a fairness measure on one iteration's predictions. Probability
/// predictions are thresholded at kFairnessThreshold for the positive class.
inline FairnessValue fairness_measure(std::string_view id, const Prediction& prediction,
                                      const Truth& truth, std::span<const std::uint32_t> groups,
                                      std::size_t n_groups) {
  if (truth.type == TaskType::regression) {
    if (id != "reg_mse_gap") throw UsageError(std::string(id) + " is not a regression fairness measure");
    return regression_fairness(prediction.response, truth.response, groups, n_groups);
  }
  if (truth.type != TaskType::binary_classification) {
    throw Error("fairness measures need a binary classification or regression task");
  }
  if (id == "reg_mse_gap") throw UsageError("reg_mse_gap needs a regression task");
  std::vector<std::uint32_t> labels = prediction.labels;
  if (prediction.has_probabilities()) {
    const std::uint32_t negative = 1 - truth.positive;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      labels[i] = prediction.probability(i, truth.positive) >= kFairnessThreshold ? truth.positive
                                                                                   : negative;
    }
  }
  return fairness_measure(id, labels, truth.labels, groups, n_groups, truth.positive);
}

/// Protected attribute from the control setting, else the task role.
inline std::optional<std::string> resolve_protected(const Task& task,
                                                    const std::optional<std::string>& control) {
  if (control) return control;
  return task.protected_attribute;
}

}  // namespace modelsum
