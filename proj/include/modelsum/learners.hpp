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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modelsum/learner.hpp"
#include "modelsum/learners/featureless.hpp"
#include "modelsum/learners/linear.hpp"
#include "modelsum/learners/tree.hpp"

namespace modelsum {

/// Trains `learner` on the given rows of `task`. Deterministic in
/// (learner, task, rows, seed).
inline FittedModel fit(const LearnerSpec& learner, const Task& task,
                       std::span<const std::size_t> rows, std::uint64_t seed) {
  if (rows.empty()) throw Error("cannot fit on an empty row set");
  for (std::size_t r : rows) {
    if (r >= task.n_rows()) throw Error("training row index out of range");
  }
  if (!learner.supports(task.type)) {
    throw Error("learner " + learner.id() + " does not support " +
                std::string(to_string(task.type)) + " tasks");
  }
  const PredictType predict_type = learner.resolved_predict_type(task.type);
  if (predict_type == PredictType::probability && task.type == TaskType::regression) {
    throw Error("probability predictions require a classification task");
  }

  TrainingData data = training_data(task, rows);
  if (task.is_classification()) {
    bool constant = true;
    for (double y : data.y) {
      if (y != data.y.front()) {
        constant = false;
        break;
      }
    }
    if (constant) throw Error("training rows contain a single class");
  }

  std::vector<std::string> warnings;
  std::shared_ptr<const Predictor> impl;
  const std::string& id = learner.id();
  if (id == "featureless") {
    impl = learners::fit_featureless(data);
  } else if (id == "linear") {
    impl = learners::fit_linear(data, warnings);
  } else if (id == "logistic") {
    impl = learners::fit_logistic(data, learner, warnings);
  } else if (id == "tree") {
    impl = learners::fit_tree(data, learner, seed);
  } else if (id == "random_forest") {
    impl = learners::fit_random_forest(data, learner, seed);
  } else {
    throw UsageError("unknown learner " + id);
  }
  std::vector<std::string> levels;
  if (task.is_classification()) levels = task.class_levels();
  return FittedModel(learner, task.type, predict_type, std::move(data.features), std::move(levels),
                     std::move(impl), std::move(warnings));
}

inline FittedModel fit(const LearnerSpec& learner, const Task& task, std::uint64_t seed) {
  std::vector<std::size_t> rows(task.n_rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return fit(learner, task, rows, seed);
}

}  // namespace modelsum
