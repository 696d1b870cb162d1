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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelsum/error.hpp"
#include "modelsum/frame.hpp"

namespace modelsum {

enum class TaskType { regression, binary_classification, multiclass_classification };

inline std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::regression: return "regression";
    case TaskType::binary_classification: return "binary_classification";
    case TaskType::multiclass_classification: return "multiclass_classification";
  }
  return "?";
}

/// A frame plus column roles. Immutable once built; the frame is shared.
struct Task {
  std::shared_ptr<const Frame> frame;
  std::string target;
  TaskType type = TaskType::regression;
  std::optional<std::string> positive_class;
  std::optional<std::string> protected_attribute;
  bool protected_is_feature = false;
  std::vector<std::string> feature_names;

  bool is_classification() const { return type != TaskType::regression; }
  const Column& target_column() const { return frame->column(target); }
  std::size_t n_rows() const { return frame->n_rows(); }

  /// Number of target classes; 1 for regression (the single response output).
  std::size_t n_outputs() const {
    return is_classification() ? target_column().n_levels() : 1;
  }

  const std::vector<std::string>& class_levels() const {
    return target_column().levels();
  }

  /// Level index of the positive class (binary tasks only).
  std::uint32_t positive_index() const {
    if (type != TaskType::binary_classification || !positive_class) {
      throw Error("task has no positive class");
    }
    return *target_column().level_index(*positive_class);
  }
};

struct TaskOptions {
  std::optional<std::string> positive_class;
  std::optional<std::string> protected_attribute;
  bool keep_protected_as_feature = false;
};

inline Task make_task(std::shared_ptr<const Frame> frame, const std::string& target,
                      const TaskOptions& options = {}) {
  if (!frame) throw Error("task needs a frame");
  if (!frame->has_column(target)) throw Error("target column " + target + " not found");
  if (frame->n_rows() == 0) throw Error("task needs at least one row");
  const Column& y = frame->column(target);

  Task task;
  task.frame = frame;
  task.target = target;

  if (y.is_numeric()) {
    if (options.positive_class) {
      throw Error("positive class given for numeric target " + target);
    }
    auto vals = y.values();
    bool constant = true;
    for (double v : vals) {
      if (v != vals.front()) {
        constant = false;
        break;
      }
    }
    if (constant) throw Error("target " + target + " is constant");
    task.type = TaskType::regression;
  } else {
    std::vector<bool> present(y.n_levels(), false);
    for (std::size_t r = 0; r < y.size(); ++r) present[y.code(r)] = true;
    std::size_t n_present = 0;
    for (bool p : present) n_present += p;
    if (n_present < 2) throw Error("target " + target + " has a single observed class");
    if (y.n_levels() == 2) {
      task.type = TaskType::binary_classification;
      std::string positive = options.positive_class.value_or(y.levels().front());
      if (!y.level_index(positive)) {
        throw Error("positive class '" + positive + "' is not a level of " + target);
      }
      task.positive_class = positive;
    } else {
      if (options.positive_class) {
        throw Error("positive class is only defined for binary targets");
      }
      task.type = TaskType::multiclass_classification;
    }
  }

  if (options.protected_attribute) {
    const std::string& pa = *options.protected_attribute;
    if (!frame->has_column(pa)) throw Error("protected attribute " + pa + " not found");
    if (pa == target) throw Error("protected attribute cannot be the target");
    const Column& col = frame->column(pa);
    if (!col.is_categorical()) throw Error("protected attribute " + pa + " must be categorical");
    if (col.n_levels() < 2) throw Error("protected attribute " + pa + " needs at least 2 levels");
    task.protected_attribute = pa;
    task.protected_is_feature = options.keep_protected_as_feature;
  }

  for (const auto& c : frame->columns()) {
    if (c.name() == target) continue;
    if (task.protected_attribute && c.name() == *task.protected_attribute &&
        !task.protected_is_feature) {
      continue;
    }
    task.feature_names.push_back(c.name());
  }
  return task;
}

inline Task make_task(Frame frame, const std::string& target, const TaskOptions& options = {}) {
  return make_task(std::make_shared<const Frame>(std::move(frame)), target, options);
}

/// Ground truth for a set of rows, in row order.
struct Truth {
  TaskType type = TaskType::regression;
  std::vector<double> response;
  std::vector<std::uint32_t> labels;
  std::size_t n_classes = 0;
  std::uint32_t positive = 0;

  std::size_t size() const {
    return type == TaskType::regression ? response.size() : labels.size();
  }
};

inline Truth truth_for(const Task& task, std::span<const std::size_t> rows) {
  Truth t;
  t.type = task.type;
  const Column& y = task.target_column();
  if (task.is_classification()) {
    t.n_classes = y.n_levels();
    if (task.type == TaskType::binary_classification) t.positive = task.positive_index();
    t.labels.reserve(rows.size());
    for (std::size_t r : rows) t.labels.push_back(y.code(r));
  } else {
    t.n_classes = 1;
    t.response.reserve(rows.size());
    for (std::size_t r : rows) t.response.push_back(y[r]);
  }
  return t;
}

}  // namespace modelsum
