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

// Learner specifications, fitted models and predictions.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "modelsum/error.hpp"
#include "modelsum/frame.hpp"
#include "modelsum/task.hpp"

namespace modelsum {

enum class PredictType { response, probability };

inline std::string_view to_string(PredictType p) {
  return p == PredictType::response ? "response" : "prob";
}

using ParamValue = std::variant<std::int64_t, double, bool>;

inline std::string format_param(const ParamValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  std::ostringstream out;
  out.precision(15);
  out << std::get<double>(v);
  return out.str();
}

struct Hyperparameter {
  std::string name;
  ParamValue value;
  ParamValue default_value;
};

/// An untrained learner: algorithm id, prediction type and hyperparameters
/// in declaration order, each with its default.
class LearnerSpec {
 public:
  LearnerSpec() = default;
  LearnerSpec(std::string id, std::vector<Hyperparameter> params)
      : id_(std::move(id)), params_(std::move(params)) {}

  const std::string& id() const { return id_; }
  const std::vector<Hyperparameter>& params() const { return params_; }

  /// Unset means: probability for classification, response for regression.
  std::optional<PredictType> predict_type() const { return predict_type_; }
  void set_predict_type(PredictType p) {
    if (p == PredictType::probability && id_ == "linear") {
      throw UsageError("learner linear cannot predict probabilities");
    }
    predict_type_ = p;
  }

  PredictType resolved_predict_type(TaskType t) const {
    if (predict_type_) return *predict_type_;
    return t == TaskType::regression ? PredictType::response : PredictType::probability;
  }

  void set(std::string_view name, ParamValue value) {
    Hyperparameter& p = find(name);
    if (p.default_value.index() != value.index()) {
      if (std::holds_alternative<double>(p.default_value) &&
          std::holds_alternative<std::int64_t>(value)) {
        value = static_cast<double>(std::get<std::int64_t>(value));
      } else {
        throw UsageError("wrong value type for hyperparameter " + std::string(name));
      }
    }
    p.value = value;
  }

  /// Parses `text` according to the parameter's declared type.
  void set(std::string_view name, std::string_view text) {
    Hyperparameter& p = find(name);
    std::string s(text);
    try {
      if (std::holds_alternative<bool>(p.default_value)) {
        if (s == "true" || s == "TRUE" || s == "1") {
          p.value = true;
        } else if (s == "false" || s == "FALSE" || s == "0") {
          p.value = false;
        } else {
          throw UsageError("");
        }
      } else if (std::holds_alternative<std::int64_t>(p.default_value)) {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw UsageError("");
        p.value = static_cast<std::int64_t>(v);
      } else {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw UsageError("");
        p.value = v;
      }
    } catch (const std::exception&) {
      throw UsageError("invalid value '" + s + "' for hyperparameter " + std::string(name));
    }
  }

  std::int64_t get_int(std::string_view name) const {
    return std::get<std::int64_t>(find(name).value);
  }
  double get_double(std::string_view name) const { return std::get<double>(find(name).value); }
  bool get_bool(std::string_view name) const { return std::get<bool>(find(name).value); }

  /// Settings that differ from their defaults, in declaration order.
  std::vector<std::pair<std::string, std::string>> non_default() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : params_) {
      if (p.value != p.default_value) out.emplace_back(p.name, format_param(p.value));
    }
    return out;
  }

  /// Canonical spec string, e.g. `random_forest:num_trees=100`.
  std::string to_string() const {
    std::string s = id_;
    auto nd = non_default();
    bool first = true;
    auto add = [&](const std::string& k, const std::string& v) {
      s += first ? ":" : ",";
      s += k + "=" + v;
      first = false;
    };
    if (predict_type_) add("predict_type", std::string(modelsum::to_string(*predict_type_)));
    for (const auto& [k, v] : nd) add(k, v);
    return s;
  }

  bool supports(TaskType t) const {
    if (id_ == "linear") return t == TaskType::regression;
    if (id_ == "logistic") return t == TaskType::binary_classification;
    return true;
  }

  friend bool operator==(const LearnerSpec& a, const LearnerSpec& b) {
    if (a.id_ != b.id_ || a.predict_type_ != b.predict_type_) return false;
    if (a.params_.size() != b.params_.size()) return false;
    for (std::size_t i = 0; i < a.params_.size(); ++i) {
      if (a.params_[i].name != b.params_[i].name || a.params_[i].value != b.params_[i].value) {
        return false;
      }
    }
    return true;
  }

 private:
  Hyperparameter& find(std::string_view name) {
    for (auto& p : params_) {
      if (p.name == name) return p;
    }
    throw UsageError("learner " + id_ + " has no hyperparameter " + std::string(name));
  }
  const Hyperparameter& find(std::string_view name) const {
    return const_cast<LearnerSpec*>(this)->find(name);
  }

  std::string id_;
  std::optional<PredictType> predict_type_;
  std::vector<Hyperparameter> params_;
};

inline LearnerSpec make_learner(std::string_view id) {
  auto hp = [](std::string name, ParamValue v) { return Hyperparameter{std::move(name), v, v}; };
  using I = std::int64_t;
  if (id == "featureless") return LearnerSpec("featureless", {});
  if (id == "linear") return LearnerSpec("linear", {});
  if (id == "logistic") {
    return LearnerSpec("logistic", {hp("max_iter", I{100}), hp("tol", 1e-8)});
  }
  // min_node_size 0 selects 1 for classification and 5 for regression;
  // mtry 0 selects all features (tree) or floor(sqrt(p)) (forest).
  if (id == "tree") {
    return LearnerSpec("tree", {hp("max_depth", I{30}), hp("min_node_size", I{0}),
                                hp("mtry", I{0})});
  }
  if (id == "random_forest") {
    return LearnerSpec("random_forest",
                       {hp("num_trees", I{500}), hp("mtry", I{0}), hp("min_node_size", I{0}),
                        hp("max_depth", I{30}), hp("replace", true),
                        hp("sample_fraction", 1.0)});
  }
  throw UsageError("unknown learner " + std::string(id));
}

/// Parses `id[:key=value[,key=value...]]`. The pseudo-parameter
/// `predict_type` accepts `response` or `prob`.
inline LearnerSpec parse_learner_spec(std::string_view text) {
  auto colon = text.find(':');
  LearnerSpec spec = make_learner(text.substr(0, colon));
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw UsageError("expected key=value in learner spec, got '" + std::string(item) + "'");
    }
    std::string_view key = item.substr(0, eq);
    std::string_view value = item.substr(eq + 1);
    if (key == "predict_type") {
      if (value == "response") {
        spec.set_predict_type(PredictType::response);
      } else if (value == "prob" || value == "probability") {
        spec.set_predict_type(PredictType::probability);
      } else {
        throw UsageError("predict_type must be response or prob");
      }
    } else {
      spec.set(key, value);
    }
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return spec;
}

inline std::vector<std::pair<std::string, std::string>> hyperparameter_summary(
    const LearnerSpec& spec) {
  return spec.non_default();
}

/// Held-out (or any) predictions for a set of rows.
struct Prediction {
  TaskType type = TaskType::regression;
  std::vector<std::size_t> row_ids;
  std::vector<double> response;
  /// Row-major n x n_classes; empty when the model predicts labels only.
  std::vector<double> prob;
  std::vector<std::uint32_t> labels;
  std::size_t n_classes = 0;

  std::size_t size() const { return row_ids.size(); }
  bool has_probabilities() const { return !prob.empty(); }
  double probability(std::size_t row, std::size_t cls) const {
    return prob[row * n_classes + cls];
  }

  /// Model output used for effects: the response, the probability of `cls`,
  /// or the indicator of predicting `cls` for label-only classifiers.
  double output(std::size_t row, std::size_t cls) const {
    if (type == TaskType::regression) return response[row];
    if (has_probabilities()) return probability(row, cls);
    return labels[row] == cls ? 1.0 : 0.0;
  }
};

struct FeatureInfo {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> levels;
};

/// Read-only column views in a model's feature order. Categorical columns
/// whose level lists differ from the fit-time lists are re-encoded.
class BoundColumns {
 public:
  BoundColumns() = default;
  BoundColumns(const BoundColumns&) = delete;
  BoundColumns& operator=(const BoundColumns&) = delete;
  BoundColumns(BoundColumns&&) = default;
  BoundColumns& operator=(BoundColumns&&) = default;

  std::vector<std::span<const double>> columns;
  std::size_t n_rows = 0;

 private:
  friend class FittedModel;
  std::vector<std::vector<double>> owned_;
};

/// Learner-specific fitted parameters. `predict` writes n x n_outputs values
/// row-major: the response for regression, class scores otherwise.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual void predict(std::span<const std::span<const double>> columns, std::size_t n_rows,
                       std::span<double> out) const = 0;
};

class FittedModel {
 public:
  FittedModel(LearnerSpec learner, TaskType task_type, PredictType predict_type,
              std::vector<FeatureInfo> features, std::vector<std::string> class_levels,
              std::shared_ptr<const Predictor> impl, std::vector<std::string> warnings = {})
      : learner_(std::move(learner)),
        task_type_(task_type),
        predict_type_(predict_type),
        features_(std::move(features)),
        class_levels_(std::move(class_levels)),
        impl_(std::move(impl)),
        warnings_(std::move(warnings)) {}

  const LearnerSpec& learner() const { return learner_; }
  const std::string& learner_id() const { return learner_.id(); }
  TaskType task_type() const { return task_type_; }
  PredictType predict_type() const { return predict_type_; }
  const std::vector<FeatureInfo>& features() const { return features_; }
  const std::vector<std::string>& class_levels() const { return class_levels_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const Predictor& impl() const { return *impl_; }

  std::size_t n_outputs() const {
    return task_type_ == TaskType::regression ? 1 : class_levels_.size();
  }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> out;
    for (const auto& f : features_) out.push_back(f.name);
    return out;
  }

  BoundColumns bind(const Frame& frame) const {
    BoundColumns b;
    b.n_rows = frame.n_rows();
    b.owned_.reserve(features_.size());
    for (const auto& f : features_) {
      if (!frame.has_column(f.name)) throw Error("missing feature column " + f.name);
      const Column& col = frame.column(f.name);
      if (col.kind() != f.kind) {
        throw Error("feature " + f.name + " is " + std::string(to_string(col.kind())) +
                    ", model expects " + std::string(to_string(f.kind)));
      }
      if (col.is_categorical() && col.levels() != f.levels) {
        std::vector<double> remap(col.n_levels(), -1.0);
        for (std::size_t l = 0; l < col.n_levels(); ++l) {
          for (std::size_t m = 0; m < f.levels.size(); ++m) {
            if (f.levels[m] == col.levels()[l]) remap[l] = static_cast<double>(m);
          }
        }
        std::vector<double> values(col.size());
        for (std::size_t r = 0; r < col.size(); ++r) {
          double m = remap[col.code(r)];
          if (m < 0) {
            throw Error("unseen level '" + col.level(r) + "' in feature " + f.name);
          }
          values[r] = m;
        }
        b.owned_.push_back(std::move(values));
        b.columns.emplace_back(b.owned_.back());
      } else {
        b.columns.push_back(col.values());
      }
    }
    return b;
  }

  /// Raw outputs (n x n_outputs). Classification rows are normalized.
  std::vector<double> raw_outputs(std::span<const std::span<const double>> columns,
                                  std::size_t n_rows) const {
    const std::size_t k = n_outputs();
    std::vector<double> out(n_rows * k, 0.0);
    impl_->predict(columns, n_rows, out);
    if (task_type_ != TaskType::regression) {
      for (std::size_t i = 0; i < n_rows; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c) s += out[i * k + c];
        for (std::size_t c = 0; c < k; ++c) out[i * k + c] /= s;
      }
    }
    return out;
  }

  /// Per-row value of output `cls` (see Prediction::output) for bound columns.
  std::vector<double> scores(std::span<const std::span<const double>> columns,
                             std::size_t n_rows, std::size_t cls) const {
    auto raw = raw_outputs(columns, n_rows);
    const std::size_t k = n_outputs();
    std::vector<double> out(n_rows);
    if (task_type_ == TaskType::regression) return raw;
    if (predict_type_ == PredictType::probability) {
      for (std::size_t i = 0; i < n_rows; ++i) out[i] = raw[i * k + cls];
    } else {
      for (std::size_t i = 0; i < n_rows; ++i) {
        out[i] = argmax(std::span<const double>(raw).subspan(i * k, k)) == cls ? 1.0 : 0.0;
      }
    }
    return out;
  }

  Prediction predict(const BoundColumns& bound, std::vector<std::size_t> row_ids) const {
    Prediction p;
    p.type = task_type_;
    p.row_ids = std::move(row_ids);
    auto raw = raw_outputs(bound.columns, bound.n_rows);
    if (task_type_ == TaskType::regression) {
      p.n_classes = 1;
      p.response = std::move(raw);
      return p;
    }
    const std::size_t k = n_outputs();
    p.n_classes = k;
    p.labels.resize(bound.n_rows);
    for (std::size_t i = 0; i < bound.n_rows; ++i) {
      p.labels[i] = argmax(std::span<const double>(raw).subspan(i * k, k));
    }
    if (predict_type_ == PredictType::probability) p.prob = std::move(raw);
    return p;
  }

  /// Predicts every row of `frame`; row ids default to 0..n-1.
  Prediction predict(const Frame& frame, std::vector<std::size_t> row_ids = {}) const {
    if (row_ids.empty()) {
      row_ids.resize(frame.n_rows());
      for (std::size_t i = 0; i < row_ids.size(); ++i) row_ids[i] = i;
    }
    if (row_ids.size() != frame.n_rows()) throw Error("row id count does not match frame");
    return predict(bind(frame), std::move(row_ids));
  }

  /// Index of the largest value; ties go to the lowest index.
  static std::uint32_t argmax(std::span<const double> v) {
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < v.size(); ++c) {
      if (v[c] > v[best]) best = c;
    }
    return best;
  }

 private:
  LearnerSpec learner_;
  TaskType task_type_;
  PredictType predict_type_;
  std::vector<FeatureInfo> features_;
  std::vector<std::string> class_levels_;
  std::shared_ptr<const Predictor> impl_;
  std::vector<std::string> warnings_;
};

/// Training view: full-frame feature columns plus the rows to fit on.
struct TrainingData {
  std::vector<std::span<const double>> x;
  std::vector<FeatureInfo> features;
  std::vector<std::size_t> rows;
  /// Target per training row: response, or class code for classification.
  std::vector<double> y;
  TaskType type = TaskType::regression;
  std::size_t n_classes = 1;
  std::uint32_t positive = 0;

  std::size_t n() const { return rows.size(); }
  std::size_t p() const { return x.size(); }
};

inline TrainingData training_data(const Task& task, std::span<const std::size_t> rows) {
  TrainingData d;
  d.type = task.type;
  for (const auto& name : task.feature_names) {
    const Column& c = task.frame->column(name);
    d.x.push_back(c.values());
    d.features.push_back(FeatureInfo{name, c.kind(), c.levels()});
  }
  d.rows.assign(rows.begin(), rows.end());
  const Column& y = task.target_column();
  d.y.reserve(rows.size());
  for (std::size_t r : rows) d.y.push_back(y[r]);
  d.n_classes = task.n_outputs();
  if (task.type == TaskType::binary_classification) d.positive = task.positive_index();
  return d;
}

}  // namespace modelsum
