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
#include <span>
#include <vector>

#include "modelsum/learner.hpp"

namespace modelsum::learners {

/// Predicts the training mean (regression) or the training class
/// frequencies (classification) for every row.
class FeaturelessPredictor final : public Predictor {
 public:
  explicit FeaturelessPredictor(std::vector<double> output) : output_(std::move(output)) {}

  void predict(std::span<const std::span<const double>>, std::size_t n_rows,
               std::span<double> out) const override {
    const std::size_t k = output_.size();
    for (std::size_t i = 0; i < n_rows; ++i) {
      for (std::size_t c = 0; c < k; ++c) out[i * k + c] = output_[c];
    }
  }

  const std::vector<double>& output() const { return output_; }

 private:
  std::vector<double> output_;
};

inline std::shared_ptr<const Predictor> fit_featureless(const TrainingData& data) {
  const double n = static_cast<double>(data.n());
  if (data.type == TaskType::regression) {
    double sum = 0.0;
    for (double y : data.y) sum += y;
    return std::make_shared<FeaturelessPredictor>(std::vector<double>{sum / n});
  }
  std::vector<double> freq(data.n_classes, 0.0);
  for (double y : data.y) freq[static_cast<std::size_t>(y)] += 1.0;
  for (double& f : freq) f /= n;
  return std::make_shared<FeaturelessPredictor>(std::move(freq));
}

}  // namespace modelsum::learners
