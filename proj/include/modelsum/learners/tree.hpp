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

// CART decision trees and random forests.
//
// Splits are binary. Numeric features split at the midpoint between
// consecutive distinct values (x <= threshold goes left); categorical
// features split one level against the rest (x == level goes left).
// Impurity is Gini for classification and squared error for regression.
// Among equally good splits the first one wins, scanning features in model
// order and thresholds in ascending order, so growth is deterministic.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "modelsum/learner.hpp"
#include "modelsum/random.hpp"

namespace modelsum::learners {

struct TreeParams {
  /// Features tried per split; 0 or >= p means all.
  std::size_t mtry = 0;
  /// Minimum number of (possibly repeated) training rows per leaf.
  std::size_t min_leaf = 1;
  std::size_t max_depth = 30;
};

class DecisionTree {
 public:
  struct Node {
    double threshold = 0.0;
    std::int32_t feature = -1;  // -1 marks a leaf
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t leaf = 0;  // offset into leaf_values_
    bool categorical = false;
  };

  std::size_t n_outputs() const { return n_outputs_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t n_leaves() const { return leaf_values_.size() / std::max<std::size_t>(n_outputs_, 1); }

  /// Adds this tree's leaf outputs for each row into `out` (n x n_outputs).
  void accumulate(std::span<const std::span<const double>> columns, std::size_t n_rows,
                  std::span<double> out) const {
    const Node* nodes = nodes_.data();
    for (std::size_t i = 0; i < n_rows; ++i) {
      const Node* node = nodes;
      while (node->feature >= 0) {
        const double v = columns[static_cast<std::size_t>(node->feature)][i];
        const bool go_left = node->categorical ? v == node->threshold : v <= node->threshold;
        node = nodes + (go_left ? node->left : node->right);
      }
      const double* leaf = leaf_values_.data() + node->leaf;
      double* dst = out.data() + i * n_outputs_;
      for (std::size_t c = 0; c < n_outputs_; ++c) dst[c] += leaf[c];
    }
  }

  /// Grows a tree on `sample`, a list of positions into data.rows (repeats
  /// allowed for bootstrap samples). `rng` is only used when mtry < p.
  static DecisionTree grow(const TrainingData& data, std::vector<std::size_t> sample,
                           const TreeParams& params, Rng& rng) {
    DecisionTree tree;
    tree.n_outputs_ = data.type == TaskType::regression ? 1 : data.n_classes;
    Builder b{data, params, rng, tree, std::move(sample), {}, {}, {}, {}};
    b.run();
    return tree;
  }

 private:
  struct Split {
    double gain = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
    bool categorical = false;
  };

  struct Builder {
    const TrainingData& data;
    const TreeParams& params;
    Rng& rng;
    DecisionTree& tree;
    std::vector<std::size_t> sample;

    // Scratch buffers reused across nodes.
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> counts_left, counts_total;
    std::vector<std::size_t> feature_pool;

    bool classification() const { return data.type != TaskType::regression; }

    double x(std::size_t feature, std::size_t pos) const {
      return data.x[feature][data.rows[pos]];
    }

    void run() {
      struct Work {
        std::size_t begin, end, depth;
        std::int32_t node;
      };
      tree.nodes_.push_back(Node{});
      std::vector<Work> stack{{0, sample.size(), 0, 0}};
      while (!stack.empty()) {
        Work w = stack.back();
        stack.pop_back();
        Split s;
        if (w.depth < params.max_depth && !is_pure(w.begin, w.end)) s = best_split(w.begin, w.end);
        if (s.feature < 0) {
          make_leaf(w.node, w.begin, w.end);
          continue;
        }
        auto mid_it = std::stable_partition(
            sample.begin() + static_cast<std::ptrdiff_t>(w.begin),
            sample.begin() + static_cast<std::ptrdiff_t>(w.end), [&](std::size_t pos) {
              double v = x(static_cast<std::size_t>(s.feature), pos);
              return s.categorical ? v == s.threshold : v <= s.threshold;
            });
        const auto mid = static_cast<std::size_t>(mid_it - sample.begin());
        const auto left = static_cast<std::int32_t>(tree.nodes_.size());
        tree.nodes_.push_back(Node{});
        tree.nodes_.push_back(Node{});
        Node& n = tree.nodes_[static_cast<std::size_t>(w.node)];
        n.feature = s.feature;
        n.threshold = s.threshold;
        n.categorical = s.categorical;
        n.left = left;
        n.right = left + 1;
        // Right child pushed first so the left subtree is laid out first.
        stack.push_back({mid, w.end, w.depth + 1, left + 1});
        stack.push_back({w.begin, mid, w.depth + 1, left});
      }
    }

    bool is_pure(std::size_t begin, std::size_t end) const {
      const double first = data.y[sample[begin]];
      for (std::size_t i = begin + 1; i < end; ++i) {
        if (data.y[sample[i]] != first) return false;
      }
      return true;
    }

    void make_leaf(std::int32_t node, std::size_t begin, std::size_t end) {
      auto& vals = tree.leaf_values_;
      tree.nodes_[static_cast<std::size_t>(node)].leaf = static_cast<std::uint32_t>(vals.size());
      const double n = static_cast<double>(end - begin);
      if (classification()) {
        std::vector<double> freq(data.n_classes, 0.0);
        for (std::size_t i = begin; i < end; ++i) freq[static_cast<std::size_t>(data.y[sample[i]])] += 1.0;
        for (double f : freq) vals.push_back(f / n);
      } else {
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += data.y[sample[i]];
        vals.push_back(sum / n);
      }
    }

    // Score of a child: sum_k count_k^2 / n (Gini) or sum^2 / n (squared
    // error). Gain = score(left) + score(right) - score(parent).
    static double class_score(std::span<const double> counts, double n) {
      double s = 0.0;
      for (double c : counts) s += c * c;
      return s / n;
    }

    Split best_split(std::size_t begin, std::size_t end) {
      const std::size_t p = data.p();
      const std::size_t n = end - begin;
      Split best;
      if (n < 2 * params.min_leaf) return best;

      feature_pool.resize(p);
      for (std::size_t j = 0; j < p; ++j) feature_pool[j] = j;
      std::size_t m = p;
      if (params.mtry > 0 && params.mtry < p) {
        for (std::size_t i = 0; i < params.mtry; ++i) {
          std::size_t j = i + uniform_index(rng, p - i);
          std::swap(feature_pool[i], feature_pool[j]);
        }
        m = params.mtry;
        std::sort(feature_pool.begin(), feature_pool.begin() + static_cast<std::ptrdiff_t>(m));
      }

      double parent_score = 0.0;
      double scale = 1.0;
      if (classification()) {
        counts_total.assign(data.n_classes, 0.0);
        for (std::size_t i = begin; i < end; ++i) counts_total[static_cast<std::size_t>(data.y[sample[i]])] += 1.0;
        parent_score = class_score(counts_total, static_cast<double>(n));
        scale = static_cast<double>(n);
      } else {
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          double y = data.y[sample[i]];
          sum += y;
          sum_sq += y * y;
        }
        parent_score = sum * sum / static_cast<double>(n);
        scale = std::max(1.0, sum_sq);
      }
      const double min_gain = 1e-12 * scale;

      for (std::size_t fi = 0; fi < m; ++fi) {
        const std::size_t f = feature_pool[fi];
        Split s = data.features[f].kind == ColumnKind::categorical
                      ? categorical_split(f, begin, end, parent_score)
                      : numeric_split(f, begin, end, parent_score);
        if (s.feature >= 0 && s.gain > min_gain && s.gain > best.gain) best = s;
      }
      return best;
    }

    Split numeric_split(std::size_t f, std::size_t begin, std::size_t end, double parent_score) {
      const std::size_t n = end - begin;
      pairs.clear();
      for (std::size_t i = begin; i < end; ++i) {
        pairs.emplace_back(x(f, sample[i]), data.y[sample[i]]);
      }
      std::sort(pairs.begin(), pairs.end());
      Split best;
      if (pairs.front().first == pairs.back().first) return best;
      const double nd = static_cast<double>(n);
      if (classification()) {
        counts_left.assign(data.n_classes, 0.0);
        std::vector<double> right(counts_total);
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const auto c = static_cast<std::size_t>(pairs[i].second);
          counts_left[c] += 1.0;
          right[c] -= 1.0;
          if (pairs[i].first == pairs[i + 1].first) continue;
          const std::size_t nl = i + 1;
          if (nl < params.min_leaf || n - nl < params.min_leaf) continue;
          const double gain = class_score(counts_left, static_cast<double>(nl)) +
                              class_score(right, nd - static_cast<double>(nl)) - parent_score;
          if (gain > best.gain) {
            best = {gain, static_cast<std::int32_t>(f), midpoint(pairs[i].first, pairs[i + 1].first),
                    false};
          }
        }
      } else {
        double total = 0.0;
        for (const auto& pr : pairs) total += pr.second;
        double left = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
          left += pairs[i].second;
          if (pairs[i].first == pairs[i + 1].first) continue;
          const std::size_t nl = i + 1;
          if (nl < params.min_leaf || n - nl < params.min_leaf) continue;
          const double right = total - left;
          const double gain = left * left / static_cast<double>(nl) +
                              right * right / (nd - static_cast<double>(nl)) - parent_score;
          if (gain > best.gain) {
            best = {gain, static_cast<std::int32_t>(f), midpoint(pairs[i].first, pairs[i + 1].first),
                    false};
          }
        }
      }
      return best;
    }

    Split categorical_split(std::size_t f, std::size_t begin, std::size_t end,
                            double parent_score) {
      const std::size_t n_levels = data.features[f].levels.size();
      const std::size_t n = end - begin;
      const double nd = static_cast<double>(n);
      std::vector<double> level_n(n_levels, 0.0);
      Split best;
      if (classification()) {
        const std::size_t k = data.n_classes;
        std::vector<double> level_counts(n_levels * k, 0.0);
        for (std::size_t i = begin; i < end; ++i) {
          const auto l = static_cast<std::size_t>(x(f, sample[i]));
          level_n[l] += 1.0;
          level_counts[l * k + static_cast<std::size_t>(data.y[sample[i]])] += 1.0;
        }
        std::vector<double> rest(k);
        for (std::size_t l = 0; l < n_levels; ++l) {
          const double nl = level_n[l];
          if (nl < static_cast<double>(params.min_leaf) ||
              nd - nl < static_cast<double>(params.min_leaf) || nl == 0.0 || nl == nd) {
            continue;
          }
          std::span<const double> in(level_counts.data() + l * k, k);
          for (std::size_t c = 0; c < k; ++c) rest[c] = counts_total[c] - in[c];
          const double gain = class_score(in, nl) + class_score(rest, nd - nl) - parent_score;
          if (gain > best.gain) best = {gain, static_cast<std::int32_t>(f), static_cast<double>(l), true};
        }
      } else {
        std::vector<double> level_sum(n_levels, 0.0);
        double total = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          const auto l = static_cast<std::size_t>(x(f, sample[i]));
          const double y = data.y[sample[i]];
          level_n[l] += 1.0;
          level_sum[l] += y;
          total += y;
        }
        for (std::size_t l = 0; l < n_levels; ++l) {
          const double nl = level_n[l];
          if (nl < static_cast<double>(params.min_leaf) ||
              nd - nl < static_cast<double>(params.min_leaf) || nl == 0.0 || nl == nd) {
            continue;
          }
          const double rest = total - level_sum[l];
          const double gain = level_sum[l] * level_sum[l] / nl + rest * rest / (nd - nl) - parent_score;
          if (gain > best.gain) best = {gain, static_cast<std::int32_t>(f), static_cast<double>(l), true};
        }
      }
      return best;
    }

    static double midpoint(double a, double b) {
      double mid = a + (b - a) / 2.0;
      return mid >= b ? a : mid;
    }
  };

  std::vector<Node> nodes_;
  std::vector<double> leaf_values_;
  std::size_t n_outputs_ = 1;
};

/// Averages the outputs of one or more trees.
class ForestPredictor final : public Predictor {
 public:
  explicit ForestPredictor(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {}

  void predict(std::span<const std::span<const double>> columns, std::size_t n_rows,
               std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& t : trees_) t.accumulate(columns, n_rows, out);
    const double inv = 1.0 / static_cast<double>(trees_.size());
    if (trees_.size() > 1) {
      for (double& v : out) v *= inv;
    }
  }

  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

inline std::size_t resolve_min_leaf(std::int64_t min_node_size, TaskType type) {
  if (min_node_size < 0) throw UsageError("min_node_size must be >= 0");
  if (min_node_size == 0) return type == TaskType::regression ? 5 : 1;
  return static_cast<std::size_t>(min_node_size);
}

inline std::shared_ptr<const Predictor> fit_tree(const TrainingData& data, const LearnerSpec& spec,
                                                 std::uint64_t seed) {
  TreeParams params;
  const auto mtry = spec.get_int("mtry");
  const auto depth = spec.get_int("max_depth");
  if (mtry < 0 || depth < 0) throw UsageError("mtry and max_depth must be >= 0");
  params.mtry = static_cast<std::size_t>(mtry);
  params.max_depth = static_cast<std::size_t>(depth);
  params.min_leaf = resolve_min_leaf(spec.get_int("min_node_size"), data.type);
  std::vector<std::size_t> sample(data.n());
  for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = i;
  Rng rng = make_rng(seed);
  std::vector<DecisionTree> trees;
  trees.push_back(DecisionTree::grow(data, std::move(sample), params, rng));
  return std::make_shared<ForestPredictor>(std::move(trees));
}

inline std::shared_ptr<const Predictor> fit_random_forest(const TrainingData& data,
                                                          const LearnerSpec& spec,
                                                          std::uint64_t seed) {
  const auto num_trees = spec.get_int("num_trees");
  const auto mtry = spec.get_int("mtry");
  const auto depth = spec.get_int("max_depth");
  const bool replace = spec.get_bool("replace");
  const double fraction = spec.get_double("sample_fraction");
  if (num_trees < 1) throw UsageError("num_trees must be at least 1");
  if (mtry < 0 || depth < 0) throw UsageError("mtry and max_depth must be >= 0");
  if (!(fraction > 0.0 && fraction <= (replace ? 10.0 : 1.0))) {
    throw UsageError("sample_fraction out of range");
  }

  TreeParams params;
  const std::size_t p = data.p();
  params.mtry = mtry > 0 ? static_cast<std::size_t>(mtry)
                         : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                        std::floor(std::sqrt(static_cast<double>(p)))));
  params.max_depth = static_cast<std::size_t>(depth);
  params.min_leaf = resolve_min_leaf(spec.get_int("min_node_size"), data.type);

  const std::size_t n = data.n();
  const auto sample_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<std::size_t>(num_trees));
  for (std::int64_t t = 0; t < num_trees; ++t) {
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    std::vector<std::size_t> sample;
    if (replace) {
      sample.resize(sample_size);
      for (auto& s : sample) s = uniform_index(rng, n);
    } else {
      auto perm = permutation(n, rng);
      sample.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(std::min(sample_size, n)));
      std::sort(sample.begin(), sample.end());
    }
    trees.push_back(DecisionTree::grow(data, std::move(sample), params, rng));
  }
  return std::make_shared<ForestPredictor>(std::move(trees));
}

}  // namespace modelsum::learners
