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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelsum/error.hpp"
#include "modelsum/learners.hpp"
#include "modelsum/parallel.hpp"
#include "modelsum/random.hpp"
#include "modelsum/task.hpp"

namespace modelsum {

struct ResamplingStrategy {
  enum class Kind { cv, holdout, subsampling };

  Kind kind = Kind::cv;
  std::size_t folds = 3;
  double ratio = 2.0 / 3.0;
  std::size_t repeats = 1;
  bool stratify = true;

  static ResamplingStrategy cv(std::size_t k) {
    ResamplingStrategy s;
    s.folds = k;
    s.validate();
    return s;
  }
  static ResamplingStrategy holdout(double ratio = 2.0 / 3.0) {
    ResamplingStrategy s;
    s.kind = Kind::holdout;
    s.ratio = ratio;
    s.validate();
    return s;
  }
  static ResamplingStrategy subsampling(double ratio, std::size_t repeats) {
    ResamplingStrategy s;
    s.kind = Kind::subsampling;
    s.ratio = ratio;
    s.repeats = repeats;
    s.validate();
    return s;
  }

  /// Accepts `cv<k>`, `holdout[:ratio]`, `subsampling[:ratio[x<repeats>]]`.
  static ResamplingStrategy parse(std::string_view text) {
    auto fail = [&] { return UsageError("invalid resampling spec '" + std::string(text) + "'"); };
    auto to_double = [&](std::string_view s) {
      std::size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(std::string(s), &pos);
      } catch (const std::exception&) {
        throw fail();
      }
      if (pos != s.size()) throw fail();
      return v;
    };
    auto to_size = [&](std::string_view s) {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos) throw fail();
      return static_cast<std::size_t>(std::stoull(std::string(s)));
    };
    if (text.starts_with("cv")) return cv(to_size(text.substr(2)));
    if (text == "holdout") return holdout();
    if (text.starts_with("holdout:")) return holdout(to_double(text.substr(8)));
    if (text == "subsampling") return subsampling(2.0 / 3.0, 30);
    if (text.starts_with("subsampling:")) {
      std::string_view rest = text.substr(12);
      auto x = rest.find('x');
      if (x == std::string_view::npos) return subsampling(to_double(rest), 30);
      return subsampling(to_double(rest.substr(0, x)), to_size(rest.substr(x + 1)));
    }
    throw fail();
  }

  void validate() const {
    if (kind == Kind::cv && folds < 2) throw UsageError("cv needs at least 2 folds");
    if (kind != Kind::cv && !(ratio > 0.0 && ratio < 1.0)) {
      throw UsageError("train ratio must lie in (0, 1)");
    }
    if (repeats < 1) throw UsageError("repeats must be at least 1");
  }

  std::size_t iterations() const {
    switch (kind) {
      case Kind::cv: return folds;
      case Kind::holdout: return 1;
      case Kind::subsampling: return repeats;
    }
    return 0;
  }

  std::string to_string() const {
    auto ratio_str = [&] {
      std::string s = std::to_string(ratio);
      s.erase(s.find_last_not_of('0') + 1);
      if (s.back() == '.') s.pop_back();
      return s;
    };
    switch (kind) {
      case Kind::cv: return "cv" + std::to_string(folds);
      case Kind::holdout: return "holdout:" + ratio_str();
      case Kind::subsampling: return "subsampling:" + ratio_str() + "x" + std::to_string(repeats);
    }
    return "?";
  }

  std::string describe() const {
    switch (kind) {
      case Kind::cv: return std::to_string(folds) + "-fold cross-validation";
      case Kind::holdout: return "holdout (train ratio " + to_string().substr(8) + ")";
      case Kind::subsampling:
        return "subsampling (train ratio " + to_string().substr(12, to_string().find('x') - 12) +
               ", " + std::to_string(repeats) + " repeats)";
    }
    return "?";
  }
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

namespace detail {

inline std::vector<std::size_t> complement(const std::vector<std::size_t>& sorted_test,
                                           std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n - sorted_test.size());
  std::size_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (t < sorted_test.size() && sorted_test[t] == i) {
      ++t;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

/// Row ids grouped by stratum (each group shuffled), concatenated in stratum
/// order; without strata a single shuffled group.
inline std::vector<std::vector<std::size_t>> shuffled_groups(std::size_t n, const Column* strata,
                                                             Rng& rng) {
  std::vector<std::vector<std::size_t>> groups;
  if (strata) {
    groups.resize(strata->n_levels());
    for (std::size_t i = 0; i < n; ++i) groups[strata->code(i)].push_back(i);
    std::erase_if(groups, [](const auto& g) { return g.empty(); });
  } else {
    groups.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) groups[0][i] = i;
  }
  for (auto& g : groups) shuffle(std::span<std::size_t>(g), rng);
  return groups;
}

inline Split holdout_split(std::size_t n, double ratio, const Column* strata, Rng& rng) {
  auto groups = shuffled_groups(n, strata, rng);
  Split s;
  for (const auto& g : groups) {
    auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(g.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, g.size() > 1 ? g.size() - 1 : 1);
    if (g.size() == 1) n_train = 1;
    s.test.insert(s.test.end(), g.begin() + static_cast<std::ptrdiff_t>(n_train), g.end());
  }
  std::sort(s.test.begin(), s.test.end());
  if (s.test.empty()) throw Error("holdout split left no test rows");
  s.train = complement(s.test, n);
  return s;
}

}  // namespace detail

/// Train/test splits for `n` rows. When `stratify_by` is given (and every
/// class has at least k members for cv) folds keep class proportions.
inline std::vector<Split> split(const ResamplingStrategy& strategy, std::size_t n,
                                const Column* stratify_by, std::uint64_t seed,
                                std::vector<std::string>* warnings = nullptr) {
  strategy.validate();
  if (stratify_by && stratify_by->size() != n) throw Error("strata column length mismatch");
  if (!strategy.stratify) stratify_by = nullptr;
  std::vector<Split> out;
  if (strategy.kind == ResamplingStrategy::Kind::cv) {
    const std::size_t k = strategy.folds;
    if (n < k) {
      throw Error("cannot split " + std::to_string(n) + " rows into " + std::to_string(k) +
                  " folds");
    }
    if (stratify_by) {
      std::vector<std::size_t> counts(stratify_by->n_levels(), 0);
      for (std::size_t i = 0; i < n; ++i) ++counts[stratify_by->code(i)];
      for (std::size_t l = 0; l < counts.size(); ++l) {
        if (counts[l] > 0 && counts[l] < k) {
          if (warnings) {
            warnings->push_back("class '" + stratify_by->levels()[l] + "' has fewer than " +
                                std::to_string(k) + " rows; using unstratified cv");
          }
          stratify_by = nullptr;
          break;
        }
      }
    }
    Rng rng = make_rng(derive_seed(seed, {0x5eed}));
    auto groups = detail::shuffled_groups(n, stratify_by, rng);
    std::vector<std::vector<std::size_t>> tests(k);
    std::size_t pos = 0;
    for (const auto& g : groups) {
      for (std::size_t id : g) tests[pos++ % k].push_back(id);
    }
    for (auto& t : tests) {
      std::sort(t.begin(), t.end());
      Split s;
      s.train = detail::complement(t, n);
      s.test = std::move(t);
      out.push_back(std::move(s));
    }
    return out;
  }
  if (n < 2) throw Error("need at least 2 rows for a train/test split");
  for (std::size_t r = 0; r < strategy.iterations(); ++r) {
    Rng rng = make_rng(derive_seed(seed, {0x5eed, r}));
    out.push_back(detail::holdout_split(n, strategy.ratio, stratify_by, rng));
  }
  return out;
}

struct Iteration {
  std::optional<FittedModel> model;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  Prediction prediction;
  double seconds = 0.0;
};

struct ResampleResult {
  Task task;
  LearnerSpec learner;
  ResamplingStrategy strategy;
  std::uint64_t seed = 0;
  bool models_stored = true;
  std::vector<Iteration> iterations;
  std::vector<std::string> warnings;
};

/// Fits the learner on every training set and predicts the matching test
/// set. Iteration i uses the seed derive_seed(seed, {i}); results do not
/// depend on the number of workers.
inline ResampleResult resample(const Task& task, const LearnerSpec& learner,
                               const ResamplingStrategy& strategy, std::size_t workers,
                               std::uint64_t seed, bool store_models = true) {
  ResampleResult rr;
  rr.task = task;
  rr.learner = learner;
  rr.strategy = strategy;
  rr.seed = seed;
  rr.models_stored = store_models;
  const Column* strata = task.is_classification() ? &task.target_column() : nullptr;
  auto splits = split(strategy, task.n_rows(), strata, seed, &rr.warnings);
  rr.iterations.resize(splits.size());
  std::vector<std::vector<std::string>> fold_warnings(splits.size());
  parallel_for(splits.size(), workers, [&](std::size_t i) {
    auto start = std::chrono::steady_clock::now();
    Iteration& it = rr.iterations[i];
    it.train = std::move(splits[i].train);
    it.test = std::move(splits[i].test);
    try {
      FittedModel model = fit(learner, task, it.train, derive_seed(seed, {i}));
      it.prediction = model.predict(task.frame->rows(it.test), it.test);
      for (const auto& w : model.warnings()) {
        fold_warnings[i].push_back("iteration " + std::to_string(i + 1) + ": " + w);
      }
      if (store_models) it.model = std::move(model);
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw Error("resampling iteration " + std::to_string(i + 1) + ": " + e.what());
    }
    it.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  for (auto& w : fold_warnings) rr.warnings.insert(rr.warnings.end(), w.begin(), w.end());
  return rr;
}

}  // namespace modelsum
