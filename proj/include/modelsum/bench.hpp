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

// Runtime benchmark of the summary stage over an (n, p) grid of simulated
// data, per learner and worker count.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "modelsum/frame.hpp"
#include "modelsum/learners.hpp"
#include "modelsum/resampling.hpp"
#include "modelsum/simulate.hpp"
#include "modelsum/summary.hpp"

namespace modelsum {

struct BenchGrid {
  std::vector<std::size_t> n;
  std::vector<std::size_t> p;

  /// "n=50,100;p=5,10"
  static BenchGrid parse(std::string_view text) {
    BenchGrid g;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find(';', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view part = text.substr(start, end - start);
      start = end + 1;
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) throw UsageError("grid part '" + std::string(part) + "' lacks '='");
      const std::string_view key = part.substr(0, eq);
      std::vector<std::size_t>* target = key == "n" ? &g.n : key == "p" ? &g.p : nullptr;
      if (!target) throw UsageError("grid key must be n or p, got '" + std::string(key) + "'");
      std::stringstream ss{std::string(part.substr(eq + 1))};
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto v = csv::parse_double(item);
        if (!v || *v < 1 || *v != std::floor(*v)) {
          throw UsageError("grid value '" + item + "' is not a positive integer");
        }
        target->push_back(static_cast<std::size_t>(*v));
      }
    }
    if (g.n.empty() || g.p.empty()) throw UsageError("grid needs both n and p values");
    for (auto p : g.p) {
      if (p < 5) throw UsageError("grid p values must be >= 5");
    }
    return g;
  }
};

struct BenchOptions {
  BenchGrid grid;
  std::vector<std::string> learners = {"random_forest"};
  std::vector<std::size_t> workers = {1};
  std::size_t repeats = 3;
  std::uint64_t seed = 1;
  SummaryControl control;
};

struct BenchCell {
  std::size_t n = 0, p = 0;
  std::string learner;
  std::size_t workers = 1;
  /// Summarize-stage seconds per run; NaN for failed runs.
  std::vector<double> runs;
  double resample_seconds = std::numeric_limits<double>::quiet_NaN();
  std::string error;

  double median() const {
    std::vector<double> ok;
    for (double r : runs) {
      if (!std::isnan(r)) ok.push_back(r);
    }
    if (ok.empty() || ok.size() < runs.size()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(ok.begin(), ok.end());
    const std::size_t m = ok.size() / 2;
    return ok.size() % 2 ? ok[m] : (ok[m - 1] + ok[m]) / 2.0;
  }
};

struct BenchResult {
  std::vector<BenchCell> cells;
  std::uint64_t seed = 0;
  std::size_t repeats = 0;
};

/// Times one cell: simulate, resample with cv3, then `repeats` timed
/// summarize calls. Errors mark the cell NA and are kept in `error`.
inline BenchCell bench_cell(std::size_t n, std::size_t p, const std::string& learner,
                            std::size_t workers, const BenchOptions& options) {
  BenchCell cell{n, p, learner, workers, {}, std::numeric_limits<double>::quiet_NaN(), {}};
  try {
    const LearnerSpec spec = parse_learner_spec(learner);
    const std::uint64_t data_seed = derive_seed(options.seed, {n, p});
    Task task = make_task(simulate(n, p, data_seed), "y");
    FittedModel model = fit(spec, task, data_seed);
    auto t0 = std::chrono::steady_clock::now();
    ResampleResult rr = resample(task, spec, ResamplingStrategy::cv(3), workers, data_seed);
    cell.resample_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t r = 0; r < options.repeats; ++r) {
      auto start = std::chrono::steady_clock::now();
      SummaryReport report = summarize(model, rr, options.control, workers);
      cell.runs.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      (void)report;
    }
  } catch (const std::exception& e) {
    cell.error = e.what();
    cell.runs.resize(options.repeats, std::numeric_limits<double>::quiet_NaN());
  }
  return cell;
}

inline BenchResult bench(const BenchOptions& options) {
  if (options.repeats < 1) throw UsageError("repeats must be at least 1");
  if (options.learners.empty() || options.workers.empty()) {
    throw UsageError("bench needs at least one learner and one worker count");
  }
  BenchResult result;
  result.seed = options.seed;
  result.repeats = options.repeats;
  for (auto n : options.grid.n) {
    for (auto p : options.grid.p) {
      for (const auto& l : options.learners) {
        for (auto w : options.workers) result.cells.push_back(bench_cell(n, p, l, w, options));
      }
    }
  }
  return result;
}

namespace detail {

inline std::string bench_seconds(double s) { return std::isnan(s) ? "NA" : csv::format_double(s); }

}  // namespace detail

/// One row per cell holding the median of its runs (run = "median").
inline void write_bench_csv(std::ostream& os, const BenchResult& r) {
  os << "n,p,learner,workers,run,seconds\n";
  for (const auto& c : r.cells) {
    os << c.n << ',' << c.p << ',' << csv::quote(c.learner) << ',' << c.workers << ",median,"
       << detail::bench_seconds(c.median()) << '\n';
  }
}

/// Every raw run, numbered from 1.
inline void write_bench_runs_csv(std::ostream& os, const BenchResult& r) {
  os << "n,p,learner,workers,run,seconds\n";
  for (const auto& c : r.cells) {
    for (std::size_t i = 0; i < c.runs.size(); ++i) {
      os << c.n << ',' << c.p << ',' << csv::quote(c.learner) << ',' << c.workers << ',' << i + 1
         << ',' << detail::bench_seconds(c.runs[i]) << '\n';
    }
  }
}

}  // namespace modelsum
