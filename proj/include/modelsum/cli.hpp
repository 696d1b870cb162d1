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

// Command-line front end: summarize, simulate and bench.
//
// Exit codes: 0 success, 1 usage error, 2 data or model error.

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modelsum/bench.hpp"
#include "modelsum/frame.hpp"
#include "modelsum/learners.hpp"
#include "modelsum/parallel.hpp"
#include "modelsum/render.hpp"
#include "modelsum/resampling.hpp"
#include "modelsum/simulate.hpp"
#include "modelsum/summary.hpp"

namespace modelsum::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

/// Tags an exception with the pipeline stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string message, bool usage)
      : std::runtime_error(stage + ": " + message), usage_(usage) {}
  bool usage() const { return usage_; }

 private:
  bool usage_;
};

template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const UsageError& e) {
    throw StageError(name, e.what(), true);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), false);
  }
}

inline void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw Error("cannot write " + out_path);
  f << content;
  if (!f) throw Error("write to " + out_path + " failed");
}

inline SummaryControl read_control(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open control file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("control file " + path + " is not valid JSON: " + e.what());
  }
  return SummaryControl::from_json(j);
}

}  // namespace detail

struct SummarizeArgs {
  std::string data, target, learner = "random_forest", resampling = "cv3", control, format = "text",
                            out;
  std::optional<std::string> positive, protected_attribute;
  bool keep_protected = false, no_stratify = false;
  std::optional<std::size_t> workers;
  std::uint64_t seed = 1;
  std::size_t width = 80;
};

inline std::string run_summarize(const SummarizeArgs& a) {
  const std::size_t workers = detail::stage("workers", [&] { return resolve_workers(a.workers); });
  const SummaryControl control = detail::stage("control", [&] {
    return a.control.empty() ? SummaryControl{} : detail::read_control(a.control);
  });
  const LearnerSpec spec = detail::stage("learner", [&] { return parse_learner_spec(a.learner); });
  ResamplingStrategy strategy =
      detail::stage("resampling", [&] { return ResamplingStrategy::parse(a.resampling); });
  if (a.no_stratify) strategy.stratify = false;
  Frame frame = detail::stage("load", [&] { return load_csv(a.data); });
  Task task = detail::stage("task", [&] {
    TaskOptions options;
    options.positive_class = a.positive;
    options.protected_attribute = a.protected_attribute;
    options.keep_protected_as_feature = a.keep_protected;
    return make_task(std::move(frame), a.target, options);
  });
  FittedModel model = detail::stage("fit", [&] { return fit(spec, task, a.seed); });
  ResampleResult rr =
      detail::stage("resample", [&] { return resample(task, spec, strategy, workers, a.seed); });
  SummaryReport report = detail::stage("summarize", [&] { return summarize(model, rr, control, workers); });
  return detail::stage("render", [&] {
    return a.format == "json" ? render_json(report) : render_text(report, a.width);
  });
}

/// Parses argv and runs the chosen subcommand. Output goes to `out` unless
/// --out names a file; diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Model-agnostic summaries of tabular models", "modelsum"};
  app.require_subcommand(1);

  SummarizeArgs sa;
  auto* summarize_cmd = app.add_subcommand("summarize", "resample a learner and print its summary report");
  summarize_cmd->add_option("--data", sa.data, "CSV file with a header row")->required();
  summarize_cmd->add_option("--target", sa.target, "target column")->required();
  summarize_cmd->add_option("--positive", sa.positive, "positive class (binary tasks)");
  summarize_cmd->add_option("--protected", sa.protected_attribute, "protected attribute column");
  summarize_cmd->add_flag("--keep-protected", sa.keep_protected, "keep the protected attribute as a feature");
  summarize_cmd->add_option("--learner", sa.learner, "learner spec, e.g. random_forest:num_trees=100")
      ->capture_default_str();
  summarize_cmd->add_option("--resampling", sa.resampling, "cv<k>, holdout[:ratio] or subsampling[:ratio[xN]]")
      ->capture_default_str();
  summarize_cmd->add_flag("--no-stratify", sa.no_stratify, "do not stratify classification splits");
  summarize_cmd->add_option("--control", sa.control, "JSON control file");
  summarize_cmd->add_option("--format", sa.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  summarize_cmd->add_option("--width", sa.width, "text width")->capture_default_str();
  summarize_cmd->add_option("--workers", sa.workers, "worker count (default MODELSUM_WORKERS or 1)");
  summarize_cmd->add_option("--seed", sa.seed, "master seed")->capture_default_str();
  summarize_cmd->add_option("--out", sa.out, "output file (default stdout)");

  std::size_t sim_n = 0, sim_p = 0;
  std::uint64_t sim_seed = 1;
  double sim_noise = kDefaultNoise;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "write simulated benchmark data as CSV");
  simulate_cmd->add_option("--n", sim_n, "rows")->required();
  simulate_cmd->add_option("--p", sim_p, "features (>= 5)")->required();
  simulate_cmd->add_option("--seed", sim_seed, "seed")->capture_default_str();
  simulate_cmd->add_option("--noise", sim_noise, "noise scale relative to f(x)")->capture_default_str();
  simulate_cmd->add_option("--out", sim_out, "output file (default stdout)");

  std::string grid, bench_out, runs_out, bench_control;
  std::vector<std::string> learners = {"random_forest"};
  std::vector<std::size_t> worker_list = {1};
  std::size_t repeats = 3;
  std::uint64_t bench_seed = 1;
  auto* bench_cmd = app.add_subcommand("bench", "time the summary stage over an (n, p) grid");
  bench_cmd->add_option("--grid", grid, "e.g. 'n=50,100;p=5,10'")->required();
  bench_cmd->add_option("--learners", learners, "learner specs")->capture_default_str();
  bench_cmd->add_option("--workers", worker_list, "worker counts")->capture_default_str();
  bench_cmd->add_option("--repeats", repeats, "timed runs per cell")->capture_default_str();
  bench_cmd->add_option("--seed", bench_seed, "seed")->capture_default_str();
  bench_cmd->add_option("--control", bench_control, "JSON control file");
  bench_cmd->add_option("--out", bench_out, "CSV of per-cell medians (default stdout)");
  bench_cmd->add_option("--runs-out", runs_out, "CSV of every run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*summarize_cmd) {
      std::string rendered = run_summarize(sa);
      detail::stage("write", [&] {
        detail::emit(rendered, sa.out, out);
        return 0;
      });
    } else if (*simulate_cmd) {
      Frame f = detail::stage("simulate", [&] { return simulate(sim_n, sim_p, sim_seed, sim_noise); });
      detail::stage("write", [&] {
        detail::emit(to_csv(f), sim_out, out);
        return 0;
      });
    } else if (*bench_cmd) {
      BenchOptions options;
      options.grid = detail::stage("grid", [&] { return BenchGrid::parse(grid); });
      options.learners = learners;
      options.workers = worker_list;
      options.repeats = repeats;
      options.seed = bench_seed;
      if (!bench_control.empty()) {
        options.control = detail::stage("control", [&] { return detail::read_control(bench_control); });
      }
      detail::stage("learner", [&] {
        for (const auto& l : learners) parse_learner_spec(l);
        for (auto w : worker_list) resolve_workers(w);
        return 0;
      });
      BenchResult result = detail::stage("bench", [&] { return bench(options); });
      for (const auto& c : result.cells) {
        if (!c.error.empty()) {
          err << "modelsum: bench: cell n=" << c.n << " p=" << c.p << " learner=" << c.learner
              << " workers=" << c.workers << " failed: " << c.error << "\n";
        }
      }
      detail::stage("write", [&] {
        std::ostringstream csv_out;
        write_bench_csv(csv_out, result);
        detail::emit(csv_out.str(), bench_out, out);
        if (!runs_out.empty()) {
          std::ostringstream runs;
          write_bench_runs_csv(runs, result);
          detail::emit(runs.str(), runs_out, out);
        }
        return 0;
      });
    }
  } catch (const detail::StageError& e) {
    err << "modelsum: " << e.what() << "\n";
    return e.usage() ? kExitUsage : kExitData;
  }
  return kExitOk;
}

}  // namespace modelsum::cli
