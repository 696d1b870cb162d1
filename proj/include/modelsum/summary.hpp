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

// The summary report: control settings, the paragraph model and the
// orchestration that fills it from a fitted model and a resample result.
//
// Only the General paragraph looks at the fitted model. Every other
// paragraph is computed per resampling iteration from that iteration's model
// and held-out rows, then aggregated over iterations.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "modelsum/complexity.hpp"
#include "modelsum/effects.hpp"
#include "modelsum/error.hpp"
#include "modelsum/fairness.hpp"
#include "modelsum/importance.hpp"
#include "modelsum/learners.hpp"
#include "modelsum/metrics.hpp"
#include "modelsum/parallel.hpp"
#include "modelsum/random.hpp"
#include "modelsum/resampling.hpp"
#include "modelsum/residuals.hpp"

namespace modelsum {

/// Paragraphs that `hide` may name, in display order. General is always shown.
inline const std::vector<std::string>& hideable_paragraphs() {
  static const std::vector<std::string> names = {"residuals",  "performance", "complexity",
                                                 "fairness",   "importance",  "effects"};
  return names;
}

inline constexpr std::size_t kEffectRowCap = 10000;

struct SummaryControl {
  /// Performance measure ids; `id:micro` selects micro aggregation.
  /// Unset: defaults for the task type.
  std::optional<std::vector<std::string>> measures;
  std::vector<std::string> complexity_measures = {"sparsity", "interaction_strength"};
  /// `pdp` and/or `pfi.<loss>`. Unset: [pdp, pfi.ce] or [pdp, pfi.mse].
  std::optional<std::vector<std::string>> importance_measures;
  std::size_t n_important = 15;
  std::vector<std::string> effect_measures = {"pdp", "ale"};
  /// Unset: [dp, cuae, eod] (classification) or [reg_mse_gap] (regression).
  std::optional<std::vector<std::string>> fairness_measures;
  std::optional<std::string> protected_attribute;
  std::set<std::string> hide;
  int digits = 4;

  std::size_t grid_size = kDefaultGridSize;
  std::size_t pfi_repetitions = kDefaultPermutations;
  std::size_t effect_row_cap = kEffectRowCap;

  void validate() const {
    if (n_important < 1) throw UsageError("n_important must be at least 1");
    if (digits < 1 || digits > 17) throw UsageError("digits must lie in [1, 17]");
    if (grid_size < 2) throw UsageError("grid_size must be at least 2");
    if (pfi_repetitions < 1) throw UsageError("pfi_repetitions must be at least 1");
    if (effect_row_cap < 1) throw UsageError("effect_row_cap must be at least 1");
    const auto& names = hideable_paragraphs();
    for (const auto& h : hide) {
      if (std::find(names.begin(), names.end(), h) == names.end()) {
        throw UsageError("cannot hide paragraph '" + h + "'");
      }
    }
    for (const auto& c : complexity_measures) {
      if (c != "sparsity" && c != "interaction_strength") {
        throw UsageError("unknown complexity measure " + c);
      }
    }
    for (const auto& e : effect_measures) {
      if (e != "pdp" && e != "ale") throw UsageError("unknown effect measure " + e);
    }
    if (importance_measures) {
      for (const auto& m : *importance_measures) {
        if (m != "pdp" && !m.starts_with("pfi.")) throw UsageError("unknown importance measure " + m);
        if (m.starts_with("pfi.")) measure_by_id(m.substr(4));
      }
    }
    if (fairness_measures) {
      const auto& ids = fairness_measure_ids();
      for (const auto& m : *fairness_measures) {
        if (std::find(ids.begin(), ids.end(), m) == ids.end()) {
          throw UsageError("unknown fairness measure " + m);
        }
      }
    }
    if (measures) {
      for (const auto& m : *measures) measure_by_id(m.substr(0, m.find(':')));
    }
  }

  bool hidden(std::string_view paragraph) const { return hide.count(std::string(paragraph)) > 0; }

  /// Reads the control file format: a JSON object with the field names
  /// above. Unknown keys are rejected; absent keys keep their defaults.
  static SummaryControl from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("control must be a JSON object");
    SummaryControl c;
    auto strings = [](const nlohmann::json& v, const std::string& key) {
      if (!v.is_array()) throw UsageError("control." + key + " must be an array of strings");
      std::vector<std::string> out;
      for (const auto& s : v) {
        if (!s.is_string()) throw UsageError("control." + key + " must be an array of strings");
        out.push_back(s.get<std::string>());
      }
      return out;
    };
    auto count = [](const nlohmann::json& v, const std::string& key) {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw UsageError("control." + key + " must be a non-negative integer");
      }
      return static_cast<std::size_t>(v.get<long long>());
    };
    for (const auto& [key, v] : j.items()) {
      const bool null = v.is_null();
      if (key == "measures") {
        if (!null) c.measures = strings(v, key);
      } else if (key == "complexity_measures") {
        c.complexity_measures = null ? std::vector<std::string>{} : strings(v, key);
      } else if (key == "importance_measures") {
        if (!null) c.importance_measures = strings(v, key);
      } else if (key == "n_important") {
        c.n_important = count(v, key);
      } else if (key == "effect_measures") {
        c.effect_measures = null ? std::vector<std::string>{} : strings(v, key);
      } else if (key == "fairness_measures") {
        if (!null) c.fairness_measures = strings(v, key);
      } else if (key == "protected_attribute") {
        if (!null) {
          if (!v.is_string()) throw UsageError("control.protected_attribute must be a string");
          c.protected_attribute = v.get<std::string>();
        }
      } else if (key == "hide") {
        if (!null) {
          auto h = strings(v, key);
          c.hide = std::set<std::string>(h.begin(), h.end());
        }
      } else if (key == "digits") {
        c.digits = static_cast<int>(count(v, key));
      } else if (key == "grid_size") {
        c.grid_size = count(v, key);
      } else if (key == "pfi_repetitions") {
        c.pfi_repetitions = count(v, key);
      } else if (key == "effect_row_cap") {
        c.effect_row_cap = count(v, key);
      } else {
        throw UsageError("unknown control key '" + key + "'");
      }
    }
    c.validate();
    return c;
  }
};

struct GeneralParagraph {
  TaskType task_type = TaskType::regression;
  std::string target;
  std::optional<std::string> positive_class;
  std::size_t n_rows = 0;
  std::vector<std::string> features;
  std::size_t n_numeric = 0;
  std::size_t n_categorical = 0;
  std::optional<std::string> protected_attribute;
  std::string learner_id;
  PredictType predict_type = PredictType::response;
  std::vector<std::pair<std::string, std::string>> hyperparameters;
  std::string resampling;
  std::string resampling_description;
  std::size_t iterations = 0;
};

struct PerformanceParagraph {
  std::vector<AggregatedMeasure> measures;
};

struct ComplexityParagraph {
  std::vector<std::string> measures;
  std::vector<ComplexityRecord> per_fold;
  ComplexitySummary summary;
};

struct FairnessRecord {
  std::string id;
  std::vector<double> per_fold;
  MeanSd aggregate;
  std::vector<std::string> notes;
};

struct FairnessParagraph {
  std::string protected_attribute;
  std::vector<std::string> groups;
  std::vector<FairnessRecord> measures;
};

struct FeatureEffects {
  std::string feature;
  EffectClass cls;
  EffectMethod method = EffectMethod::pdp;
  EffectCurve aggregate;
  std::vector<EffectCurve> folds;
};

struct EffectsParagraph {
  std::vector<std::string> methods;
  std::vector<EffectClass> classes;
  /// Ordered by class, then feature (task order), then method.
  std::vector<FeatureEffects> curves;
};

struct SummaryReport {
  GeneralParagraph general;
  std::optional<ResidualSummary> residuals;
  std::optional<PerformanceParagraph> performance;
  std::optional<ComplexityParagraph> complexity;
  std::optional<FairnessParagraph> fairness;
  std::optional<ImportanceTable> importance;
  std::optional<EffectsParagraph> effects;
  std::set<std::string> hidden;
  int digits = 4;
  std::size_t n_important = 15;
  std::vector<std::string> warnings;

  bool shows(std::string_view paragraph) const { return hidden.count(std::string(paragraph)) == 0; }
};

namespace detail {

struct FoldInputs {
  Frame test;              // all held-out rows
  Frame effect_rows;       // held-out rows used for effects (capped)
  std::vector<std::size_t> effect_ids;
  Truth truth;
  std::vector<std::vector<double>> class_scores;  // per class, on effect rows
};

}  // namespace detail

/// Builds the report. `model` must come from the same learner spec as the
/// resample result, which must have stored its models.
inline SummaryReport summarize(const FittedModel& model, const ResampleResult& rr,
                               const SummaryControl& control = {}, std::size_t workers = 1) {
  control.validate();
  if (!rr.models_stored) {
    throw Error("resample result has no stored models; re-run resample with model storage enabled");
  }
  for (const auto& it : rr.iterations) {
    if (!it.model) {
      throw Error("resample result has no stored models; re-run resample with model storage enabled");
    }
  }
  if (!(model.learner() == rr.learner)) {
    throw Error("model learner " + model.learner().to_string() +
                " does not match resample learner " + rr.learner.to_string());
  }
  const Task& task = rr.task;
  const std::size_t folds = rr.iterations.size();

  SummaryReport report;
  report.hidden = control.hide;
  report.digits = control.digits;
  report.n_important = control.n_important;
  report.warnings = rr.warnings;

  // General: from the fitted model and the task.
  {
    auto& g = report.general;
    g.task_type = task.type;
    g.target = task.target;
    g.positive_class = task.positive_class;
    g.n_rows = task.n_rows();
    g.features = model.feature_names();
    for (const auto& f : model.features()) {
      (f.kind == ColumnKind::numeric ? g.n_numeric : g.n_categorical)++;
    }
    g.learner_id = model.learner_id();
    g.predict_type = model.predict_type();
    g.protected_attribute = resolve_protected(task, control.protected_attribute);
    g.hyperparameters = hyperparameter_summary(model.learner());
    g.resampling = rr.strategy.to_string();
    g.resampling_description = rr.strategy.describe();
    g.iterations = folds;
    for (const auto& w : model.warnings()) report.warnings.push_back("final model: " + w);
  }

  report.residuals = summarize_residuals(rr);

  // Performance.
  {
    PerformanceParagraph perf;
    const bool has_prob = task.is_classification() &&
                          model.predict_type() == PredictType::probability;
    std::vector<std::pair<Measure, Aggregation>> chosen;
    if (control.measures) {
      for (const auto& spec : *control.measures) {
        auto colon = spec.find(':');
        const Measure& m = measure_by_id(spec.substr(0, colon));
        Aggregation mode = Aggregation::macro;
        if (colon != std::string::npos) {
          const std::string tag = spec.substr(colon + 1);
          if (tag == "micro") {
            mode = Aggregation::micro;
          } else if (tag != "macro") {
            throw UsageError("unknown aggregation '" + tag + "'");
          }
        }
        if (!m.applies_to(task.type)) {
          throw UsageError("measure " + m.id + " does not apply to this task");
        }
        if (m.needs == Needs::probabilities && !has_prob) {
          throw UsageError("measure " + m.id + " needs probability predictions");
        }
        chosen.emplace_back(m, mode);
      }
    } else {
      for (const auto& m : default_measures(task.type)) {
        if (m.needs == Needs::probabilities && !has_prob) {
          report.warnings.push_back("performance: " + m.id + " skipped (no probabilities)");
          continue;
        }
        chosen.emplace_back(m, Aggregation::macro);
      }
    }
    for (const auto& [m, mode] : chosen) perf.measures.push_back(aggregate(m, rr, mode));
    report.performance = std::move(perf);
  }

  const auto classes = effect_classes(task);
  const auto& features = task.feature_names;
  const std::size_t p = features.size();
  const std::vector<std::string> importance_ids =
      control.importance_measures
          ? *control.importance_measures
          : std::vector<std::string>{"pdp", "pfi." + default_pfi_loss(task.type)};
  for (const auto& id : importance_ids) {
    if (id.starts_with("pfi.")) {
      const Measure& loss = measure_by_id(id.substr(4));
      if (!loss.applies_to(task.type) || loss.direction != Direction::minimize ||
          (loss.needs == Needs::probabilities && model.predict_type() != PredictType::probability)) {
        throw UsageError("importance loss " + loss.id + " cannot be used for this task/learner");
      }
    }
  }
  auto wants = [](const std::vector<std::string>& v, std::string_view id) {
    return std::find(v.begin(), v.end(), id) != v.end();
  };
  const bool need_pdp = wants(control.effect_measures, "pdp") || wants(importance_ids, "pdp");
  const bool need_ale = wants(control.effect_measures, "ale") || !control.complexity_measures.empty();

  std::vector<EffectGrid> grids;
  for (const auto& f : features) grids.push_back(build_grid(task, f, control.grid_size));

  // Per-iteration inputs.
  std::vector<detail::FoldInputs> inputs(folds);
  parallel_for(folds, workers, [&](std::size_t i) {
    const auto& it = rr.iterations[i];
    auto& in = inputs[i];
    in.test = task.frame->rows(it.test);
    in.truth = truth_for(task, it.test);
    std::vector<std::size_t> local(it.test.size());
    for (std::size_t k = 0; k < local.size(); ++k) local[k] = k;
    if (local.size() > control.effect_row_cap) {
      Rng rng = make_rng(derive_seed(rr.seed, {0xEFFEC7, i}));
      shuffle(std::span<std::size_t>(local), rng);
      local.resize(control.effect_row_cap);
      std::sort(local.begin(), local.end());
      in.effect_rows = in.test.rows(local);
    } else {
      in.effect_rows = in.test;
    }
    in.effect_ids = std::move(local);
    BoundColumns bound = it.model->bind(in.effect_rows);
    for (const auto& c : classes) {
      in.class_scores.push_back(it.model->scores(bound.columns, bound.n_rows, c.index));
    }
  });

  // Per (iteration, feature) work: effect curves and permutation importance.
  struct Cell {
    std::vector<EffectCurve> pdp;  // per class
    std::vector<EffectCurve> ale;  // per class
    std::vector<double> pfi;       // per pfi measure
  };
  std::vector<Cell> cells(folds * p);
  std::vector<std::vector<double>> pfi_base(folds);
  std::vector<std::string> pfi_ids;
  for (const auto& id : importance_ids) {
    if (id.starts_with("pfi.")) pfi_ids.push_back(id.substr(4));
  }
  parallel_for(folds, workers, [&](std::size_t i) {
    const auto& it = rr.iterations[i];
    std::vector<std::size_t> ids(inputs[i].test.n_rows());
    for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = k;
    Prediction base = it.model->predict(inputs[i].test, ids);
    for (const auto& loss : pfi_ids) {
      pfi_base[i].push_back(evaluate_measure(measure_by_id(loss), base, inputs[i].truth));
    }
  });
  parallel_for(folds * p, workers, [&](std::size_t cell) {
    const std::size_t i = cell / p;
    const std::size_t f = cell % p;
    const FittedModel& m = *rr.iterations[i].model;
    const auto& in = inputs[i];
    Cell& out = cells[cell];
    for (const auto& c : classes) {
      if (need_pdp) {
        out.pdp.push_back(pdp(m, in.effect_rows, grids[f], c));
        out.pdp.back().fold = static_cast<int>(i);
      }
      if (need_ale) {
        out.ale.push_back(ale(m, in.effect_rows, grids[f], c));
        out.ale.back().fold = static_cast<int>(i);
      }
    }
    if (!pfi_ids.empty()) {
      const std::size_t n = in.test.n_rows();
      std::vector<std::size_t> ids(n);
      for (std::size_t k = 0; k < n; ++k) ids[k] = k;
      BoundColumns bound = m.bind(in.test);
      std::vector<double> buffer(n);
      const std::span<const double> original = bound.columns[f];
      BoundColumns permuted;
      permuted.n_rows = n;
      std::vector<double> totals(pfi_ids.size(), 0.0);
      const std::uint64_t seed = derive_seed(rr.seed, {0xF1, i});
      for (std::size_t r = 0; r < control.pfi_repetitions; ++r) {
        Rng rng = make_rng(derive_seed(seed, {f, r}));
        auto perm = permutation(n, rng);
        for (std::size_t k = 0; k < n; ++k) buffer[k] = original[perm[k]];
        permuted.columns = bound.columns;
        permuted.columns[f] = buffer;
        Prediction pred = m.predict(permuted, ids);
        for (std::size_t l = 0; l < pfi_ids.size(); ++l) {
          totals[l] += evaluate_measure(measure_by_id(pfi_ids[l]), pred, in.truth) - pfi_base[i][l];
        }
      }
      for (double t : totals) out.pfi.push_back(t / static_cast<double>(control.pfi_repetitions));
    }
  });

  // Complexity.
  if (!control.complexity_measures.empty()) {
    ComplexityParagraph cp;
    cp.measures = control.complexity_measures;
    for (std::size_t i = 0; i < folds; ++i) {
      ComplexityRecord rec;
      rec.fold = static_cast<int>(i);
      std::vector<bool> used(p, false);
      double ias = 0.0;
      for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<EffectCurve> curves;
        for (std::size_t f = 0; f < p; ++f) curves.push_back(cells[i * p + f].ale[c]);
        const auto& scores = inputs[i].class_scores[c];
        const double range = value_range(scores);
        for (std::size_t f = 0; f < p; ++f) {
          if (sparsity(std::span<const EffectCurve>(&curves[f], 1), range) == 1) used[f] = true;
        }
        ias += interaction_strength(scores, inputs[i].effect_rows, curves);
      }
      rec.sparsity = static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
      rec.interaction_strength = ias / static_cast<double>(classes.size());
      cp.per_fold.push_back(rec);
    }
    cp.summary = aggregate_complexity(cp.per_fold);
    report.complexity = std::move(cp);
  }

  // Fairness.
  if (auto protected_attr = resolve_protected(task, control.protected_attribute)) {
    if (!task.frame->has_column(*protected_attr)) {
      throw Error("protected attribute " + *protected_attr + " not found");
    }
    const Column& groups_col = task.frame->column(*protected_attr);
    if (!groups_col.is_categorical() || groups_col.n_levels() < 2) {
      throw Error("protected attribute " + *protected_attr + " must be categorical with >= 2 levels");
    }
    if (task.type == TaskType::multiclass_classification) {
      throw Error("fairness measures need a binary classification or regression task");
    }
    FairnessParagraph fp;
    fp.protected_attribute = *protected_attr;
    fp.groups = groups_col.levels();
    const auto ids = control.fairness_measures ? *control.fairness_measures
                                               : default_fairness_measures(task.type);
    for (const auto& id : ids) {
      FairnessRecord rec;
      rec.id = id;
      for (std::size_t i = 0; i < folds; ++i) {
        const auto& it = rr.iterations[i];
        std::vector<std::uint32_t> g;
        for (std::size_t r : it.test) g.push_back(groups_col.code(r));
        FairnessValue v = fairness_measure(id, it.prediction, inputs[i].truth, g, groups_col.n_levels());
        if (!v.defined()) {
          rec.notes.push_back("iteration " + std::to_string(i + 1) +
                              " excluded: fewer than two groups with defined rates");
        } else if (v.renormalized) {
          rec.notes.push_back("iteration " + std::to_string(i + 1) +
                              ": a group rate was undefined and skipped");
        }
        rec.per_fold.push_back(v.value);
      }
      rec.aggregate = mean_sd(rec.per_fold);
      fp.measures.push_back(std::move(rec));
    }
    report.fairness = std::move(fp);
  }

  // Importance.
  if (!importance_ids.empty()) {
    std::vector<std::vector<std::vector<double>>> values(
        importance_ids.size(), std::vector<std::vector<double>>(p, std::vector<double>(folds, 0.0)));
    for (std::size_t m = 0; m < importance_ids.size(); ++m) {
      std::size_t pfi_slot = 0;
      for (std::size_t k = 0; k < m; ++k) pfi_slot += importance_ids[k].starts_with("pfi.");
      for (std::size_t i = 0; i < folds; ++i) {
        for (std::size_t f = 0; f < p; ++f) {
          const Cell& cell = cells[i * p + f];
          if (importance_ids[m] == "pdp") {
            double s = 0.0;
            for (const auto& curve : cell.pdp) s += pdp_importance(curve);
            values[m][f][i] = s / static_cast<double>(classes.size());
          } else {
            values[m][f][i] = cell.pfi[pfi_slot];
          }
        }
      }
    }
    report.importance = build_importance_table(importance_ids, features, values, p);
  }

  // Effects.
  if (!control.effect_measures.empty()) {
    EffectsParagraph ep;
    ep.methods = control.effect_measures;
    ep.classes = classes;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (std::size_t f = 0; f < p; ++f) {
        for (const auto& method : control.effect_measures) {
          FeatureEffects fe;
          fe.feature = features[f];
          fe.cls = classes[c];
          fe.method = method == "pdp" ? EffectMethod::pdp : EffectMethod::ale;
          for (std::size_t i = 0; i < folds; ++i) {
            const Cell& cell = cells[i * p + f];
            fe.folds.push_back(fe.method == EffectMethod::pdp ? cell.pdp[c] : cell.ale[c]);
          }
          fe.aggregate = aggregate_effects(fe.folds);
          if (fe.aggregate.folds_used < folds) {
            report.warnings.push_back("effects: " + fe.feature + " " + method + " used " +
                                      std::to_string(fe.aggregate.folds_used) + " of " +
                                      std::to_string(folds) + " iterations");
          }
          ep.curves.push_back(std::move(fe));
        }
      }
    }
    report.effects = std::move(ep);
  }
  return report;
}

}  // namespace modelsum
