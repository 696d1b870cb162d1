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

// Text and JSON rendering of a SummaryReport.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "modelsum/error.hpp"
#include "modelsum/summary.hpp"

namespace modelsum {

inline constexpr std::size_t kMinTextWidth = 40;

namespace text {

/// %.{digits}g, with NA for NaN and no negative zero.
inline std::string number(double v, int digits) {
  if (std::isnan(v)) return "NA";
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string mean_sd(double mean, double sd, int digits) {
  return number(mean, digits) + " [" + number(sd, digits) + "]";
}

/// Display columns of a UTF-8 string (one per code point).
inline std::size_t display_width(std::string_view s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80;
  return w;
}

inline std::string pad_right(std::string s, std::size_t width) {
  const std::size_t w = display_width(s);
  if (w < width) s.append(width - w, ' ');
  return s;
}

inline std::string pad_left(std::string s, std::size_t width) {
  const std::size_t w = display_width(s);
  if (w < width) s.insert(0, width - w, ' ');
  return s;
}

inline constexpr std::string_view kBars[8] = {"▁", "▂", "▃", "▄", "▅", "▆", "▇", "█"};

/// One glyph per grid point, quantized into 8 levels over the curve's range.
inline std::string trend_strip(const std::vector<double>& values) {
  if (values.empty()) return "";
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  std::string out;
  for (double v : values) {
    std::size_t level = 0;
    if (range > 0.0) level = std::min<std::size_t>(7, static_cast<std::size_t>((v - *lo) / range * 8.0));
    out += kBars[level];
  }
  return out;
}

/// Sign and magnitude per level around the level mean, scaled by the
/// largest absolute deviation.
inline std::string signed_bars(std::vector<double> values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(std::max<std::size_t>(values.size(), 1));
  double top = 0.0;
  for (double& v : values) {
    v -= mean;
    top = std::max(top, std::abs(v));
  }
  std::string out;
  for (double v : values) {
    if (top == 0.0 || v == 0.0) {
      out += " ·";
      continue;
    }
    out += v > 0 ? '+' : '-';
    out += kBars[std::min<std::size_t>(7, static_cast<std::size_t>(std::abs(v) / top * 8.0))];
  }
  return out;
}

inline std::string strip_for(const EffectCurve& c) {
  return c.grid.kind == ColumnKind::categorical ? signed_bars(c.values) : trend_strip(c.values);
}

/// Left-aligned columns separated by two spaces, indented by two.
inline void table(std::string& out, const std::vector<std::vector<std::string>>& rows,
                  const std::vector<bool>& right_align = {}) {
  std::vector<std::size_t> widths;
  for (const auto& r : rows) {
    widths.resize(std::max(widths.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], display_width(r[c]));
  }
  for (const auto& r : rows) {
    std::string line = "  ";
    for (std::size_t c = 0; c < r.size(); ++c) {
      const bool right = c < right_align.size() && right_align[c];
      const bool last = c + 1 == r.size();
      line += right ? pad_left(r[c], widths[c]) : (last ? r[c] : pad_right(r[c], widths[c]));
      if (!last) line += "  ";
    }
    out += line + "\n";
  }
}

}  // namespace text

inline std::string task_type_label(TaskType t) {
  switch (t) {
    case TaskType::regression: return "regression";
    case TaskType::binary_classification: return "binary classification";
    case TaskType::multiclass_classification: return "multiclass classification";
  }
  return "?";
}

/// Renders the report for a terminal of `width` columns (at least 40).
inline std::string render_text(const SummaryReport& r, std::size_t width = 80) {
  if (width < kMinTextWidth) {
    throw UsageError("text width must be at least " + std::to_string(kMinTextWidth));
  }
  const int d = r.digits;
  std::string out;
  const auto& g = r.general;

  out += "General:\n";
  {
    std::string task = task_type_label(g.task_type) + ", target " + g.target;
    if (g.positive_class) task += ", positive class " + *g.positive_class;
    std::vector<std::vector<std::string>> rows = {
        {"Task:", task},
        {"Data:", "n = " + std::to_string(g.n_rows) + ", p = " + std::to_string(g.features.size()) +
                      " (" + std::to_string(g.n_numeric) + " numeric, " +
                      std::to_string(g.n_categorical) + " categorical)"}};
    if (g.protected_attribute) rows.push_back({"Protected:", *g.protected_attribute});
    rows.push_back({"Learner:", g.learner_id + " (predict type " +
                                    std::string(to_string(g.predict_type)) + ")"});
    std::string hp;
    for (const auto& [k, v] : g.hyperparameters) hp += (hp.empty() ? "" : ", ") + k + "=" + v;
    rows.push_back({"Hyperparameters:", hp.empty() ? "defaults" : hp});
    rows.push_back({"Resampling:", g.resampling + " (" + g.resampling_description + "), " +
                                       std::to_string(g.iterations) + " iterations"});
    text::table(out, rows);
  }

  if (r.residuals && r.shows("residuals")) {
    const auto& res = *r.residuals;
    if (res.kind == ResidualSummary::Kind::confusion && res.confusion) {
      out += "\nResiduals (confusion matrix, rows = truth):\n";
      const auto& cm = *res.confusion;
      std::vector<std::vector<std::string>> rows;
      std::vector<std::string> head = {"truth \\ predicted"};
      for (const auto& l : cm.levels()) head.push_back(l);
      rows.push_back(head);
      for (std::size_t t = 0; t < cm.size(); ++t) {
        std::vector<std::string> row = {cm.levels()[t]};
        for (std::size_t p = 0; p < cm.size(); ++p) row.push_back(std::to_string(cm.at(t, p)));
        rows.push_back(row);
      }
      std::vector<bool> right(cm.size() + 1, true);
      right[0] = false;
      text::table(out, rows, right);
    } else if (res.quantiles) {
      out += res.kind == ResidualSummary::Kind::probability
                 ? "\nResiduals (predicted probability - one-hot truth):\n"
                 : "\nResiduals (truth - prediction):\n";
      std::vector<std::string> values;
      for (double v : res.quantiles->values()) values.push_back(text::number(v, d));
      text::table(out, {{"Min", "1Q", "Median", "3Q", "Max"}, values},
                  std::vector<bool>(5, true));
    }
  }

  if (r.performance && r.shows("performance")) {
    out += "\nPerformance [sd]:\n";
    std::size_t id_width = 0;
    for (const auto& m : r.performance->measures) id_width = std::max(id_width, m.id.size());
    for (const auto& m : r.performance->measures) {
      std::string line = "  " + text::pad_right(m.id, id_width) + " (" +
                         std::string(to_string(m.mode)) + ") " +
                         (m.direction == Direction::maximize ? "↑" : "↓") + "  " +
                         text::number(m.mean, d);
      if (m.sd) line += " [" + text::number(*m.sd, d) + "]";
      out += line + "\n";
    }
  }

  if (r.complexity && r.shows("complexity")) {
    out += "\nComplexity [sd]:\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : r.complexity->measures) {
      const MeanSd& v = m == "sparsity" ? r.complexity->summary.sparsity
                                        : r.complexity->summary.interaction_strength;
      rows.push_back({m, text::mean_sd(v.mean, v.sd, d)});
    }
    text::table(out, rows);
  }

  if (r.fairness && r.shows("fairness")) {
    out += "\nFairness [sd] (protected attribute " + r.fairness->protected_attribute + "):\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : r.fairness->measures) {
      rows.push_back({m.id, text::mean_sd(m.aggregate.mean, m.aggregate.sd, d)});
    }
    text::table(out, rows);
  }

  if (r.importance && r.shows("importance")) {
    out += "\nImportance [sd]:\n";
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> head = {"feature"};
    for (const auto& id : r.importance->measure_ids) head.push_back(id);
    rows.push_back(head);
    for (std::size_t i = 0; i < r.importance->rows.size() && i < r.n_important; ++i) {
      const auto& row = r.importance->rows[i];
      std::vector<std::string> cells = {row.feature};
      for (const auto& v : row.values) cells.push_back(text::mean_sd(v.mean, v.sd, d));
      rows.push_back(cells);
    }
    text::table(out, rows);
  }

  if (r.effects && r.shows("effects")) {
    const auto& ep = *r.effects;
    // Importance order when available, else task order.
    std::vector<std::string> order;
    if (r.importance) {
      for (const auto& row : r.importance->rows) order.push_back(row.feature);
    } else {
      order = g.features;
    }
    if (order.size() > r.n_important) order.resize(r.n_important);
    for (const auto& cls : ep.classes) {
      out += "\nEffects";
      if (g.task_type != TaskType::regression) out += " (class " + cls.label + ")";
      out += ":\n";
      std::size_t name_width = std::string_view("feature").size();
      for (const auto& f : order) name_width = std::max(name_width, text::display_width(f));
      std::vector<std::vector<std::string>> strips;  // [feature][method]
      std::vector<std::size_t> strip_width(ep.methods.size(), 0);
      for (std::size_t m = 0; m < ep.methods.size(); ++m) strip_width[m] = ep.methods[m].size();
      for (const auto& f : order) {
        std::vector<std::string> row;
        for (std::size_t m = 0; m < ep.methods.size(); ++m) {
          std::string s;
          for (const auto& fe : ep.curves) {
            if (fe.feature == f && fe.cls.index == cls.index &&
                to_string(fe.method) == ep.methods[m]) {
              s = fe.aggregate.folds_used == 0 ? "NA" : text::strip_for(fe.aggregate);
            }
          }
          strip_width[m] = std::max(strip_width[m], text::display_width(s));
          row.push_back(std::move(s));
        }
        strips.push_back(std::move(row));
      }
      auto line = [&](const std::string& name, const std::vector<std::string>& cells) {
        std::string right;
        for (std::size_t m = 0; m < cells.size(); ++m) {
          right += (m ? "  " : "") + text::pad_left(cells[m], strip_width[m]);
        }
        std::string l = "  " + name;
        const std::size_t used = 2 + text::display_width(name) + text::display_width(right);
        l.append(used + 2 <= width ? width - used : 2, ' ');
        return l + right + "\n";
      };
      out += line("feature", ep.methods);
      for (std::size_t i = 0; i < order.size(); ++i) out += line(order[i], strips[i]);
    }
  }

  if (!r.warnings.empty()) {
    out += "\nWarnings:\n";
    for (const auto& w : r.warnings) out += "  - " + w + "\n";
  }
  return out;
}

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson json_number(double v) { return std::isnan(v) ? ojson(nullptr) : ojson(v); }

inline ojson json_numbers(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

inline ojson json_mean_sd(const MeanSd& m, const std::vector<double>& per_fold) {
  ojson j;
  j["mean"] = json_number(m.mean);
  j["sd"] = json_number(m.sd);
  j["per_fold"] = json_numbers(per_fold);
  return j;
}

inline ojson json_grid(const EffectGrid& g) {
  if (g.kind == ColumnKind::categorical) return ojson(g.labels);
  return json_numbers(g.points);
}

}  // namespace detail

/// Canonical JSON: fixed key order, full-precision numbers, NaN as null.
/// Hidden paragraphs are kept with "hidden": true.
inline std::string render_json(const SummaryReport& r) {
  using detail::json_number;
  using detail::json_numbers;
  using detail::ojson;
  ojson doc;
  const auto& g = r.general;
  {
    ojson j;
    j["task_type"] = std::string(to_string(g.task_type));
    j["target"] = g.target;
    j["positive_class"] = g.positive_class ? ojson(*g.positive_class) : ojson(nullptr);
    j["n"] = g.n_rows;
    j["p"] = g.features.size();
    j["n_numeric"] = g.n_numeric;
    j["n_categorical"] = g.n_categorical;
    j["features"] = g.features;
    j["protected_attribute"] = g.protected_attribute ? ojson(*g.protected_attribute) : ojson(nullptr);
    j["learner"] = g.learner_id;
    j["predict_type"] = std::string(to_string(g.predict_type));
    ojson hp = ojson::object();
    for (const auto& [k, v] : g.hyperparameters) hp[k] = v;
    j["hyperparameters"] = hp;
    j["resampling"] = g.resampling;
    j["iterations"] = g.iterations;
    doc["general"] = j;
  }
  if (r.residuals) {
    const auto& res = *r.residuals;
    ojson j;
    j["hidden"] = !r.shows("residuals");
    j["kind"] = res.kind == ResidualSummary::Kind::regression    ? "regression"
                : res.kind == ResidualSummary::Kind::probability ? "probability"
                                                                 : "confusion";
    if (res.quantiles) {
      j["n"] = res.n_residuals;
      const auto& q = *res.quantiles;
      j["quantiles"] = {{"min", q.min}, {"q25", q.q25}, {"median", q.median}, {"q75", q.q75}, {"max", q.max}};
    }
    if (res.confusion) {
      const auto& cm = *res.confusion;
      ojson counts = ojson::array();
      for (std::size_t t = 0; t < cm.size(); ++t) {
        ojson row = ojson::array();
        for (std::size_t p = 0; p < cm.size(); ++p) row.push_back(cm.at(t, p));
        counts.push_back(row);
      }
      j["confusion"] = {{"levels", cm.levels()}, {"counts", counts}};
    }
    doc["residuals"] = j;
  }
  if (r.performance) {
    ojson j;
    j["hidden"] = !r.shows("performance");
    ojson ms = ojson::array();
    for (const auto& m : r.performance->measures) {
      ojson e;
      e["id"] = m.id;
      e["direction"] = m.direction == Direction::maximize ? "maximize" : "minimize";
      e["aggregation"] = std::string(to_string(m.mode));
      e["mean"] = json_number(m.mean);
      e["sd"] = m.sd ? json_number(*m.sd) : ojson(nullptr);
      e["per_fold"] = json_numbers(m.per_fold);
      e["notes"] = m.notes;
      ms.push_back(e);
    }
    j["measures"] = ms;
    doc["performance"] = j;
  }
  if (r.complexity) {
    const auto& c = *r.complexity;
    ojson j;
    j["hidden"] = !r.shows("complexity");
    j["measures"] = c.measures;
    std::vector<double> s, ias;
    for (const auto& rec : c.per_fold) {
      s.push_back(static_cast<double>(rec.sparsity));
      ias.push_back(rec.interaction_strength);
    }
    j["sparsity"] = detail::json_mean_sd(c.summary.sparsity, s);
    j["interaction_strength"] = detail::json_mean_sd(c.summary.interaction_strength, ias);
    j["notes"] = c.summary.notes;
    doc["complexity"] = j;
  }
  if (r.fairness) {
    const auto& f = *r.fairness;
    ojson j;
    j["hidden"] = !r.shows("fairness");
    j["protected_attribute"] = f.protected_attribute;
    j["groups"] = f.groups;
    ojson ms = ojson::array();
    for (const auto& m : f.measures) {
      ojson e = detail::json_mean_sd(m.aggregate, m.per_fold);
      e.insert(e.begin(), {"id", m.id});
      e["notes"] = m.notes;
      ms.push_back(e);
    }
    j["measures"] = ms;
    doc["fairness"] = j;
  }
  if (r.importance) {
    const auto& t = *r.importance;
    ojson j;
    j["hidden"] = !r.shows("importance");
    j["measures"] = t.measure_ids;
    j["n_features"] = t.n_features;
    ojson rows = ojson::array();
    for (const auto& row : t.rows) {
      ojson e;
      e["feature"] = row.feature;
      for (std::size_t m = 0; m < row.values.size(); ++m) {
        const auto& v = row.values[m];
        e[t.measure_ids[m]] = {{"mean", json_number(v.mean)},
                               {"sd", json_number(v.sd)},
                               {"per_fold", json_numbers(v.per_fold)}};
      }
      rows.push_back(e);
    }
    j["rows"] = rows;
    doc["importance"] = j;
  }
  if (r.effects) {
    const auto& ep = *r.effects;
    ojson j;
    j["hidden"] = !r.shows("effects");
    j["methods"] = ep.methods;
    ojson classes = ojson::array();
    for (const auto& c : ep.classes) classes.push_back(c.label);
    j["classes"] = classes;
    ojson curves = ojson::array();
    for (const auto& fe : ep.curves) {
      const auto& a = fe.aggregate;
      ojson e;
      e["feature"] = fe.feature;
      e["method"] = std::string(to_string(fe.method));
      e["class"] = fe.cls.label;
      e["kind"] = std::string(to_string(a.grid.kind));
      e["grid"] = detail::json_grid(a.grid);
      e["values"] = json_numbers(a.values);
      e["sd"] = json_numbers(a.sd);
      if (fe.method == EffectMethod::ale) e["counts"] = json_numbers(a.counts);
      e["folds_used"] = a.folds_used;
      e["degenerate"] = a.degenerate;
      ojson folds = ojson::array();
      for (const auto& c : fe.folds) {
        ojson fj;
        fj["fold"] = c.fold;
        fj["values"] = json_numbers(c.values);
        if (fe.method == EffectMethod::ale) fj["counts"] = json_numbers(c.counts);
        fj["degenerate"] = c.degenerate;
        fj["empty_intervals"] = c.empty_intervals;
        folds.push_back(fj);
      }
      e["folds"] = folds;
      curves.push_back(e);
    }
    j["curves"] = curves;
    doc["effects"] = j;
  }
  doc["settings"] = {{"digits", r.digits}, {"n_important", r.n_important}};
  doc["warnings"] = r.warnings;
  return doc.dump(2) + "\n";
}

}  // namespace modelsum
