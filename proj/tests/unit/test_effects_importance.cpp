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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "modelsum/complexity.hpp"
#include "modelsum/effects.hpp"
#include "modelsum/importance.hpp"
#include "modelsum/learners.hpp"
#include "modelsum/resampling.hpp"
#include "support/testing.hpp"

using namespace modelsum;
using testing_support::Gen;
using testing_support::pick;
using testing_support::unif;

namespace {

Frame uniform_frame(Gen& g, std::size_t n, std::size_t p, double lo = 0.0, double hi = 1.0) {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> v(n);
    for (auto& x : v) x = unif(g, lo, hi);
    cols.push_back(Column::numeric("x" + std::to_string(j + 1), v));
  }
  return Frame(std::move(cols));
}

std::vector<std::string> names(const Frame& f) {
  std::vector<std::string> out;
  for (const auto& c : f.columns()) out.push_back(c.name());
  return out;
}

EffectCurve curve_with(std::vector<double> values, int fold = 0) {
  EffectCurve c;
  c.feature = "x";
  c.method = EffectMethod::pdp;
  c.fold = fold;
  for (std::size_t k = 0; k < values.size(); ++k) c.grid.points.push_back(static_cast<double>(k));
  c.grid.feature = "x";
  c.values = std::move(values);
  return c;
}

std::vector<EffectCurve> ale_curves(const FittedModel& m, const Frame& f, std::size_t G = 20) {
  std::vector<EffectCurve> out;
  for (const auto& c : f.columns()) out.push_back(ale(m, f, build_grid(c, G)));
  return out;
}

double ias_of(const FittedModel& m, const Frame& f) {
  auto curves = ale_curves(m, f);
  auto preds = m.predict(f).response;
  return interaction_strength(preds, f, curves);
}

}  // namespace

// --- grids ------------------------------------------------------------------

TEST(Grid, EquidistantOverObservedRange) {
  std::vector<double> v;
  for (int i = 0; i <= 100; ++i) v.push_back(i * 0.19);
  EffectGrid g = build_grid(Column::numeric("x", v));
  ASSERT_EQ(g.size(), 20u);
  EXPECT_EQ(g.points.front(), 0.0);
  EXPECT_EQ(g.points.back(), 19.0);
  for (std::size_t k = 1; k < 20; ++k) EXPECT_NEAR(g.points[k] - g.points[k - 1], 1.0, 1e-12);
}

TEST(Grid, FewDistinctValuesUsedDirectly) {
  EffectGrid g = build_grid(Column::numeric("x", {3, 1, 2, 3, 1}));
  EXPECT_EQ(g.points, (std::vector<double>{1, 2, 3}));
  EXPECT_FALSE(g.degenerate);
}

TEST(Grid, CategoricalAndDegenerate) {
  EffectGrid c = build_grid(Column::categorical_from_strings("c", {"m", "f", "m"}));
  EXPECT_EQ(c.labels, (std::vector<std::string>{"m", "f"}));
  EXPECT_EQ(c.points, (std::vector<double>{0, 1}));
  EXPECT_TRUE(build_grid(Column::numeric("k", {2, 2, 2})).degenerate);
  EXPECT_THROW(build_grid(Column::numeric("k", {1, 2}), 1), UsageError);
}

// --- pdp --------------------------------------------------------------------

TEST(Pdp, AdditiveModelShiftsByMean) {
  Frame f({Column::numeric("x1", {0, 1, 2, 3}), Column::numeric("x2", {0, 1, 0, 1})});
  auto m = testing_support::regression_model(f, {"x1", "x2"}, [](const auto& r) { return r[0] + 2 * r[1]; });
  EffectCurve c = pdp(m, f, build_grid(f.column("x1")));
  ASSERT_EQ(c.values.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(c.values[k], c.grid.points[k] + 1.0);
}

TEST(Pdp, MatchesRowByRowOracle) {
  Gen g(51);
  for (int inst = 0; inst < 100; ++inst) {
    Frame f = uniform_frame(g, pick(g, 1, 25), 3, -2, 2);
    auto fn = [](const std::vector<double>& r) { return std::sin(r[0]) * r[1] + r[2] * r[2]; };
    auto m = testing_support::regression_model(f, names(f), fn);
    const std::string feat = "x" + std::to_string(pick(g, 1, 3));
    EffectGrid grid = build_grid(f.column(feat), pick(g, 2, 8));
    EffectCurve c = pdp(m, f, grid);
    auto expected = testing_support::oracle_pdp(m, f, feat, grid.points);
    ASSERT_EQ(c.values, expected) << "instance " << inst;
  }
}

TEST(Pdp, CategoricalLevels) {
  Frame f({Column::categorical_from_strings("c", {"a", "b", "c", "a"}), Column::numeric("z", {1, 2, 3, 4})});
  auto m = testing_support::regression_model(f, {"c", "z"}, [](const auto& r) { return 10 * r[0] + r[1]; });
  EffectCurve c = pdp(m, f, build_grid(f.column("c")));
  EXPECT_EQ(c.values, (std::vector<double>{2.5, 12.5, 22.5}));
}

// --- ale --------------------------------------------------------------------

TEST(Ale, MatchesDefinitionOracle) {
  Gen g(52);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = pick(g, 2, 30);
    Frame f = inst % 3 ? uniform_frame(g, n, 2, -1, 1)
                       : Frame({Column::numeric("x1", testing_support::tied_values(g, n, 5)),
                                Column::numeric("x2", testing_support::tied_values(g, n, 7))});
    auto fn = [](const std::vector<double>& r) { return r[0] * r[0] * r[1] + std::exp(r[0]); };
    auto m = testing_support::regression_model(f, names(f), fn);
    EffectGrid grid = build_grid(f.column("x1"), pick(g, 2, 10));
    if (grid.degenerate) continue;
    EffectCurve c = ale(m, f, grid);
    auto expected = testing_support::oracle_ale(m, f, "x1", grid.points);
    ASSERT_EQ(c.values.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) ASSERT_NEAR(c.values[k], expected[k], 1e-12) << inst;
  }
}

TEST(Ale, CountWeightedMeanIsZero) {
  Gen g(53);
  for (int inst = 0; inst < 100; ++inst) {
    Frame f = uniform_frame(g, pick(g, 2, 60), 3, -3, 3);
    auto m = testing_support::regression_model(
        f, names(f), [](const auto& r) { return std::tanh(r[0] * r[1]) + r[2] * r[0]; });
    for (const auto& c : ale_curves(m, f, pick(g, 2, 20))) {
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < c.values.size(); ++k) {
        num += c.counts[k] * c.values[k];
        den += c.counts[k];
      }
      ASSERT_EQ(den, static_cast<double>(f.n_rows()));
      ASSERT_NEAR(num / den, 0.0, 1e-12);
    }
  }
}

TEST(Ale, UnusedFeatureIsExactlyZero) {
  Gen g(54);
  for (int inst = 0; inst < 100; ++inst) {
    Frame f = uniform_frame(g, pick(g, 2, 40), 2);
    auto m = testing_support::regression_model(f, names(f), [](const auto& r) { return r[0] * 7.0; });
    EffectCurve c = ale(m, f, build_grid(f.column("x2")));
    for (double v : c.values) ASSERT_EQ(v, 0.0);
  }
}

TEST(Ale, LinearModelRecoversSlope) {
  Gen g(55);
  Frame f = uniform_frame(g, 500, 2);
  auto m = testing_support::regression_model(f, names(f), [](const auto& r) { return 4 * r[0] - r[1]; });
  EffectCurve c = ale(m, f, build_grid(f.column("x1")));
  EXPECT_NEAR(testing_support::ls_slope(c.grid.points, c.values), 4.0, 1e-9);
}

TEST(Ale, FittedLinearSlopeWithinTolerance) {
  Gen g(56);
  std::vector<double> x(400), y(400);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = unif(g);
    y[i] = 4 * x[i] + std::normal_distribution<double>(0, 0.5)(g);
  }
  Task t = make_task(Frame({Column::numeric("x", x), Column::numeric("y", y)}), "y");
  FittedModel m = fit(make_learner("linear"), t, 1);
  EffectCurve c = ale(m, *t.frame, build_grid(t, "x"));
  EXPECT_NEAR(testing_support::ls_slope(c.grid.points, c.values), 4.0, 0.2);
}

TEST(Ale, ProductWithIndependentFeature) {
  // E[x2] = 1/2, so the x1 effect is close to a line of slope 1/2.
  Gen g(57);
  Frame f = uniform_frame(g, 4000, 2);
  auto m = testing_support::regression_model(f, names(f), [](const auto& r) { return r[0] * r[1]; });
  EffectCurve c = ale(m, f, build_grid(f.column("x1")));
  EXPECT_NEAR(testing_support::ls_slope(c.grid.points, c.values), 0.5, 0.03);
}

TEST(Ale, CategoricalSteps) {
  Frame f({Column::categorical_from_strings("c", {"a", "b", "c", "c"}), Column::numeric("z", {1, 2, 3, 4})});
  auto m = testing_support::regression_model(f, {"c", "z"}, [](const auto& r) { return 3 * r[0] + r[1]; });
  EffectCurve c = ale(m, f, build_grid(f.column("c")));
  // Uncentered 0, 3, 6 with counts 1, 1, 2: mean 15 / 4.
  EXPECT_EQ(c.values, (std::vector<double>{-3.75, -0.75, 2.25}));
  EXPECT_EQ(c.counts, (std::vector<double>{1, 1, 2}));
}

TEST(Ale, EmptyIntervalBorrowsNearestRows) {
  Frame f({Column::numeric("x", {0, 0, 0, 10}), Column::numeric("z", {1, 2, 3, 4})});
  auto m = testing_support::regression_model(f, {"x", "z"}, [](const auto& r) { return r[0] * r[1]; });
  EffectGrid grid = build_grid(f.column("x"));
  grid.points = {0, 2, 5, 10};
  EffectCurve c = ale(m, f, grid);
  EXPECT_TRUE(c.empty_intervals);
  EXPECT_EQ(c.counts, (std::vector<double>{0, 3, 0, 1}));
  // Interval (2, 5] borrows the rows of (0, 2]: mean z = 2, so 3 * 2; the
  // last interval has z = 4. Uncentered 0, 4, 10, 30 with weights 3 at 4 and 1 at 30.
  const double center = (3 * 4.0 + 30.0) / 4.0;
  EXPECT_EQ(c.values, (std::vector<double>{-center, 4 - center, 10 - center, 30 - center}));
}

TEST(Ale, LinearExactDespiteGaps) {
  Gen g(59);
  for (int inst = 0; inst < 100; ++inst) {
    // Few rows over a 20-point grid leave interior gaps.
    Frame f = uniform_frame(g, pick(g, 2, 12), 1, -1, 1);
    const double b = unif(g, -3, 3);
    auto m = testing_support::regression_model(f, {"x1"}, [b](const auto& r) { return b * r[0]; });
    EffectCurve c = ale(m, f, build_grid(f.column("x1")));
    if (c.degenerate) continue;
    ASSERT_NEAR(testing_support::ls_slope(c.grid.points, c.values), b, 1e-9);
  }
}

TEST(Ale, ValueAtInterpolates) {
  EffectCurve c = curve_with({-1.0, 1.0, 2.0});
  c.method = EffectMethod::ale;
  EXPECT_DOUBLE_EQ(ale_value_at(c, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(ale_value_at(c, 0.25), -0.5);
  EXPECT_DOUBLE_EQ(ale_value_at(c, 1.5), 1.5);
  EXPECT_DOUBLE_EQ(ale_value_at(c, 2.0), 2.0);
}

// --- aggregation ------------------------------------------------------------

TEST(AggregateEffects, MeanAndSd) {
  std::vector<EffectCurve> cs = {curve_with({1, 0}, 0), curve_with({2, 0}, 1), curve_with({3, 0}, 2)};
  EffectCurve a = aggregate_effects(cs);
  EXPECT_DOUBLE_EQ(a.values[0], 2.0);
  EXPECT_DOUBLE_EQ(a.sd[0], 1.0);
  EXPECT_EQ(a.sd[1], 0.0);
  EXPECT_EQ(a.folds_used, 3u);
}

TEST(AggregateEffects, DegenerateFoldsExcluded) {
  std::vector<EffectCurve> cs = {curve_with({1, 0}, 0), curve_with({100, 0}, 1), curve_with({3, 0}, 2)};
  cs[1].degenerate = true;
  EffectCurve a = aggregate_effects(cs);
  EXPECT_DOUBLE_EQ(a.values[0], 2.0);
  EXPECT_EQ(a.folds_used, 2u);
}

TEST(AggregateEffects, MismatchedGridsRejected) {
  std::vector<EffectCurve> cs = {curve_with({1, 0}), curve_with({1, 0, 2})};
  EXPECT_THROW(aggregate_effects(cs), Error);
}

TEST(AggregateEffects, InputOrderDoesNotMatter) {
  Gen g(58);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t folds = pick(g, 2, 8), G = pick(g, 2, 6);
    std::vector<EffectCurve> cs;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<double> v(G);
      for (auto& x : v) x = unif(g, -1e3, 1e3);
      cs.push_back(curve_with(v, static_cast<int>(f)));
    }
    EffectCurve a = aggregate_effects(cs);
    std::shuffle(cs.begin(), cs.end(), g);
    EffectCurve b = aggregate_effects(cs);
    ASSERT_EQ(a.values, b.values);
    ASSERT_EQ(a.sd, b.sd);
  }
}

// --- importance -------------------------------------------------------------

TEST(Pfi, IgnoredFeatureScoresZero) {
  Gen g(61);
  for (int inst = 0; inst < 100; ++inst) {
    Frame f = uniform_frame(g, pick(g, 2, 40), 3);
    auto m = testing_support::regression_model(f, names(f), [](const auto& r) { return r[0] + r[2]; });
    Truth truth;
    truth.type = TaskType::regression;
    for (std::size_t i = 0; i < f.n_rows(); ++i) truth.response.push_back(unif(g));
    auto v = pfi(m, f, truth, measure_by_id("mse"), pick(g, 1, 4), inst);
    ASSERT_EQ(v.size(), 3u);
    ASSERT_EQ(v[1], 0.0);
  }
}

TEST(Pfi, IdentityModelMeetsTwiceVariance) {
  // E (x - x')^2 = 2 Var(x) = 1/6 for independent uniforms.
  Gen g(62);
  Frame f = uniform_frame(g, 5000, 1);
  auto m = testing_support::regression_model(f, names(f), [](const auto& r) { return r[0]; });
  Truth truth;
  truth.type = TaskType::regression;
  auto x = f.column("x1").values();
  truth.response.assign(x.begin(), x.end());
  auto v = pfi(m, f, truth, measure_by_id("mse"), 5, 3);
  EXPECT_NEAR(v[0], 1.0 / 6.0, 0.01);
}

TEST(Pfi, MatchesExhaustivePermutationMean) {
  Frame f({Column::numeric("x", {0.1, 0.3, 0.45, 0.6, 0.8, 0.9})});
  auto m = testing_support::binary_model(f, {"x"}, {"a", "b"}, [](const auto& r) { return r[0]; });
  Truth truth;
  truth.type = TaskType::binary_classification;
  truth.n_classes = 2;
  truth.labels = {0, 0, 1, 0, 1, 1};
  truth.positive = 0;
  // Oracle: predicted class is b (code 1) iff x >= 0.5; average ce over all 720 orders.
  auto x = f.column("x").values();
  std::vector<std::size_t> perm = testing_support::iota(6);
  auto ce_for = [&](const std::vector<std::size_t>& p) {
    double wrong = 0;
    for (std::size_t i = 0; i < 6; ++i) wrong += (x[p[i]] >= 0.5 ? 1u : 0u) != truth.labels[i];
    return wrong / 6.0;
  };
  const double base = ce_for(perm);
  double total = 0.0, count = 0.0;
  do {
    total += ce_for(perm) - base;
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  ASSERT_EQ(count, 720.0);
  auto v = pfi(m, f, truth, measure_by_id("ce"), 4000, 9);
  EXPECT_NEAR(v[0], total / count, 0.01);
}

TEST(Pfi, RejectsNonLoss) {
  Frame f({Column::numeric("x", {1, 2})});
  auto m = testing_support::regression_model(f, {"x"}, [](const auto& r) { return r[0]; });
  Truth t;
  t.type = TaskType::regression;
  t.response = {1, 2};
  EXPECT_THROW(pfi(m, f, t, measure_by_id("rsq"), 1, 1), UsageError);
  EXPECT_THROW(pfi(m, f, t, measure_by_id("mse"), 0, 1), UsageError);
}

TEST(PdpImportance, NumericSdAndCategoricalRange) {
  EXPECT_DOUBLE_EQ(pdp_importance(curve_with({1, 2, 3, 4, 5})), std::sqrt(2.5));
  EffectCurve c = curve_with({0.0, 0.4, 0.2});
  c.grid.kind = ColumnKind::categorical;
  EXPECT_DOUBLE_EQ(pdp_importance(c), 0.1);
  EffectCurve flat = curve_with({7.0});
  EXPECT_EQ(pdp_importance(flat), 0.0);
}

TEST(ImportanceTable, SortsTruncatesAndAggregates) {
  std::vector<std::string> features;
  std::vector<std::vector<double>> folds;
  for (int j = 0; j < 20; ++j) {
    features.push_back("f" + std::to_string(j));
    folds.push_back({0.01 * j, 0.01 * j});
  }
  folds[3] = {0.2, 0.4};
  auto t = build_importance_table({"pfi.mse"}, features, {folds}, 15);
  ASSERT_EQ(t.rows.size(), 15u);
  EXPECT_EQ(t.n_features, 20u);
  EXPECT_EQ(t.rows[0].feature, "f3");
  EXPECT_NEAR(t.rows[0].values[0].mean, 0.3, 1e-15);
  EXPECT_NEAR(t.rows[0].values[0].sd, 0.1414, 1e-4);
  EXPECT_EQ(t.rows[1].feature, "f19");
  for (std::size_t r = 2; r < t.rows.size(); ++r) {
    EXPECT_GE(t.rows[r - 1].values[0].mean, t.rows[r].values[0].mean);
  }
}

TEST(ImportanceTable, TiesBrokenByName) {
  auto t = build_importance_table({"pdp"}, {"b", "a", "c"}, {{{1.0}, {1.0}, {2.0}}}, 15);
  EXPECT_EQ(t.rows[0].feature, "c");
  EXPECT_EQ(t.rows[1].feature, "a");
  EXPECT_EQ(t.rows[2].feature, "b");
}

TEST(ImportanceTable, EndToEndRanksSignalFirst) {
  Gen g(63);
  std::vector<double> a(300), b(300), y(300);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = unif(g);
    b[i] = unif(g);
    y[i] = 5 * a[i] + std::normal_distribution<double>(0, 0.1)(g);
  }
  Task t = make_task(Frame({Column::numeric("noise", b), Column::numeric("signal", a), Column::numeric("y", y)}),
                     "y");
  ResampleResult rr = resample(t, make_learner("linear"), ResamplingStrategy::cv(3), 1, 4);
  auto table = importance_table(rr, {"pfi.mse", "pdp"}, 15);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].feature, "signal");
  EXPECT_EQ(table.rows[0].values[0].per_fold.size(), 3u);
  EXPECT_GT(table.rows[0].values[1].mean, table.rows[1].values[1].mean);
}

// --- complexity -------------------------------------------------------------

TEST(Sparsity, CountsNonFlatCurves) {
  std::vector<EffectCurve> cs = {curve_with({-2, 2}), curve_with({0, 4}), curve_with({0, 0}),
                                 curve_with({1, 1}), curve_with({0, 1e-9})};
  EXPECT_EQ(sparsity(cs, 10.0), 2u);
  EXPECT_EQ(sparsity(cs, 0.0), 0u);
}

TEST(Sparsity, MonotoneInEps) {
  Gen g(64);
  for (int inst = 0; inst < 100; ++inst) {
    std::vector<EffectCurve> cs;
    for (std::size_t j = 0; j < pick(g, 1, 10); ++j) cs.push_back(curve_with({0.0, unif(g, 0, 1)}));
    std::size_t last = cs.size() + 1;
    for (double eps : {0.0, 1e-5, 1e-3, 0.1, 0.5, 1.0}) {
      const std::size_t s = sparsity(cs, 1.0, eps);
      ASSERT_LE(s, last);
      last = s;
    }
  }
}

TEST(Complexity, FeaturelessIsTrivial) {
  Gen g(65);
  Frame f = uniform_frame(g, 50, 3);
  auto m = testing_support::regression_model(f, names(f), [](const auto&) { return 3.0; });
  auto curves = ale_curves(m, f);
  EXPECT_EQ(sparsity(curves, value_range(m.predict(f).response)), 0u);
  EXPECT_EQ(ias_of(m, f), 0.0);
}

TEST(Complexity, AdditiveLinearHasNoInteraction) {
  Gen g(66);
  Frame f = uniform_frame(g, 200, 3);
  auto m = testing_support::regression_model(f, names(f), [](const auto& r) { return r[0] - 2 * r[1]; });
  EXPECT_NEAR(ias_of(m, f), 0.0, 1e-12);
  EXPECT_EQ(sparsity(ale_curves(m, f), value_range(m.predict(f).response)), 2u);
}

TEST(Complexity, PureProductIsAllInteraction) {
  Gen g(67);
  Frame f = uniform_frame(g, 3000, 2, -1, 1);
  auto m = testing_support::regression_model(f, names(f), [](const auto& r) { return r[0] * r[1]; });
  EXPECT_NEAR(ias_of(m, f), 1.0, 0.1);
}

TEST(Complexity, IasInvariantUnderAffineOutputMaps) {
  Gen g(68);
  for (int inst = 0; inst < 100; ++inst) {
    Frame f = uniform_frame(g, pick(g, 5, 60), 2, -1, 1);
    const double a = unif(g, 0.1, 5) * (pick(g, 0, 1) ? 1 : -1), b = unif(g, -10, 10);
    auto fn = [](const std::vector<double>& r) { return r[0] * r[1] + std::sin(3 * r[0]); };
    auto m1 = testing_support::regression_model(f, names(f), fn);
    auto m2 = testing_support::regression_model(f, names(f), [&](const auto& r) { return a * fn(r) + b; });
    const double i1 = ias_of(m1, f), i2 = ias_of(m2, f);
    ASSERT_GE(i1, 0.0);
    ASSERT_NEAR(i1, i2, 1e-8 * std::max(1.0, i1));
  }
}

TEST(Complexity, Aggregation) {
  std::vector<ComplexityRecord> r = {{0, 4, 0.1}, {1, 4, 0.2}, {2, 5, 0.3}};
  auto s = aggregate_complexity(r);
  EXPECT_NEAR(s.sparsity.mean, 13.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.sparsity.sd, 0.57735, 1e-5);
  EXPECT_NEAR(s.interaction_strength.mean, 0.2, 1e-12);
  std::vector<ComplexityRecord> one = {{0, 2, 0.5}};
  EXPECT_EQ(aggregate_complexity(one).notes.size(), 1u);
}
